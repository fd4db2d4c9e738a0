"""Acceptance criteria 1-8, each at its stated tolerance and runtime budget.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary lists
one PASS/FAIL line per criterion.
"""
import math

import numpy as np

from entrobound.cli import main
from entrobound.entropy import jensen_bound, relative_entropy
from entrobound.hull import BOUNDARY, moment_hull
from entrobound.measures import DiscreteMeasure, moments, parse_spec
from entrobound.tilt import (
    INTERIOR, cgf, cramer_transform, log_cosh_gauss, symmetrized_integrand_identity_check,
    witness_bound, witness_integral,
)
from entrobound.verify import (
    DEFAULT_FAMILIES, MU_EQUALS_RHO, check_proposition, default_grid, evaluate_grid,
    search_counterexample_asymmetric, sweep_min_g, theorem_checks,
)
from oracles import brute_force_cramer, coin_rate, kl_direct, log_laplace, three_atom_rate

SEED = 7


def test_criterion_1_closed_forms(criterion):
    with criterion(1, "closed-form spot values within 1e-9", 1.0) as c:
        rad = parse_spec("rademacher")
        coin = parse_spec("atoms:-1=0.25,1=0.75")
        point = parse_spec("atoms:1=1")
        integral = math.cosh(0.5) * math.exp(-0.125)
        spots = {
            "H(delta_1|rad)": (relative_entropy(point, rad).value, math.log(2)),
            "H(coin|rad)": (relative_entropy(coin, rad).value, coin_rate(0.75)),
            "F(coin)": (jensen_bound(coin), 0.125),
            "I(0.5,1|rad)": (cramer_transform(rad, (0.5, 1.0)).value, coin_rate(0.75)),
            "W(rad,0.5,1)": (witness_bound(rad, 0.5, 1.0), 0.125 - math.log(integral)),
            "witness_integral(rad,0.5,1)": (witness_integral(rad, 0.5, 1.0), integral),
        }
        for name, (got, want) in spots.items():
            assert abs(got - want) <= 1e-9, f"{name}: {got!r} vs {want!r}"
        # the quoted truncations
        assert abs(coin_rate(0.75) - 0.130812) < 1e-6
        assert abs(spots["W(rad,0.5,1)"][1] - 0.129886) < 1e-6
        c.note(f"{len(spots)} values; witness integral = cosh(1/2)e^(-1/8) = {integral:.9f}")


def test_criterion_2_theorem_chain(criterion):
    with criterion(2, "theorem chain on 4 families x 100 reweightings", 30.0) as c:
        total = 0
        for spec in DEFAULT_FAMILIES:
            rho = parse_spec(spec)
            checks = theorem_checks(rho, spec, SEED, 100)
            assert sum(ch.mu.startswith("random:") for ch in checks) == 100
            for ch in checks:
                h, i, f = (ch.quantities[k] for k in "HIF")
                assert f <= i + 1e-9 <= h + 2e-9, (spec, ch.mu, h, i, f)
                if ch.case == MU_EQUALS_RHO:
                    assert abs(h) <= 1e-12 and abs(f) <= 1e-12 and abs(h - f) <= 1e-12
                else:
                    assert h - f >= 1e-12, (spec, ch.mu, h, f)
                assert ch.passed
            total += len(checks)
        c.note(f"{total} (rho, mu) pairs")


def test_criterion_3_proposition_grid(criterion):
    with criterion(3, "proposition on 39x39 grids", 60.0) as c:
        gated = 0
        worst = math.inf
        for spec in DEFAULT_FAMILIES:
            rho = parse_spec(spec)
            grid = default_grid(rho, 39)
            rows = evaluate_grid(rho, grid)
            # a +-1 reference has z^2 = 1: its moment set is a segment with no
            # interior, so its grid is the 39 points of that segment
            flat = moment_hull(rho).dim < 2
            assert len(rows) == (39 if flat else 39 * 39)
            for r in rows:
                assert r.region == (BOUNDARY if flat else INTERIOR) and r.converged, (spec, r)
                if abs(r.x / r.y) >= 1e-3:
                    gated += 1
                    worst = min(worst, r.G)
                    assert r.G > 1e-12, (spec, r.x, r.y, r.G)
                assert r.I >= r.W - 1e-9, (spec, r.x, r.y)
            assert check_proposition(rho, grid, rows, spec).passed
        c.note(f"{gated} gated points, smallest margin {worst:.3g}")


def test_criterion_4_cramer_oracle(criterion):
    with criterion(4, "Newton vs brute-force sup on 25 interior points within 1e-6", 60.0) as c:
        rho = parse_spec("atoms:-1=0.25,0=0.5,1=0.25")
        z, p = [-1.0, 0.0, 1.0], [0.25, 0.5, 0.25]
        worst = 0.0
        for x in (-0.3, -0.15, 0.0, 0.15, 0.3):
            for y in (0.4, 0.5, 0.6, 0.7, 0.8):
                res = cramer_transform(rho, (x, y))
                assert res.region == INTERIOR and res.converged
                brute, _ = brute_force_cramer(z, p, x, y)
                worst = max(worst, abs(res.value - brute))
                assert abs(res.value - brute) <= 1e-6, (x, y, res.value, brute)
                # closed form of the three-atom rate as a second witness
                assert abs(res.value - three_atom_rate(x, y)) <= 1e-9
        c.note(f"max |Newton - brute| = {worst:.2e}")


def _random_reference(rng):
    n = int(rng.integers(2, 9))
    z = np.sort(rng.choice(np.arange(-40, 41), size=n, replace=False) / 10.0)
    return DiscreteMeasure(z, rng.uniform(0.05, 1.0, n))


def test_criterion_5_kernel_checks(criterion):
    with criterion(5, "cgf gradient/Hessian, cosh bound, symmetrization identity", None) as c:
        rng = np.random.default_rng(SEED)
        h = 1e-6
        worst_fd = 0.0
        low_eig = math.inf
        for _ in range(100):
            rho = _random_reference(rng)
            scale = float(np.abs(rho.positions).max())
            u = rng.uniform(-3, 3) / scale
            v = rng.uniform(-1, 0.5) / scale ** 2
            ev = cgf(rho, (u, v))
            z, w = rho.positions, rho.weights
            fd = ((log_laplace(z, w, u + h, v) - log_laplace(z, w, u - h, v)) / (2 * h),
                  (log_laplace(z, w, u, v + h) - log_laplace(z, w, u, v - h)) / (2 * h))
            for a, b in zip(fd, ev.gradient):
                err = abs(a - b) / max(1.0, abs(b))
                worst_fd = max(worst_fd, err)
            low_eig = min(low_eig, float(np.linalg.eigvalsh(ev.hessian)[0]))
        assert worst_fd <= 1e-6
        assert low_eig >= -1e-10

        us = np.logspace(-8, math.log10(50.0), 4001)
        assert np.all(log_cosh_gauss(us) < 0)

        worst_id = 0.0
        for spec in DEFAULT_FAMILIES:
            rho = parse_spec(spec)
            for s in np.linspace(-3, 3, 13):
                for t in (0.0, 0.25, 1.0, 3.0):
                    left, right = symmetrized_integrand_identity_check(rho, s, t)
                    worst_id = max(worst_id, abs(left - right) / abs(left))
        assert worst_id <= 1e-10
        c.note(f"fd {worst_fd:.1e}, min eig {low_eig:.1e}, identity {worst_id:.1e}")


def test_criterion_6_min_g(criterion):
    with criterion(6, "global minimum of G at (0, m2) within one cell", None) as c:
        found = []
        for spec in DEFAULT_FAMILIES:
            rho = parse_spec(spec)
            grid = default_grid(rho, 39)
            rep = sweep_min_g(rho, grid, rho_spec=spec)
            (chk,) = rep.checks
            x, y = chk.point
            dx, dy = grid.cell
            m2 = moments(rho).y
            assert abs(x) <= dx and abs(y - m2) <= dy, (spec, x, y)
            assert -1e-9 <= chk.margins[0] <= 1e-8, (spec, chk.margins[0])
            assert chk.passed
            found.append(f"{chk.margins[0]:.1e}")
        c.note("min G per family: " + ", ".join(found))


def test_criterion_7_asymmetry(criterion):
    with criterion(7, "violations found for asymmetric references at mu = rho", None) as c:
        cases = [("atoms:1=1", 0.5), ("atoms:-1=0.1,1=0.9", 0.32)]
        for spec, f_want in cases:
            rho = parse_spec(spec)
            rep = search_counterexample_asymmetric(rho, 1000, 42, spec)
            at_rho = [ch for ch in rep.checks if ch.mu == "rho"]
            assert len(at_rho) == 1 and at_rho[0].case == "violation"
            assert at_rho[0].quantities["H"] == 0
            assert abs(at_rho[0].quantities["F"] - f_want) <= 1e-12
            # independent evaluation of the violating pair
            atoms = list(zip(rho.positions.tolist(), rho.weights.tolist()))
            m1 = sum(z * w for z, w in atoms)
            m2 = sum(z * z * w for z, w in atoms)
            assert kl_direct(atoms, atoms) == 0 < m1 * m1 / (2 * m2)
            assert not rep.passed
        c.note("H = 0 < F in both cases")


def test_criterion_8_determinism(criterion, tmp_path, capsys):
    with criterion(8, "byte-identical default reports for a fixed seed", None) as c:
        outs = [tmp_path / "a.json", tmp_path / "b.json"]
        for out in outs:
            assert main(["verify", "--suite", "default", "--seed", str(SEED), "--format", "json",
                         "--out", str(out)]) == 0
        a, b = (o.read_bytes() for o in outs)
        assert a == b
        c.note(f"{len(a)} bytes, exit 0")
    capsys.readouterr()
