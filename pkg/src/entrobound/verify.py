"""End-to-end numerical checks of the symmetric-reference entropy bound.

For a symmetric reference ``rho`` and any ``mu`` the chain

    F(mu) <= I(m1(mu), m2(mu)) <= H(mu | rho)

is evaluated directly, with strict inequality ``F < H`` unless ``mu == rho``.
The middle term is the Cramer transform of (Z, Z^2); the pointwise claim
I(x, y) > x^2 / (2y) is swept over grids of moment pairs.
"""
from __future__ import annotations

import json
import math
import os
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import tilt
from .entropy import jensen_bound, jensen_bound_from_moments, relative_entropy
from .errors import ConfigError, EntroboundError, PreconditionError
from .hull import OUTSIDE, moment_hull
from .measures import (
    DIRAC_TOL, SYMMETRY_TOL, DiscreteMeasure, MomentPair, is_dirac_at_zero, is_symmetric,
    moments, parse_spec, reweight,
)
from .report import Check, VerificationReport

CHAIN_TOL = 1e-9
STRICT_MARGIN = 1e-12
EQUAL_WEIGHT_TOL = 1e-9
SLOPE_GATE = 1e-3
MIN_G_TOL = 1e-8

MU_EQUALS_RHO = "mu_equals_rho"
ZERO_FIRST_MOMENT = "zero_first_moment"
H_INFINITE = "h_infinite"
GENERIC = "generic"

DEFAULT_FAMILIES = (
    "rademacher",
    "atoms:-1=0.25,0=0.5,1=0.25",
    "uniform:a=-1,b=1,n=201",
    "gauss:mean=0,sd=1",
)
DEFAULT_TILTS = ((0.5, 0.0), (-0.3, -0.2), (0.2, 0.1))


def max_workers() -> int:
    env = os.environ.get("ENTROBOUND_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            n = 0
        if n > 0:
            return n
    return os.cpu_count() or 1


def _pmap(fn, items):
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def _require_symmetric_reference(rho):
    if not is_symmetric(rho, SYMMETRY_TOL):
        raise PreconditionError(f"reference measure {rho.spec_string()!r} is not symmetric")
    if is_dirac_at_zero(rho, DIRAC_TOL):
        raise PreconditionError("reference measure is the Dirac mass at 0")


def _sub(a, b):
    """a - b for the chain margins; an infinite upper side is vacuously satisfied."""
    if math.isinf(a) and a > 0:
        return math.inf
    return a - b


def _equal_measures(mu, rho):
    return (
        len(mu) == len(rho)
        and bool(np.all(np.abs(mu.positions - rho.positions) <= 1e-12))
        and bool(np.all(np.abs(mu.weights - rho.weights) <= EQUAL_WEIGHT_TOL))
    )


# -- theorem --------------------------------------------------------------------

@dataclass(frozen=True)
class TheoremCheck:
    h: float
    i_at_moments: float
    f: float
    margins: tuple[float, float]
    verdict: str
    case_label: str

    @property
    def passed(self):
        return self.verdict == "pass"


def check_theorem(mu: DiscreteMeasure, rho: DiscreteMeasure) -> TheoremCheck:
    """Evaluate H, I at the moments of ``mu``, and F, and judge the chain."""
    _require_symmetric_reference(rho)
    if is_dirac_at_zero(mu, DIRAC_TOL):
        raise PreconditionError("mu is the Dirac mass at 0")

    h = relative_entropy(mu, rho).value
    m = moments(mu)
    i = tilt.cramer_transform(rho, m).value
    f = jensen_bound(mu)
    chain = f <= i + CHAIN_TOL and i <= h + CHAIN_TOL

    if _equal_measures(mu, rho):
        case = MU_EQUALS_RHO
        ok = chain and abs(h - f) <= STRICT_MARGIN
    else:
        if abs(m.x) <= STRICT_MARGIN:
            case = ZERO_FIRST_MOMENT
        elif math.isinf(h):
            case = H_INFINITE
        else:
            case = GENERIC
        ok = chain and h >= f + STRICT_MARGIN
    return TheoremCheck(h, i, f, (_sub(h, i), _sub(i, f)), "pass" if ok else "fail", case)


def _theorem_entry(name, rho, rho_spec, mu, mu_label, extra=None):
    t0 = time.perf_counter()
    tc = check_theorem(mu, rho)
    margins = list(tc.margins)
    verdict = tc.verdict
    if extra == "tilt":
        # an exponential tilt is the maximizer of the variational bound
        gap = abs(tc.h - tc.i_at_moments)
        margins.append(CHAIN_TOL - gap)
        if not gap <= CHAIN_TOL:
            verdict = "fail"
    return Check(name, rho_spec, mu_label, {"H": tc.h, "I": tc.i_at_moments, "F": tc.f, "W": None},
                 margins, verdict, tc.case_label, wall_time=time.perf_counter() - t0)


def random_reweightings(rho: DiscreteMeasure, count: int, rng) -> list[np.ndarray]:
    """Density factors exp(g_i), g_i standard normal, one array per measure."""
    return [np.exp(rng.standard_normal(len(rho))) for _ in range(count)]


def _family_rng(seed, rho_spec, stream):
    return np.random.default_rng([seed, zlib.crc32(rho_spec.encode()), stream])


def theorem_checks(rho, rho_spec, seed, count, tilts=DEFAULT_TILTS):
    rng = _family_rng(seed, rho_spec, 0)
    jobs = [("theorem", rho, "rho")]
    for k, factors in enumerate(random_reweightings(rho, count, rng)):
        jobs.append(("theorem", reweight(rho, factors), f"random:seed={seed},index={k:03d}"))
    for u, v in tilts:
        jobs.append(("theorem_tilt", tilt.exponential_tilt(rho, (u, v)), f"tilt:u={u!r},v={v!r}"))
    # a point mass off the support: H = +inf while F = 1/2
    far = 2.0 * float(np.abs(rho.positions).max())
    jobs.append(("theorem", DiscreteMeasure.from_atoms([(far, 1.0)]), f"atoms:{far!r}=1"))

    def run(job):
        name, mu, label = job
        return _theorem_entry(name, rho, rho_spec, mu, label, "tilt" if name == "theorem_tilt" else None)

    return _pmap(run, jobs)


# -- grids of moment pairs ------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    """Rows of moment pairs: row ``j`` sits at ``ys[j]`` with x-values ``xs * x_scale[j]``.

    Without ``x_scale`` the grid is the plain rectangle ``xs`` x ``ys``.
    """
    xs: np.ndarray
    ys: np.ndarray
    x_scale: np.ndarray | None = None

    @property
    def cell(self) -> tuple[float, float]:
        dx = float(np.max(np.diff(self.xs))) if self.xs.size > 1 else 0.0
        dy = float(np.max(np.diff(self.ys))) if self.ys.size > 1 else 0.0
        return dx, dy

    def points(self):
        scale = np.ones(self.ys.size) if self.x_scale is None else self.x_scale
        return [(float(x * a), float(y)) for y, a in zip(self.ys, scale) for x in self.xs]


def _centered(n, half_range):
    k = np.arange(n) - (n - 1) / 2.0
    return k * (half_range / ((n - 1) / 2.0)) if n > 1 else np.zeros(1)


def default_grid(rho: DiscreteMeasure, n: int = 39) -> Grid:
    """``n`` x ``n`` grid inside the moment hull, centred on (0, m2(rho)).

    y steps by 95% of the distance from m2 to the nearer end of the hull's
    y-range; each row spans 95% of the admissible |x| at its height, so
    every point is interior whenever the hull has one. For odd ``n`` the
    grid contains (0, m2) itself.
    """
    if n < 1:
        raise ConfigError("grid_points", "must be positive")
    z2 = rho.positions ** 2
    m2 = moments(rho).y
    room = min(m2 - z2.min(), z2.max() - m2)
    if room <= 1e-12 or n == 1:
        ys = np.array([m2])
    else:
        ys = m2 + _centered(n, 0.95 * room)
    hull = moment_hull(rho)
    half = np.empty(ys.size)
    for j, y in enumerate(ys):
        lo, hi = hull.x_range(y) or (0.0, 0.0)
        half[j] = 0.95 * min(-lo, hi)
    top = float(half.max())
    scale = half / top if top > 0 else np.ones(ys.size)
    return Grid(_centered(n, top), ys, scale)


def make_grid(n=39, x_max=None, y_min=None, y_max=None, rho=None) -> Grid:
    """Explicit rectangular grid; unspecified ranges fall back to ``default_grid``."""
    if x_max is None and y_min is None and y_max is None:
        return default_grid(rho, n)
    base = default_grid(rho, n) if rho is not None else None
    if x_max is None:
        x_max = float(np.max(np.abs(base.points()), axis=0)[0])
    lo = float(base.ys[0]) if y_min is None else y_min
    hi = float(base.ys[-1]) if y_max is None else y_max
    if not 0 < lo <= hi:
        raise ConfigError("grid", "need 0 < y_min <= y_max")
    return Grid(_centered(n, x_max), np.linspace(lo, hi, n) if n > 1 else np.array([lo]))


@dataclass(frozen=True)
class GridRow:
    x: float
    y: float
    region: str
    I: float
    bound: float
    W: float | None
    converged: bool
    wall_time: float = field(default=0.0, compare=False)

    @property
    def G(self) -> float:
        return self.I - self.bound


def evaluate_grid(rho: DiscreteMeasure, grid: Grid) -> list[GridRow]:
    """I, x^2/(2y) and the witness bound at every grid point, row-major in y."""
    def one(pt):
        x, y = pt
        t0 = time.perf_counter()
        res = tilt.cramer_transform(rho, MomentPair(x, y))
        w = tilt.witness_bound(rho, x, y) if y != 0 else None
        return GridRow(x, y, res.region, res.value, x * x / (2.0 * y), w, res.converged,
                       time.perf_counter() - t0)

    return _pmap(one, grid.points())


def _proposition_entry(row: GridRow, rho_spec):
    q = {"H": None, "I": row.I, "F": row.bound, "W": row.W}
    if row.region == OUTSIDE:
        return Check("proposition", rho_spec, None, q, [math.inf, math.inf], "pass", "vacuous",
                     (row.x, row.y), row.wall_time)
    witness_margin = row.I - row.W
    if row.x == 0:
        margin = row.I
        ok = margin >= -CHAIN_TOL and witness_margin >= -CHAIN_TOL
        case = "zero_x"
    else:
        margin = row.G
        need = STRICT_MARGIN if abs(row.x / row.y) >= SLOPE_GATE else 0.0
        ok = margin > need and witness_margin >= -CHAIN_TOL
        case = GENERIC
    return Check("proposition", rho_spec, None, q, [margin, witness_margin],
                 "pass" if ok else "fail", case, (row.x, row.y), row.wall_time)


def check_proposition(rho: DiscreteMeasure, grid: Grid, rows=None, rho_spec=None) -> VerificationReport:
    """I(x, y) > x^2/(2y) and I >= witness bound at every realizable grid point."""
    _require_symmetric_reference(rho)
    rho_spec = rho_spec or rho.spec_string()
    rows = rows if rows is not None else evaluate_grid(rho, grid)
    return VerificationReport("proposition", 0, [_proposition_entry(r, rho_spec) for r in rows])


@dataclass(frozen=True)
class MinGResult:
    x: float
    y: float
    value: float
    global_min: float
    target: tuple[float, float]
    cell: tuple[float, float]
    passed: bool


def min_g(rho: DiscreteMeasure, grid: Grid, rows=None) -> MinGResult:
    rows = rows if rows is not None else evaluate_grid(rho, grid)
    finite = [r for r in rows if r.region != OUTSIDE and r.y > 0]
    m2 = moments(rho).y
    cell = grid.cell
    if not finite:
        return MinGResult(math.nan, math.nan, math.inf, math.inf, (0.0, m2), cell, False)
    best = min(finite, key=lambda r: (r.G, abs(r.x), abs(r.y - m2)))
    near = abs(best.x) <= cell[0] + 1e-12 and abs(best.y - m2) <= cell[1] + 1e-12
    ok = near and -CHAIN_TOL <= best.G <= MIN_G_TOL
    return MinGResult(best.x, best.y, best.G, best.G, (0.0, m2), cell, ok)


def sweep_min_g(rho: DiscreteMeasure, grid: Grid, rows=None, rho_spec=None) -> VerificationReport:
    """Locate the grid minimum of I(x, y) - x^2/(2y); it should sit at (0, m2(rho))."""
    _require_symmetric_reference(rho)
    rho_spec = rho_spec or rho.spec_string()
    t0 = time.perf_counter()
    res = min_g(rho, grid, rows)
    q = {"H": None, "I": res.value + (res.x * res.x / (2 * res.y) if res.y else 0.0),
         "F": res.x * res.x / (2 * res.y) if res.y else None, "W": None}
    margins = [res.value, abs(res.x - res.target[0]), abs(res.y - res.target[1])]
    check = Check("min_g", rho_spec, None, q, margins, "pass" if res.passed else "fail", GENERIC,
                  (res.x, res.y), time.perf_counter() - t0)
    return VerificationReport("min_g", 0, [check])


# -- asymmetric references ---------------------------------------------------------

def search_counterexample_asymmetric(rho: DiscreteMeasure, trials: int, seed: int,
                                     rho_spec=None) -> VerificationReport:
    """Look for mu << rho with H(mu | rho) < F(mu) when rho is not symmetric.

    Each candidate becomes a check whose verdict is ``fail`` exactly when it
    violates the inequality, so ``report.failures`` lists the counterexamples.
    """
    if is_symmetric(rho, SYMMETRY_TOL):
        raise PreconditionError("search needs a non-symmetric reference; the bound holds for symmetric ones")
    rho_spec = rho_spec or rho.spec_string()
    rng = np.random.default_rng(seed)
    candidates = [(rho, "rho")]
    for k, factors in enumerate(random_reweightings(rho, trials, rng)):
        candidates.append((reweight(rho, factors), f"random:seed={seed},index={k:04d}"))

    def run(cand):
        mu, label = cand
        t0 = time.perf_counter()
        h = relative_entropy(mu, rho).value
        f = jensen_bound(mu)
        i = tilt.cramer_transform(rho, moments(mu)).value
        violated = h < f - STRICT_MARGIN
        return Check("asymmetric_search", rho_spec, label, {"H": h, "I": i, "F": f, "W": None},
                     [_sub(h, f)], "fail" if violated else "pass",
                     "violation" if violated else "holds", wall_time=time.perf_counter() - t0)

    return VerificationReport("asymmetric_search", seed, _pmap(run, candidates))


# -- analytic kernel checks ------------------------------------------------------------

def cosh_inequality_margin(us) -> float:
    """max of ln(cosh(u) e^{-u^2/2}) over ``us``; negative means the strict bound holds."""
    return float(np.max(tilt.log_cosh_gauss(us)))


def _random_tilts(rho, rng, count):
    scale = float(np.abs(rho.positions).max())
    u = rng.uniform(-3.0, 3.0, count) / scale
    v = rng.uniform(-1.0, 0.5, count) / scale ** 2
    return list(zip(u.tolist(), v.tolist()))


def fd_gradient_error(rho, theta, step=1e-6) -> float:
    """Worst relative gap between the analytic gradient and central differences.

    Relative to max(1, |component|) so gradients near zero are not divided by ~0.
    """
    u, v = theta
    ev = tilt.cgf(rho, (u, v))
    fd_u = (tilt.cgf_value(rho, (u + step, v)) - tilt.cgf_value(rho, (u - step, v))) / (2 * step)
    fd_v = (tilt.cgf_value(rho, (u, v + step)) - tilt.cgf_value(rho, (u, v - step))) / (2 * step)
    return max(abs(fd - g) / max(1.0, abs(g)) for fd, g in zip((fd_u, fd_v), ev.gradient))


def kernel_checks(rho, rho_spec, seed, count=25) -> list[Check]:
    rng = _family_rng(seed, rho_spec, 1)
    thetas = _random_tilts(rho, rng, count)
    out = []

    t0 = time.perf_counter()
    worst = max(fd_gradient_error(rho, th) for th in thetas)
    out.append(Check("cgf_gradient", rho_spec, None, {}, [1e-6 - worst],
                     "pass" if worst <= 1e-6 else "fail", GENERIC,
                     wall_time=time.perf_counter() - t0))

    t0 = time.perf_counter()
    low = min(float(np.linalg.eigvalsh(tilt.cgf(rho, th).hessian)[0]) for th in thetas)
    out.append(Check("cgf_hessian_psd", rho_spec, None, {}, [low + 1e-10],
                     "pass" if low >= -1e-10 else "fail", GENERIC,
                     wall_time=time.perf_counter() - t0))

    t0 = time.perf_counter()
    points = [moments(reweight(rho, f)) for f in random_reweightings(rho, 8, rng)]
    points.append(moments(rho))
    slack = math.inf
    for p in points:
        i = tilt.cramer_transform(rho, p).value
        for th in thetas[:10]:
            lower = th[0] * p.x + th[1] * p.y - tilt.cgf_value(rho, th)
            slack = min(slack, i + CHAIN_TOL - lower)
    out.append(Check("young_fenchel", rho_spec, None, {}, [slack],
                     "pass" if slack >= 0 else "fail", GENERIC,
                     wall_time=time.perf_counter() - t0))

    t0 = time.perf_counter()
    scale = float(np.abs(rho.positions).max())
    worst = 0.0
    for s in (-2.0, -0.5, 0.0, 0.5, 1.0, 2.0):
        for t in (0.0, 0.5, 2.0):
            left, right = tilt.symmetrized_integrand_identity_check(rho, s / scale, t / scale ** 2)
            worst = max(worst, abs(left - right) / max(1.0, abs(left)))
    out.append(Check("symmetrization_identity", rho_spec, None, {}, [1e-10 - worst],
                     "pass" if worst <= 1e-10 else "fail", GENERIC,
                     wall_time=time.perf_counter() - t0))
    return out


def global_checks() -> list[Check]:
    t0 = time.perf_counter()
    us = np.logspace(-8, math.log10(50.0), 2001)
    worst = cosh_inequality_margin(us)
    at_zero = float(tilt.log_cosh_gauss(0.0))
    ok = worst < 0 and at_zero == 0.0
    cosh = Check("cosh_inequality", "-", None, {}, [-worst], "pass" if ok else "fail", GENERIC,
                 wall_time=time.perf_counter() - t0)
    # finite atom lists never have an infinite second moment; only the formula is checked
    f_inf = jensen_bound_from_moments(1.0, math.inf)
    branch = Check("infinite_second_moment_branch", "-", None, {"F": f_inf}, [f_inf],
                   "pass" if f_inf == 0.0 else "fail", "analytically vacuous at desk scale")
    return [cosh, branch]


# -- suites ---------------------------------------------------------------------------

@dataclass
class SuiteConfig:
    name: str = "default"
    seed: int = 7
    families: list = field(default_factory=lambda: list(DEFAULT_FAMILIES))
    mu_per_family: int = 100
    tilts: list = field(default_factory=lambda: [list(t) for t in DEFAULT_TILTS])
    grid_points: int = 39
    theorem: bool = True
    proposition: bool = True
    min_g: bool = True
    kernel: bool = True

    @classmethod
    def from_dict(cls, d) -> "SuiteConfig":
        if not isinstance(d, dict):
            raise ConfigError("<root>", "suite config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        for key in d:
            if key not in known:
                raise ConfigError(key, "unknown field")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def validate(self):
        if not isinstance(self.name, str):
            raise ConfigError("name", "must be a string")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError("seed", "must be a nonnegative integer")
        if not isinstance(self.families, list):
            raise ConfigError("families", "must be a list of measure specs")
        for k, spec in enumerate(self.families):
            if not isinstance(spec, str):
                raise ConfigError(f"families[{k}]", "must be a measure spec string")
            try:
                parse_spec(spec)
            except EntroboundError as exc:
                raise ConfigError(f"families[{k}]", str(exc)) from exc
        for fname in ("mu_per_family", "grid_points"):
            val = getattr(self, fname)
            if not isinstance(val, int) or isinstance(val, bool) or val < (0 if fname == "mu_per_family" else 1):
                raise ConfigError(fname, "must be a positive integer")
        try:
            self.tilts = [(float(u), float(v)) for u, v in self.tilts]
        except (TypeError, ValueError) as exc:
            raise ConfigError("tilts", "must be a list of [u, v] pairs") from exc
        for fname in ("theorem", "proposition", "min_g", "kernel"):
            if not isinstance(getattr(self, fname), bool):
                raise ConfigError(fname, "must be true or false")


def load_config(path) -> SuiteConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", f"invalid JSON: {exc}") from exc
    return SuiteConfig.from_dict(data)


def family_checks(spec: str, cfg: SuiteConfig) -> list[Check]:
    rho = parse_spec(spec)
    try:
        _require_symmetric_reference(rho)
    except PreconditionError as exc:
        return [Check("precondition", spec, None, {}, [], "fail", "precondition_error: " + str(exc))]

    checks = []
    if cfg.theorem:
        checks += theorem_checks(rho, spec, cfg.seed, cfg.mu_per_family, cfg.tilts)
    if cfg.proposition or cfg.min_g:
        grid = default_grid(rho, cfg.grid_points)
        rows = evaluate_grid(rho, grid)
        if cfg.proposition:
            checks += check_proposition(rho, grid, rows, spec).checks
        if cfg.min_g:
            checks += sweep_min_g(rho, grid, rows, spec).checks
    if cfg.kernel:
        checks += kernel_checks(rho, spec, cfg.seed)
    return checks


def run_suite(config: SuiteConfig | None = None) -> VerificationReport:
    """Run every configured family and return the report sorted by check name and inputs."""
    cfg = config or SuiteConfig()
    cfg.validate()
    report = VerificationReport(cfg.name, cfg.seed)
    for spec in cfg.families:
        report.extend(family_checks(spec, cfg))
    if cfg.families and cfg.kernel:
        report.extend(global_checks())
    return report.sorted()
