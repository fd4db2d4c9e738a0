"""Bivariate log-Laplace transform of (Z, Z^2) and its Cramer transform.

``cgf`` evaluates Lambda(u, v) = ln sum_i rho_i exp(u z_i + v z_i^2) with the
tilted mean and covariance as gradient and Hessian. ``cramer_transform``
computes I(x, y) = sup_{u,v} {u x + v y - Lambda(u, v)}: damped Newton ascent
in the interior of the moment hull, an exact face formula on its boundary,
and +inf outside.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp, xlogy

from . import kernels
from .errors import DomainError
from .hull import BOUNDARY, INTERIOR, OUTSIDE, REGION_TOL, moment_hull
from .measures import SYMMETRY_TOL, DiscreteMeasure, MomentPair, is_symmetric

#: argmax placeholder when the supremum is approached only as |theta| -> inf
BOUNDARY_DIVERGENCE = "boundary-divergence"

NEWTON_GTOL = 1e-10
NEWTON_MAX_ITER = 200
ARMIJO = 1e-4
COND_LIMIT = 1e12
DIVERGENCE_NORM = 1e4
# below this gradient norm objective increments drown in log-sum-exp rounding
ROUNDOFF_GRAD = 1e-6


@dataclass(frozen=True)
class TiltParams:
    u: float
    v: float

    def __iter__(self):
        yield self.u
        yield self.v


@dataclass(frozen=True)
class CgfEval:
    value: float
    gradient: tuple[float, float]
    hessian: np.ndarray


@dataclass(frozen=True)
class CramerResult:
    value: float
    argmax: TiltParams | str
    iterations: int
    converged: bool
    region: str


def cgf(rho: DiscreteMeasure, theta) -> CgfEval:
    u, v = theta
    val, m1, m2, c11, c12, c22 = kernels.cgf_eval(rho.positions, rho.log_weights, u, v)
    return CgfEval(val, (m1, m2), np.array([[c11, c12], [c12, c22]]))


def cgf_value(rho: DiscreteMeasure, theta) -> float:
    u, v = theta
    return kernels.cgf_value(rho.positions, rho.log_weights, u, v)


def exponential_tilt(rho: DiscreteMeasure, theta, label: str | None = None) -> DiscreteMeasure:
    """Measure proportional to exp(u z + v z^2) rho(dz)."""
    u, v = theta
    z = rho.positions
    a = rho.log_weights + u * z + v * z * z
    return DiscreteMeasure(z, np.exp(a - a.max()), label)


def log_cosh_gauss(u):
    """ln(cosh(u) exp(-u^2/2)), accurate near zero where the product rounds to 1.

    Strictly negative for u != 0.
    """
    u = np.abs(np.asarray(u, dtype=float))
    out = np.empty_like(u)
    small = u < 0.05
    s = u[small]
    s2 = s * s
    # Taylor series of ln cosh(u) - u^2/2
    out[small] = s2 * s2 * (-1.0 / 12 + s2 * (1.0 / 45 + s2 * (-17.0 / 2520 + s2 * 31.0 / 14175)))
    b = u[~small]
    out[~small] = b + np.log1p(np.exp(-2.0 * b)) - math.log(2.0) - 0.5 * b * b
    return out if out.ndim else float(out)


def symmetrized_integrand_identity_check(rho: DiscreteMeasure, s: float, t: float):
    """Both sides of sum rho_i e^{s z - t z^2} = sum rho_i cosh(s z) e^{-t z^2}.

    Each side is summed independently; they agree only when ``rho`` is
    symmetric.
    """
    if not is_symmetric(rho, SYMMETRY_TOL):
        raise DomainError("identity needs a symmetric reference measure")
    z, p = rho.positions, rho.weights
    left = float(p @ np.exp(s * z - t * z * z))
    right = float(p @ (np.cosh(s * z) * np.exp(-t * z * z)))
    return left, right


def _witness_slope(x, y):
    if y == 0:
        raise DomainError("witness needs y != 0")
    return x / y


def log_witness_integral(rho: DiscreteMeasure, x: float, y: float) -> float:
    s = _witness_slope(x, y)
    return cgf_value(rho, (s, -0.5 * s * s))


def witness_integral(rho: DiscreteMeasure, x: float, y: float) -> float:
    """sum rho_i exp(s z_i - s^2 z_i^2 / 2) with s = x / y."""
    return math.exp(log_witness_integral(rho, x, y))


def witness_bound(rho: DiscreteMeasure, x: float, y: float) -> float:
    """x^2/(2y) - ln witness_integral: the objective at the tilt (x/y, -x^2/(2y^2))."""
    s = _witness_slope(x, y)
    return 0.5 * s * x - cgf_value(rho, (s, -0.5 * s * s))


def witness_gap(rho: DiscreteMeasure, x: float, y: float) -> float:
    """witness_bound - x^2/(2y) for symmetric ``rho``, through the log-cosh form.

    Stays accurate (and positive) when s = x/y is so small that the direct
    integral rounds to 1.
    """
    if not is_symmetric(rho, SYMMETRY_TOL):
        raise DomainError("witness gap formula needs a symmetric reference measure")
    s = _witness_slope(x, y)
    ell = log_cosh_gauss(s * rho.positions)
    excess = float(rho.weights @ np.expm1(ell))
    if excess > -0.5:
        return -math.log1p(excess)
    # far from 1 the log-sum-exp form keeps precision that expm1 cancels away
    return -float(logsumexp(ell + rho.log_weights))


def realizable_region(rho: DiscreteMeasure, point, tol: float = REGION_TOL) -> str:
    x, y = point
    return moment_hull(rho).locate(x, y, tol).region


def _line_cramer(z, p, x):
    """sup_s {s x - ln sum p_i e^{s z_i}} for collinear face atoms ``z``."""
    if z.size == 1:
        return -math.log(p[0])
    if z.size == 2:
        lam = min(max((z[1] - x) / (z[1] - z[0]), 0.0), 1.0)
        return float(xlogy(lam, lam / p[0]) + xlogy(1.0 - lam, (1.0 - lam) / p[1]))
    if x <= z[0]:
        return -math.log(p[0])
    if x >= z[-1]:
        return -math.log(p[-1])
    lp = np.log(p)

    def log_mass(s):
        a = lp + s * z
        m = a.max()
        return m + math.log(np.exp(a - m).sum())

    def excess(s):
        a = lp + s * z
        w = np.exp(a - a.max())
        return float(w @ z / w.sum()) - x

    lo, hi = -1.0, 1.0
    while excess(lo) > 0:
        lo *= 2
    while excess(hi) < 0:
        hi *= 2
    s = brentq(excess, lo, hi, xtol=1e-14)
    return s * x - log_mass(s)


def _two_atom_argmax(z, p, x):
    """Minimum-norm tilt reproducing the point on a two-atom hull, or None at a vertex."""
    lam = (z[1] - x) / (z[1] - z[0])
    if not 0.0 < lam < 1.0:
        return None
    c = math.log((1.0 - lam) * p[0] / (lam * p[1]))
    d = np.array([z[1] - z[0], z[1] ** 2 - z[0] ** 2])
    u, v = c * d / (d @ d)
    return TiltParams(float(u), float(v))


def _boundary_result(rho, face, x, iterations=0):
    idx = np.asarray(face)
    z, p = rho.positions[idx], rho.weights[idx]
    value = _line_cramer(z, p, x)
    value = value if value > 0 else 0.0
    argmax = BOUNDARY_DIVERGENCE
    hull = moment_hull(rho)
    # when the face is the whole hull the supremum is attained
    if hull.dim == 0:
        argmax = TiltParams(0.0, 0.0)
    elif hull.dim == 1 and len(rho) == 2 and idx.size == 2:
        argmax = _two_atom_argmax(z, p, x) or BOUNDARY_DIVERGENCE
    return CramerResult(value, argmax, iterations, True, BOUNDARY)


def _newton_ascent(rho, px, py, max_iter, gtol):
    z, lw = rho.positions, rho.log_weights
    p = np.array([px, py])
    theta = np.zeros(2)
    val, m1, m2, c11, c12, c22 = kernels.cgf_eval(z, lw, 0.0, 0.0)
    f = -val
    g = p - (m1, m2)
    reclassified = False
    it = 0
    while it < max_iter:
        if math.hypot(*g) <= gtol:
            return theta, f, it, True, None
        hess = np.array([[c11, c12], [c12, c22]])
        ev = np.linalg.eigvalsh(hess)
        if ev[0] > 0 and ev[1] / ev[0] < COND_LIMIT:
            d = np.linalg.solve(hess, g)
        else:
            d = g
        slope = g @ d
        gnorm = math.hypot(*g)
        alpha = 1.0
        while True:
            trial = theta + alpha * d
            ev_t = kernels.cgf_eval(z, lw, trial[0], trial[1])
            f_trial = trial @ p - ev_t[0]
            if f_trial >= f + ARMIJO * alpha * slope:
                break
            # the increase is below rounding near the optimum: judge by the gradient instead
            g_trial = p - ev_t[1:3]
            if (gnorm <= ROUNDOFF_GRAD and f_trial >= f - 1e-12 * max(1.0, abs(f))
                    and math.hypot(*g_trial) < 0.5 * gnorm):
                break
            alpha *= 0.5
            if alpha < 1e-30:
                # no ascent left at working precision
                return theta, f, it, gnorm <= 1e-8, None
        theta = trial
        it += 1
        val, m1, m2, c11, c12, c22 = ev_t
        f = f_trial
        g = p - (m1, m2)
        if not reclassified and math.hypot(*theta) > DIVERGENCE_NORM:
            reclassified = True
            loc = moment_hull(rho).locate(px, py)
            if loc.region != INTERIOR:
                return theta, f, it, False, loc
    return theta, f, it, math.hypot(*g) <= gtol, None


def cramer_transform(rho: DiscreteMeasure, point, max_iter: int = NEWTON_MAX_ITER,
                     gtol: float = NEWTON_GTOL) -> CramerResult:
    """I(x, y) for the pair (Z, Z^2) under ``rho``."""
    x, y = (float(c) for c in point)
    loc = moment_hull(rho).locate(x, y)
    if loc.region == OUTSIDE:
        return CramerResult(math.inf, BOUNDARY_DIVERGENCE, 0, True, OUTSIDE)
    if loc.region == BOUNDARY:
        return _boundary_result(rho, loc.face, x)

    theta, f, it, converged, reloc = _newton_ascent(rho, x, y, max_iter, gtol)
    if reloc is not None:
        if reloc.region == OUTSIDE:
            return CramerResult(math.inf, BOUNDARY_DIVERGENCE, it, True, OUTSIDE)
        return _boundary_result(rho, reloc.face, x, it)
    # theta = 0 already certifies I >= 0
    value = float(f) if f > 0 else 0.0
    return CramerResult(value, TiltParams(float(theta[0]), float(theta[1])),
                        it, converged, INTERIOR)


def cramer_value(rho: DiscreteMeasure, x: float, y: float) -> float:
    return cramer_transform(rho, MomentPair(x, y)).value
