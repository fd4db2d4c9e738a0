"""Relative entropy between atom lists and the lower bounds compared against it."""
from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np
from scipy.special import kl_div

from .errors import DomainError
from .measures import DIRAC_TOL, MERGE_TOL, DiscreteMeasure, is_dirac_at_zero, match_positions, moments


@dataclass(frozen=True)
class EntropyResult:
    value: float
    absolutely_continuous: bool

    def __float__(self):
        return self.value


def relative_entropy(mu: DiscreteMeasure, rho: DiscreteMeasure) -> EntropyResult:
    """H(mu | rho), or +inf when mu charges a point that rho does not.

    Summed as rho * (r ln r - r + 1) with r = dmu/drho. Every term is
    nonnegative, which keeps H accurate when mu is close to rho.
    """
    j = match_positions(mu.positions, rho.positions, MERGE_TOL)
    if np.any(j < 0):
        return EntropyResult(math.inf, False)
    q = rho.weights[j]
    p = mu.weights
    # unmatched rho atoms contribute their mass through the "+ rho" term
    missing = max(0.0, 1.0 - math.fsum(q))
    value = math.fsum(kl_div(p, q)) + missing
    return EntropyResult(max(value, 0.0), True)


def jensen_bound_from_moments(m1: float, m2: float) -> float:
    """m1**2 / (2 m2); zero when the second moment is infinite."""
    if math.isinf(m2):
        return 0.0
    if m2 <= 0:
        raise DomainError("second moment must be positive")
    return m1 * m1 / (2.0 * m2)


def jensen_bound(mu: DiscreteMeasure) -> float:
    """(int z dmu)^2 / (2 int z^2 dmu), always in [0, 1/2]."""
    if is_dirac_at_zero(mu, DIRAC_TOL):
        raise DomainError("bound is 0/0 for the Dirac mass at 0")
    m = moments(mu)
    return jensen_bound_from_moments(m.x, m.y)


def _tabulate(phi, positions):
    if callable(phi):
        values = np.asarray(phi(positions), dtype=float)
        if values.shape != positions.shape:
            values = np.array([float(phi(z)) for z in positions])
    elif isinstance(phi, Mapping):
        keys = np.array(sorted(phi), dtype=float)
        j = match_positions(positions, keys, MERGE_TOL)
        if np.any(j < 0):
            bad = positions[np.argmax(j < 0)]
            raise DomainError(f"phi is not tabulated at {bad!r}")
        values = np.array([phi[k] for k in keys.tolist()], dtype=float)[j]
    else:
        raise DomainError("phi must be callable or a mapping position -> value")
    if not np.all(np.isfinite(values)):
        bad = positions[np.argmax(~np.isfinite(values))]
        raise DomainError(f"phi is not finite at {bad!r}")
    return values


def dv_lower_bound(mu: DiscreteMeasure, rho: DiscreteMeasure, phi) -> float:
    """int phi dmu - ln int exp(phi) drho, a lower bound for H(mu | rho).

    ``phi`` is a vectorized callable or a mapping from atom position to value.
    """
    phi_mu = _tabulate(phi, mu.positions)
    a = _tabulate(phi, rho.positions) + rho.log_weights
    amax = a.max()
    log_mass = amax + math.log(np.exp(a - amax).sum())
    return float(mu.weights @ phi_mu) - log_mass


def blm_bound(mu: DiscreteMeasure, rho: DiscreteMeasure, v_sg: float) -> float:
    """Sub-Gaussian comparison bound (m1(mu) - mean(rho))^2 / (2 v_sg).

    The caller vouches that ``rho`` is sub-Gaussian with proxy ``v_sg``;
    nothing here checks it.
    """
    if not v_sg > 0:
        raise DomainError("sub-Gaussian proxy must be positive")
    d = moments(mu).x - moments(rho).x
    return d * d / (2.0 * v_sg)
