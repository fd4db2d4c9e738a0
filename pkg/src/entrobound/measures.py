"""Finite atom lists standing in for probability measures on the real line.

Continuous families are discretized on construction, so every integral the
rest of the package needs is an exact finite sum.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateMeasureError, DomainError, SpecParseError

MERGE_TOL = 1e-12
SYMMETRY_TOL = 1e-9
DIRAC_TOL = 1e-12

GAUSS_HALFWIDTH = 8.0
GAUSS_N = 2001

_REAL = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_INT = re.compile(r"[+-]?\d+")


@dataclass(frozen=True)
class MomentPair:
    x: float
    y: float

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Weighted atoms, sorted by position and normalized to total mass one.

    Positions closer than ``MERGE_TOL`` are merged (weights added, position
    replaced by the weighted mean) and zero weights are dropped, so positions
    are strictly increasing and every stored weight is positive.
    """

    positions: np.ndarray
    weights: np.ndarray
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        z = np.asarray(self.positions, dtype=np.float64).ravel()
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if z.shape != w.shape:
            raise DomainError("positions and weights must have equal length")
        if z.size == 0:
            raise DegenerateMeasureError("a measure needs at least one atom")
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(w))):
            raise DomainError("positions and weights must be finite")
        if np.any(w < 0):
            raise DomainError("weights must be nonnegative")
        keep = w > 0
        z, w = z[keep], w[keep]
        if z.size == 0:
            raise DegenerateMeasureError("all weights are zero")

        order = np.argsort(z, kind="stable")
        z, w = z[order], w[order]
        if z.size > 1:
            starts = np.flatnonzero(np.concatenate(([True], np.diff(z) > MERGE_TOL)))
            if starts.size < z.size:
                mass = np.add.reduceat(w, starts)
                z = np.add.reduceat(w * z, starts) / mass
                w = mass
        w = w / w.sum()

        z.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "positions", z)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_atoms(cls, atoms, label=None):
        atoms = list(atoms)
        if not atoms:
            raise DegenerateMeasureError("a measure needs at least one atom")
        z, w = zip(*atoms)
        return cls(np.array(z, dtype=float), np.array(w, dtype=float), label)

    @cached_property
    def log_weights(self) -> np.ndarray:
        lw = np.log(self.weights)
        lw.setflags(write=False)
        return lw

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.positions.tolist(), self.weights.tolist()))

    def __len__(self):
        return self.positions.size

    def spec_string(self) -> str:
        """Lossless ``atoms:`` descriptor (or the original spec if known)."""
        if self.label is not None:
            return self.label
        return "atoms:" + ",".join(
            f"{z!r}={w!r}" for z, w in zip(self.positions.tolist(), self.weights.tolist())
        )

    def __repr__(self):
        if len(self) <= 6:
            return f"DiscreteMeasure({self.atoms})"
        return f"DiscreteMeasure(<{len(self)} atoms on [{self.positions[0]:g}, {self.positions[-1]:g}]>)"


def same_atoms(a: DiscreteMeasure, b: DiscreteMeasure, tol: float = MERGE_TOL) -> bool:
    if len(a) != len(b):
        return False
    return bool(
        np.all(np.abs(a.positions - b.positions) <= MERGE_TOL)
        and np.all(np.abs(a.weights - b.weights) <= tol)
    )


def match_positions(query: np.ndarray, positions: np.ndarray, tol: float = MERGE_TOL) -> np.ndarray:
    """Index of the atom of ``positions`` within ``tol`` of each query, or -1."""
    query = np.asarray(query, dtype=float)
    idx = np.searchsorted(positions, query)
    lo = np.clip(idx - 1, 0, positions.size - 1)
    hi = np.clip(idx, 0, positions.size - 1)
    d_lo = np.abs(positions[lo] - query)
    d_hi = np.abs(positions[hi] - query)
    best = np.where(d_hi < d_lo, hi, lo)
    dist = np.minimum(d_lo, d_hi)
    return np.where(dist <= tol, best, -1)


# -- constructors for the named families -------------------------------------

def rademacher() -> DiscreteMeasure:
    return DiscreteMeasure(np.array([-1.0, 1.0]), np.array([0.5, 0.5]), "rademacher")


def uniform(a: float, b: float, n: int, label: str | None = None) -> DiscreteMeasure:
    """Midpoint rule on [a, b] with ``n`` equal cells."""
    if not a < b:
        raise DomainError("uniform family needs a < b")
    if n < 2:
        raise DomainError("uniform family needs n >= 2")
    # (2i + 1 - n) / n is exactly antisymmetric in floating point
    t = (2.0 * np.arange(n) + 1.0 - n) / n
    center, half = 0.5 * (a + b), 0.5 * (b - a)
    return DiscreteMeasure(center + half * t, np.full(n, 1.0 / n), label)


def gauss(mean: float, sd: float, halfwidth: float = GAUSS_HALFWIDTH, n: int = GAUSS_N,
          label: str | None = None) -> DiscreteMeasure:
    """Equally spaced atoms on mean +/- halfwidth*sd, weighted by the density."""
    if not sd > 0 or not halfwidth > 0:
        raise DomainError("gauss family needs sd > 0 and halfwidth > 0")
    if n < 1:
        raise DomainError("gauss family needs n >= 1")
    if n == 1:
        t = np.zeros(1)
    else:
        t = (2.0 * np.arange(n) - (n - 1)) / (n - 1)
    s = halfwidth * t
    return DiscreteMeasure(mean + sd * s, np.exp(-0.5 * s * s), label)


# -- spec grammar --------------------------------------------------------------

def _items(spec, start):
    """Split spec[start:] on commas, yielding (offset, text)."""
    pos = start
    for piece in spec[start:].split(","):
        yield pos, piece
        pos += len(piece) + 1


def _real(spec, offset, text, what="real"):
    if not _REAL.fullmatch(text):
        raise SpecParseError(f"expected {what}, got {text!r}", spec, offset, text)
    return float(text)


def _keyed(spec, offset, text, key, pattern=_REAL, what="real"):
    prefix = key + "="
    if not text.startswith(prefix):
        raise SpecParseError(f"expected '{prefix}', got {text!r}", spec, offset, text)
    value = text[len(prefix):]
    if not pattern.fullmatch(value):
        raise SpecParseError(f"expected {what} after '{prefix}', got {value!r}",
                             spec, offset + len(prefix), value)
    return value


def parse_spec(spec: str) -> DiscreteMeasure:
    """Parse a measure descriptor into a normalized ``DiscreteMeasure``.

    Grammar::

        rademacher
        atoms:z1=w1,z2=w2,...
        uniform:a=A,b=B,n=N
        gauss:mean=M,sd=S[,halfwidth=H][,n=N]
    """
    if not isinstance(spec, str):
        raise SpecParseError("spec must be a string", repr(spec), 0)
    text = spec.strip()
    lead = len(spec) - len(spec.lstrip())

    if text == "rademacher":
        return rademacher()

    head, sep, _ = text.partition(":")
    if not sep:
        raise SpecParseError(f"unknown measure {text!r}", spec, lead, text)
    body_start = len(head) + 1

    if head == "atoms":
        pairs = []
        for off, item in _items(text, body_start):
            z_txt, eq, w_txt = item.partition("=")
            if not eq:
                raise SpecParseError(f"expected 'position=weight', got {item!r}",
                                     spec, lead + off, item)
            z = _real(spec, lead + off, z_txt, "position")
            w = _real(spec, lead + off + len(z_txt) + 1, w_txt, "weight")
            if w < 0:
                raise SpecParseError(f"negative weight {w_txt!r}", spec,
                                     lead + off + len(z_txt) + 1, w_txt)
            pairs.append((z, w))
        if all(w == 0 for _, w in pairs):
            raise DegenerateMeasureError(f"all weights are zero in {spec!r}")
        return DiscreteMeasure.from_atoms(pairs, label=text)

    items = list(_items(text, body_start))
    if head == "uniform":
        if len(items) != 3:
            raise SpecParseError("uniform takes exactly a=, b=, n=", spec, lead + body_start, text[body_start:])
        a = float(_keyed(spec, lead + items[0][0], items[0][1], "a"))
        b = float(_keyed(spec, lead + items[1][0], items[1][1], "b"))
        n = int(_keyed(spec, lead + items[2][0], items[2][1], "n", _INT, "integer"))
        if not a < b:
            raise SpecParseError("uniform needs a < b", spec, lead + items[1][0], items[1][1])
        if n < 2:
            raise SpecParseError("uniform needs n >= 2", spec, lead + items[2][0], items[2][1])
        return uniform(a, b, n, label=text)

    if head == "gauss":
        if not 2 <= len(items) <= 4:
            raise SpecParseError("gauss takes mean=, sd=[, halfwidth=][, n=]",
                                 spec, lead + body_start, text[body_start:])
        mean = float(_keyed(spec, lead + items[0][0], items[0][1], "mean"))
        sd_txt = _keyed(spec, lead + items[1][0], items[1][1], "sd")
        sd = float(sd_txt)
        if not sd > 0:
            raise SpecParseError("sd must be positive", spec, lead + items[1][0], items[1][1])
        halfwidth, n = GAUSS_HALFWIDTH, GAUSS_N
        rest = items[2:]
        if rest and rest[0][1].startswith("halfwidth="):
            off, item = rest.pop(0)
            halfwidth = float(_keyed(spec, lead + off, item, "halfwidth"))
            if not halfwidth > 0:
                raise SpecParseError("halfwidth must be positive", spec, lead + off, item)
        if rest:
            off, item = rest.pop(0)
            n = int(_keyed(spec, lead + off, item, "n", _INT, "integer"))
            if n < 1:
                raise SpecParseError("n must be positive", spec, lead + off, item)
        if rest:
            off, item = rest[0]
            raise SpecParseError(f"unexpected {item!r}", spec, lead + off, item)
        return gauss(mean, sd, halfwidth, n, label=text)

    raise SpecParseError(f"unknown measure family {head!r}", spec, lead, head)


# -- moments and symmetry ------------------------------------------------------

def moments(mu: DiscreteMeasure) -> MomentPair:
    z, p = mu.positions, mu.weights
    return MomentPair(float(p @ z), float(p @ (z * z)))


def is_symmetric(rho: DiscreteMeasure, tol: float = SYMMETRY_TOL) -> bool:
    if tol < 0:
        raise DomainError("tol must be nonnegative")
    z, p = rho.positions, rho.weights
    j = match_positions(-z, z, tol)
    if np.any(j < 0):
        return False
    return bool(np.all(np.abs(p - p[j]) <= tol))


def symmetrize(rho: DiscreteMeasure) -> DiscreteMeasure:
    """Average of ``rho`` and its reflection z -> -z."""
    z, p = rho.positions, rho.weights
    return DiscreteMeasure(np.concatenate((-z[::-1], z)), np.concatenate((p[::-1], p)))


def is_dirac_at_zero(m: DiscreteMeasure, tol: float = DIRAC_TOL) -> bool:
    if tol < 0:
        raise DomainError("tol must be nonnegative")
    return bool(np.all(np.abs(m.positions) <= tol))


def reweight(rho: DiscreteMeasure, factors, label: str | None = None) -> DiscreteMeasure:
    """Measure with density proportional to ``factors`` against ``rho``."""
    factors = np.asarray(factors, dtype=float)
    return DiscreteMeasure(rho.positions, rho.weights * factors, label)
