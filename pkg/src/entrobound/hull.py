"""Convex hull of the lifted atoms (z, z^2) and point classification against it.

The hull is the set of moment pairs (E Z, E Z^2) reachable by measures
supported on the atoms; its boundary faces carry the sub-measures used for
Cramer-transform values on the boundary.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass

import numpy as np

INTERIOR = "interior"
BOUNDARY = "boundary"
OUTSIDE = "outside"

REGION_TOL = 1e-10


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list[int]:
    """Indices of hull vertices in counter-clockwise order (monotone chain).

    Collinear points are dropped, so a hull of two vertices is a segment.
    """
    pts = [tuple(p) for p in np.asarray(points, dtype=float)]
    order = sorted(range(len(pts)), key=lambda i: pts[i])
    # drop exact duplicates
    uniq = []
    for i in order:
        if not uniq or pts[i] != pts[uniq[-1]]:
            uniq.append(i)
    if len(uniq) <= 2:
        return uniq

    lower = []
    for i in uniq:
        while len(lower) >= 2 and _cross(pts[lower[-2]], pts[lower[-1]], pts[i]) <= 0:
            lower.pop()
        lower.append(i)
    upper = []
    for i in reversed(uniq):
        while len(upper) >= 2 and _cross(pts[upper[-2]], pts[upper[-1]], pts[i]) <= 0:
            upper.pop()
        upper.append(i)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        return hull[:1]
    return hull


@dataclass(frozen=True)
class Location:
    region: str
    # atom indices spanning the supporting face; None off the closed hull
    # and for interior points
    face: tuple[int, ...] | None = None


class MomentHull:
    def __init__(self, positions):
        z = np.asarray(positions, dtype=float)
        self.points = np.column_stack((z, z * z))
        self.vertices = convex_hull(self.points)
        self.dim = min(len(self.vertices) - 1, 2)

    def _atoms_on_segment(self, a, b, tol):
        d = b - a
        length = np.hypot(*d)
        rel = self.points - a
        along = rel @ d / length
        across = np.abs(rel[:, 0] * d[1] - rel[:, 1] * d[0]) / length
        on = (across <= tol) & (along >= -tol) & (along <= length + tol)
        return tuple(np.flatnonzero(on).tolist())

    def _near_vertex(self, p, tol):
        verts = self.points[self.vertices]
        dist = np.hypot(verts[:, 0] - p[0], verts[:, 1] - p[1])
        k = int(np.argmin(dist))
        return self.vertices[k] if dist[k] <= tol else None

    def x_range(self, y) -> tuple[float, float] | None:
        """Extent of the hull's horizontal slice at height ``y``, or None if empty."""
        pts = self.points[self.vertices]
        if self.dim == 0:
            return (pts[0, 0], pts[0, 0]) if pts[0, 1] == y else None
        ring = pts if self.dim == 2 else pts[:2]
        xs = []
        for a, b in zip(ring, np.roll(ring, -1, axis=0)):
            lo, hi = sorted((a[1], b[1]))
            if not lo <= y <= hi:
                continue
            if a[1] == b[1]:
                xs += [a[0], b[0]]
            else:
                xs.append(a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]))
        return (min(xs), max(xs)) if xs else None

    def locate(self, x, y, tol=REGION_TOL) -> Location:
        p = np.array([x, y], dtype=float)
        if self.dim == 0:
            v = self.vertices[0]
            if np.hypot(*(self.points[v] - p)) <= tol:
                return Location(BOUNDARY, (v,))
            return Location(OUTSIDE)

        if self.dim == 1:
            a, b = self.points[self.vertices[0]], self.points[self.vertices[1]]
            d = b - a
            t = np.clip((p - a) @ d / (d @ d), 0.0, 1.0)
            if np.hypot(*(a + t * d - p)) > tol:
                return Location(OUTSIDE)
            v = self._near_vertex(p, tol)
            if v is not None:
                return Location(BOUNDARY, (v,))
            return Location(BOUNDARY, self._atoms_on_segment(a, b, tol))

        verts = self.points[self.vertices]
        edges = np.roll(verts, -1, axis=0) - verts
        # outward normals of a counter-clockwise polygon
        normals = np.column_stack((edges[:, 1], -edges[:, 0]))
        normals /= np.hypot(normals[:, 0], normals[:, 1])[:, None]
        signed = np.einsum("ij,ij->i", normals, p - verts)
        worst = int(np.argmax(signed))
        if signed[worst] > tol:
            return Location(OUTSIDE)
        if signed[worst] < -tol:
            return Location(INTERIOR)
        v = self._near_vertex(p, tol)
        if v is not None:
            return Location(BOUNDARY, (v,))
        a = verts[worst]
        b = verts[(worst + 1) % len(verts)]
        return Location(BOUNDARY, self._atoms_on_segment(a, b, tol))


_HULLS: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def moment_hull(rho) -> MomentHull:
    """Hull of ``rho``'s lifted atoms, cached per measure object."""
    hull = _HULLS.get(rho)
    if hull is None:
        hull = _HULLS[rho] = MomentHull(rho.positions)
    return hull
