'''Target sets A inside the unit cube.

A planar region is canonically polygon-backed: the same polygon drives
membership, cell clipping, and the exact volume, so the algebraic identity
between the reconstructed-volume error and the per-cell boundary scores
holds to floating-point accuracy rather than to a polygonization tolerance.
The round region uses a regular 4096-gon whose circumradius is chosen to
make its area exactly pi*r^2.
'''

from __future__ import annotations

import numpy as np

from ..errors import DegenerateInput
from .polygon import (clip_area_fast, clip_convex, convex_polygon_planes,
                      equal_area_circumradius, polygon_area, polygon_centroid,
                      regular_polygon)
from .surfaces import FunctionGraph, PolygonalChain, Sphere, Surface

TORUS_OFFSETS = np.array([[dx, dy] for dx in (-1, 0, 1) for dy in (-1, 0, 1)], dtype=float)


class Region:
    '''A measurable subset of the unit cube with a distinguished boundary.

    Attributes:
        d: ambient dimension.
        active_boundary: the Surface along which boundary-local scores live.
        inside_reference: a point known to lie in the region.
    '''

    d: int
    active_boundary: Surface
    inside_reference: np.ndarray

    def contains(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def volume(self) -> float:
        raise NotImplementedError

    def bbox(self) -> np.ndarray:
        '''((xmin, ymin[, zmin]), (xmax, ymax[, zmax])).'''
        raise NotImplementedError

    def clip_cell_area(self, cell: np.ndarray, offset=(0.0, 0.0)) -> float:
        '''Area of cell ∩ (A + offset) for a convex planar cell.'''
        raise NotImplementedError

    def cell_area_in(self, cell: np.ndarray, torus: bool) -> float:
        '''Area of the cell inside A, summing periodic images when torus.'''
        if not torus:
            return self.clip_cell_area(cell)
        lo = cell.min(axis=0)
        hi = cell.max(axis=0)
        blo, bhi = self.bbox()
        total = 0.0
        for off in TORUS_OFFSETS:
            if (lo[0] <= bhi[0] + off[0] and hi[0] >= blo[0] + off[0]
                    and lo[1] <= bhi[1] + off[1] and hi[1] >= blo[1] + off[1]):
                total += self.clip_cell_area(cell, offset=off)
        return total


class ConvexPolygonRegion(Region):
    '''Convex polygon A given by CCW vertices.'''

    def __init__(self, vertices: np.ndarray, active_boundary: Surface | None = None):
        self.vertices = np.asarray(vertices, dtype=float)
        if polygon_area(self.vertices) <= 0:
            raise DegenerateInput('polygon must be CCW with positive area')
        self.d = 2
        self.planes = convex_polygon_planes(self.vertices)
        self._vol = polygon_area(self.vertices)
        self.inside_reference = polygon_centroid(self.vertices)
        self.active_boundary = active_boundary or PolygonalChain(self.vertices, closed=True)
        self._lo = self.vertices.min(axis=0)
        self._hi = self.vertices.max(axis=0)

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        s = pts @ self.planes[:, :2].T - self.planes[:, 2][None, :]
        return np.all(s <= 0.0, axis=1)

    def volume(self) -> float:
        return self._vol

    def bbox(self) -> np.ndarray:
        return np.array([self._lo, self._hi])

    def clip_cell_area(self, cell: np.ndarray, offset=(0.0, 0.0)) -> float:
        cell = np.asarray(cell, dtype=float)
        if len(cell) < 3:
            return 0.0
        center = cell.mean(axis=0)
        rho = float(np.max(np.linalg.norm(cell - center, axis=1)))
        off = np.asarray(offset, dtype=float)
        c_shift = self.planes[:, 2] + self.planes[:, :2] @ off
        norms = np.linalg.norm(self.planes[:, :2], axis=1)
        s = (self.planes[:, :2] @ center - c_shift) / norms
        if np.any(s > rho):
            return 0.0          # cell entirely beyond one supporting line
        active = np.flatnonzero(s >= -rho)
        if active.size == 0:
            return abs(polygon_area(cell))   # cell deep inside the polygon
        planes = self.planes[active].copy()
        planes[:, 2] = c_shift[active]
        return clip_area_fast(cell, planes)

    def boundary_distance_bounds(self, points: np.ndarray):
        '''Per-point (lower, upper) bounds on the distance to the boundary.

        Exact inside (max signed plane distance); outside it falls back to
        segment distances, so keep the vertex count moderate here (the
        many-sided disk stand-in overrides this with annulus bounds).
        '''
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        norms = np.linalg.norm(self.planes[:, :2], axis=1)
        s = (pts @ self.planes[:, :2].T - self.planes[:, 2][None, :]) / norms
        smax = s.max(axis=1)
        inside = smax <= 0.0
        lo = np.where(inside, -smax, smax)
        hi = lo.copy()
        out = ~inside
        if np.any(out):
            p = self.vertices
            q = np.roll(self.vertices, -1, axis=0)
            e = q - p
            ee = np.einsum('ij,ij->i', e, e)
            x = pts[out]
            tpar = ((x[:, None, :] - p[None, :, :]) * e[None, :, :]).sum(-1) / ee[None, :]
            tpar = np.clip(tpar, 0.0, 1.0)
            foot = p[None, :, :] + tpar[:, :, None] * e[None, :, :]
            dist = np.linalg.norm(x[:, None, :] - foot, axis=2).min(axis=1)
            hi[out] = dist
        return lo, hi


class RegularPolygonRegion(ConvexPolygonRegion):
    '''Regular k-gon standing in for the disk of radius r.

    The circumradius is inflated so the polygon area equals pi*r^2 exactly;
    membership uses apothem/circumradius quick tests with a sector check for
    the thin remaining annulus.
    '''

    def __init__(self, center, r: float, k: int = 4096, phase: float = 0.0):
        self.center = np.asarray(center, dtype=float)
        self.r_nominal = float(r)
        self.k = int(k)
        self.phase = float(phase)
        self.circumradius = equal_area_circumradius(self.r_nominal, self.k)
        verts = regular_polygon(self.center, self.circumradius, self.k, self.phase)
        super().__init__(verts)
        self.apothem = self.circumradius * np.cos(np.pi / self.k)

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        rel = pts - self.center
        rho = np.linalg.norm(rel, axis=1)
        inside = rho <= self.apothem
        unsure = (~inside) & (rho <= self.circumradius)
        if np.any(unsure):
            theta = 2.0 * np.pi / self.k
            ang = np.arctan2(rel[unsure, 1], rel[unsure, 0]) - self.phase
            idx = np.floor(ang / theta).astype(int) % self.k
            pl = self.planes[idx]
            s = np.einsum('ij,ij->i', pl[:, :2], rel[unsure] + self.center) - pl[:, 2]
            inside[unsure] = s <= 0.0
        return inside

    def boundary_distance_bounds(self, points: np.ndarray):
        '''Annulus bounds: the boundary lies between apothem and circumradius.'''
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        rho = np.linalg.norm(pts - self.center, axis=1)
        lo = np.maximum.reduce([np.zeros_like(rho), self.apothem - rho,
                                rho - self.circumradius])
        return lo, lo + (self.circumradius - self.apothem)

    def clip_cell_area(self, cell: np.ndarray, offset=(0.0, 0.0)) -> float:
        '''Clip against only the edges under the cell's angular window.

        Membership at polar angle phi is decided by the single edge whose
        arc covers phi, so once the whole cell fits in an angular cone of
        width below pi, the edges covering that cone (plus one on each
        side) clip exactly; the other few thousand are implied.
        '''
        cell = np.asarray(cell, dtype=float)
        if len(cell) < 3:
            return 0.0
        rel = cell - (self.center + np.asarray(offset, dtype=float))
        r2 = np.einsum('ij,ij->i', rel, rel)
        if float(r2.max()) <= self.apothem * self.apothem:
            return abs(polygon_area(cell))
        lo = rel.min(axis=0)
        hi = rel.max(axis=0)
        dx = max(lo[0], -hi[0], 0.0)
        dy = max(lo[1], -hi[1], 0.0)
        if dx * dx + dy * dy > self.circumradius * self.circumradius:
            return 0.0
        if float(r2.min()) < (0.25 * self.apothem) ** 2:
            return super().clip_cell_area(cell, offset)
        ang = np.arctan2(rel[:, 1], rel[:, 0])
        a0 = float(ang[0])
        delta = np.mod(ang - a0 + np.pi, 2.0 * np.pi) - np.pi
        dmin, dmax = float(delta.min()), float(delta.max())
        if dmax - dmin >= 0.9 * np.pi:
            return super().clip_cell_area(cell, offset)
        theta = 2.0 * np.pi / self.k
        jlo = int(np.floor((a0 + dmin - self.phase) / theta)) - 1
        jhi = int(np.floor((a0 + dmax - self.phase) / theta)) + 1
        if jhi - jlo + 1 >= self.k:
            planes = self.planes
        else:
            planes = self.planes[np.arange(jlo, jhi + 1) % self.k]
        off = np.asarray(offset, dtype=float)
        if off[0] != 0.0 or off[1] != 0.0:
            planes = planes.copy()
            planes[:, 2] = planes[:, 2] + planes[:, :2] @ off
        return clip_area_fast(cell, planes)


class GraphSubRegion(Region):
    '''A = {0 <= y <= G(x)} under a polygonized function graph on [0, 1].

    Possibly non-convex; clipping decomposes A into vertical trapezoid
    strips between consecutive graph nodes.
    '''

    def __init__(self, xs: np.ndarray, ys: np.ndarray, active_boundary: Surface | None = None):
        self.xs = np.asarray(xs, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        if len(self.xs) < 2 or np.any(np.diff(self.xs) <= 0):
            raise DegenerateInput('graph nodes must be strictly increasing in x')
        if np.any(self.ys <= 0) or np.any(self.ys >= 1):
            raise DegenerateInput('graph must stay strictly inside the unit square')
        self.d = 2
        graph_pts = np.column_stack([self.xs, self.ys])
        self.polygon = np.concatenate([[[self.xs[0], 0.0], [self.xs[-1], 0.0]],
                                       graph_pts[::-1]])
        self.active_boundary = active_boundary or PolygonalChain(
            np.column_stack([self.xs, self.ys]), closed=False)
        self.inside_reference = np.array([self.xs[len(self.xs) // 2], 1e-3])
        self._vol = float(np.sum(0.5 * (self.ys[1:] + self.ys[:-1]) * np.diff(self.xs)))

    @classmethod
    def from_function(cls, F, dF, chord_tol: float = 1e-5):
        '''Polygonize y = F(x) on [0,1] with chord error below chord_tol.'''
        n = 33
        while True:
            xs = np.linspace(0.0, 1.0, n)
            ys = np.asarray(F(xs), dtype=float)
            mid = 0.5 * (xs[1:] + xs[:-1])
            err = np.abs(np.asarray(F(mid), dtype=float) - 0.5 * (ys[1:] + ys[:-1]))
            if float(np.max(err)) <= chord_tol or n > 1 << 20:
                break
            n = 2 * n - 1
        surf = FunctionGraph(F, dF, domain=((0.0, 1.0),))
        return cls(xs, ys, active_boundary=surf)

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        x, y = pts[:, 0], pts[:, 1]
        g = np.interp(x, self.xs, self.ys)
        return (y >= 0.0) & (y <= g) & (x >= self.xs[0]) & (x <= self.xs[-1])

    def volume(self) -> float:
        return self._vol

    def bbox(self) -> np.ndarray:
        return np.array([[self.xs[0], 0.0], [self.xs[-1], float(np.max(self.ys))]])

    def clip_cell_area(self, cell: np.ndarray, offset=(0.0, 0.0)) -> float:
        cell = np.asarray(cell, dtype=float)
        if len(cell) < 3:
            return 0.0
        off = np.asarray(offset, dtype=float)
        local = cell - off
        x0, y0 = local.min(axis=0)
        x1, y1 = local.max(axis=0)
        if x1 < self.xs[0] or x0 > self.xs[-1] or y1 < 0.0:
            return 0.0
        j0 = max(int(np.searchsorted(self.xs, x0, side='right')) - 1, 0)
        j1 = min(int(np.searchsorted(self.xs, x1, side='left')), len(self.xs) - 1)
        lo_strip = float(np.min(self.ys[j0:j1 + 1]))
        if (y1 <= lo_strip and y0 >= 0.0
                and x0 >= self.xs[0] and x1 <= self.xs[-1]):
            return abs(polygon_area(local))   # fully below the graph, above 0
        total = 0.0
        for j in range(j0, j1):
            xa, xb = self.xs[j], self.xs[j + 1]
            ya, yb = self.ys[j], self.ys[j + 1]
            # chord line y <= m x + q
            m = (yb - ya) / (xb - xa)
            q = ya - m * xa
            planes = np.array([
                [-1.0, 0.0, -xa],
                [1.0, 0.0, xb],
                [0.0, -1.0, 0.0],
                [m, -1.0, -q],
            ])
            planes[3] *= -1.0   # rewrite y <= m x + q as -m x + y <= q
            v, _ = clip_convex(local, planes)
            total += abs(polygon_area(v))
        return total


class BallRegion(Region):
    '''Solid ball in d=3; measure-theoretic queries only (no exact cells).'''

    def __init__(self, center, r: float):
        self.center = np.asarray(center, dtype=float)
        self.r = float(r)
        self.d = 3
        self.active_boundary = Sphere(self.center, self.r)
        self.inside_reference = self.center.copy()

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.linalg.norm(pts - self.center, axis=1) <= self.r

    def volume(self) -> float:
        return 4.0 / 3.0 * np.pi * self.r ** 3

    def bbox(self) -> np.ndarray:
        return np.array([self.center - self.r, self.center + self.r])


class SimplexRegion3(Region):
    '''A = {x + y + z <= c} in the unit cube (d=3).'''

    def __init__(self, c: float = 1.0):
        self.c = float(c)
        self.d = 3
        cap = self.c

        def F(v1, v2):
            return cap - v1 - v2

        def dF(v1, v2):
            return (-1.0, -1.0)

        self.active_boundary = FunctionGraph(F, dF, domain=((0.0, cap), (0.0, cap)),
                                             domain_kind='simplex')
        self.inside_reference = np.full(3, cap / 6.0)

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return pts.sum(axis=1) <= self.c

    def volume(self) -> float:
        return self.c ** 3 / 6.0

    def bbox(self) -> np.ndarray:
        return np.array([[0.0, 0.0, 0.0], [self.c, self.c, self.c]])


class HalfPlaneRegion(Region):
    '''A = {a.x <= c} seen through a finite window box (d=2).

    The window only bounds clipping; membership is the pure linear test.
    Used for the tangent-hyperplane analogues of the boundary scores.
    '''

    def __init__(self, normal, c: float, window: tuple[float, float]):
        n = np.asarray(normal, dtype=float)
        self.normal = n / np.linalg.norm(n)
        self.c = float(c) / float(np.linalg.norm(n))
        self.window = (float(window[0]), float(window[1]))
        self.d = 2
        lo, hi = self.window
        base = np.array([[lo, lo], [hi, lo], [hi, hi], [lo, hi]], dtype=float)
        v, _ = clip_convex(base, np.array([[self.normal[0], self.normal[1], self.c]]))
        if len(v) < 3:
            raise DegenerateInput('window lies entirely outside the half-plane')
        self._poly = v
        self.planes = convex_polygon_planes(v)
        self.inside_reference = polygon_centroid(v)
        # boundary: the full line within the window, as a graph in the frame
        # where the normal is the second axis
        t_dir = np.array([-self.normal[1], self.normal[0]])
        p0 = self.c * self.normal
        span = hi - lo
        self.active_boundary = PolygonalChain(
            np.array([p0 - 2 * span * t_dir, p0 + 2 * span * t_dir]), closed=False)

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return pts @ self.normal <= self.c

    def volume(self) -> float:
        return abs(polygon_area(self._poly))

    def bbox(self) -> np.ndarray:
        return np.array([self._poly.min(axis=0), self._poly.max(axis=0)])

    def clip_cell_area(self, cell: np.ndarray, offset=(0.0, 0.0)) -> float:
        cell = np.asarray(cell, dtype=float)
        if len(cell) < 3:
            return 0.0
        off = np.asarray(offset, dtype=float)
        planes = self.planes.copy()
        planes[:, 2] += planes[:, :2] @ off
        v, _ = clip_convex(cell, planes)
        return abs(polygon_area(v))
