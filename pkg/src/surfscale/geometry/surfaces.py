'''Surfaces in dimension 2 and 3 and the closest-point chart (y, t).

Every surface supports projection of an ambient point x onto a closest
surface point y with unit normal u_y and signed offset t, so that
x = y + t * u_y. The pair (y, t) is the chart every boundary-local score
and every limit integral is written in.
'''

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import NoConvergence, NonUniqueProjection, NotOnSurface, UnsupportedSurface

EPS_SURF = 1e-9
MAX_ITER = 64
SEED_GRID = 4096


@dataclass(frozen=True)
class SurfaceParamPoint:
    '''Chart coordinates of an ambient point relative to a surface.

    Attributes:
        y: closest surface point.
        t: signed offset along the normal (positive on the u_y side).
        u_y: unit normal at y.
        degenerate: True when the projection was not unique to tolerance or
            the minimizer sits on the boundary of the parameter domain. Scores
            treat degenerate chart points as contributing zero.
    '''
    y: np.ndarray
    t: float
    u_y: np.ndarray
    degenerate: bool = False


@dataclass(frozen=True)
class Hyperplane:
    point: np.ndarray
    normal: np.ndarray

    def signed_distance(self, x) -> float:
        return float((np.asarray(x, dtype=float) - self.point) @ self.normal)


class Surface:
    '''Base class; subclasses provide dimension, projection and measure.'''

    d: int
    measure_hint: float | None = None

    def closest_point(self, x, strict: bool = False) -> SurfaceParamPoint:
        raise NotImplementedError

    def normal_at(self, y) -> np.ndarray:
        raise NotImplementedError

    def measure(self, resolution: int = 10_000) -> float:
        raise UnsupportedSurface(f'{type(self).__name__} has no quadrature measure')

    def sample(self, k: int) -> np.ndarray:
        '''k points spread over the surface, for spot checks and seeding.'''
        raise NotImplementedError


def _unit(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError('zero vector has no direction')
    return v / n


def closest_point_param(x, M: Surface, strict: bool = False) -> SurfaceParamPoint:
    '''Project x onto M; returns the (y, t, u_y) chart point.

    With strict=True a tie between distant candidates raises
    NonUniqueProjection instead of returning the flagged lexicographic
    representative.
    '''
    return M.closest_point(np.asarray(x, dtype=float), strict=strict)


def tangent_hyperplane(y, M: Surface) -> Hyperplane:
    '''Tangent hyperplane of M at a point y lying on M (to EPS_SURF).'''
    y = np.asarray(y, dtype=float)
    chart = M.closest_point(y)
    if abs(chart.t) > EPS_SURF or float(np.linalg.norm(chart.y - y)) > 10 * EPS_SURF:
        raise NotOnSurface(f'point {y} is {chart.t:.3e} away from the surface')
    return Hyperplane(point=y, normal=M.normal_at(chart.y))


def surface_measure(M: Surface, resolution: int = 10_000) -> float:
    return M.measure(resolution)


class FunctionGraph(Surface):
    '''Graph of F over an interval (d=2) or a planar domain (d=3).

    Args:
        F: height function; for d=2 maps float -> float (vectorized over
            arrays), for d=3 maps (v1, v2) -> float.
        dF: derivative oracle; d=2 returns F', d=3 returns (F_1, F_2).
        domain: ((lo, hi),) for d=2, ((lo1, hi1), (lo2, hi2)) for d=3.
        domain_kind: 'interval', 'rect', or 'simplex' (v1 + v2 <= hi, d=3).
    '''

    closed = False      # graphs terminate at the domain edge

    def __init__(self, F: Callable, dF: Callable, domain=((0.0, 1.0),),
                 domain_kind: str = 'interval', seed_grid: int = SEED_GRID):
        self.F = F
        self.dF = dF
        self.domain = tuple((float(a), float(b)) for a, b in domain)
        self.domain_kind = domain_kind
        self.d = len(self.domain) + 1
        self._seed_n = seed_grid
        self._seed_cache: tuple[np.ndarray, np.ndarray] | None = None

    # -- seeding -----------------------------------------------------------

    def _seed_points(self):
        if self._seed_cache is None:
            if self.d == 2:
                (lo, hi), = self.domain
                v = np.linspace(lo, hi, self._seed_n)
                pts = np.column_stack([v, np.asarray(self.F(v), dtype=float)])
                self._seed_cache = (v, pts)
            else:
                m = max(2, int(round(np.sqrt(self._seed_n))))
                (lo1, hi1), (lo2, hi2) = self.domain
                g1 = np.linspace(lo1, hi1, m)
                g2 = np.linspace(lo2, hi2, m)
                vv1, vv2 = np.meshgrid(g1, g2, indexing='ij')
                v = np.column_stack([vv1.ravel(), vv2.ravel()])
                if self.domain_kind == 'simplex':
                    v = v[v[:, 0] + v[:, 1] <= hi1 + 1e-12]
                z = np.array([self.F(a, b) for a, b in v], dtype=float)
                pts = np.column_stack([v, z])
                self._seed_cache = (v, pts)
        return self._seed_cache

    def _clamp(self, v):
        if self.d == 2:
            (lo, hi), = self.domain
            return min(max(v, lo), hi)
        out = np.array([min(max(v[i], self.domain[i][0]), self.domain[i][1]) for i in (0, 1)])
        if self.domain_kind == 'simplex':
            s = out[0] + out[1]
            cap = self.domain[0][1]
            if s > cap:
                out *= cap / s
        return out

    # -- chart -------------------------------------------------------------

    def normal_at(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.d == 2:
            fp = float(self.dF(y[0]))
            return _unit(np.array([-fp, 1.0]))
        g = np.asarray(self.dF(y[0], y[1]), dtype=float)
        return _unit(np.array([-g[0], -g[1], 1.0]))

    def closest_point(self, x, strict: bool = False) -> SurfaceParamPoint:
        x = np.asarray(x, dtype=float)
        if self.d == 2:
            return self._closest_2d(x, strict)
        return self._closest_3d(x, strict)

    def _closest_2d(self, x, strict):
        vs, pts = self._seed_points()
        d2 = np.sum((pts - x) ** 2, axis=1)
        k = int(np.argmin(d2))
        degenerate = _distant_tie(pts, d2, k, strict)
        (lo, hi), = self.domain
        v = float(vs[k])
        span = hi - lo
        h = 1e-7 * max(span, 1.0)

        def g(vv):
            return (vv - x[0]) + (float(self.F(vv)) - x[1]) * float(self.dF(vv))

        gv = g(v)
        converged = False
        for _ in range(MAX_ITER):
            gp = (g(v + h) - g(v - h)) / (2 * h)
            if gp == 0.0:
                break
            step = -gv / gp
            step = min(max(step, -0.25 * span), 0.25 * span)
            vn = v + step
            vn = min(max(vn, lo), hi)
            gn = g(vn)
            tries = 0
            while abs(gn) > abs(gv) and tries < 20 and abs(vn - v) > 1e-16 * span:
                vn = v + 0.5 * (vn - v)
                gn = g(vn)
                tries += 1
            moved = abs(vn - v)
            v, gv = vn, gn
            if moved < 1e-14 * max(span, 1.0):
                converged = True
                break
        y = np.array([v, float(self.F(v))])
        u = self.normal_at(y)
        t = float((x - y) @ u)
        resid = float(np.linalg.norm(x - y - t * u))
        at_edge = v <= lo + 1e-12 * span or v >= hi - 1e-12 * span
        if resid > EPS_SURF:
            if at_edge:
                degenerate = True
            elif not converged:
                raise NoConvergence(f'projection stalled at v={v} with residual {resid:.2e}')
            else:
                degenerate = True
        return SurfaceParamPoint(y=y, t=t, u_y=u, degenerate=degenerate)

    def _closest_3d(self, x, strict):
        vs, pts = self._seed_points()
        d2 = np.sum((pts - x) ** 2, axis=1)
        k = int(np.argmin(d2))
        degenerate = _distant_tie(pts, d2, k, strict)
        v = np.array(vs[k], dtype=float)
        spans = np.array([hi - lo for lo, hi in self.domain])
        h = 1e-6

        def g(vv):
            f = float(self.F(vv[0], vv[1]))
            grad = np.asarray(self.dF(vv[0], vv[1]), dtype=float)
            return (vv - x[:2]) + (f - x[2]) * grad

        gv = g(v)
        converged = False
        for _ in range(MAX_ITER):
            J = np.empty((2, 2))
            for j in (0, 1):
                e = np.zeros(2)
                e[j] = h
                J[:, j] = (g(v + e) - g(v - e)) / (2 * h)
            try:
                step = np.linalg.solve(J, -gv)
            except np.linalg.LinAlgError:
                break
            lim = 0.25 * float(np.max(spans))
            norm = float(np.linalg.norm(step))
            if norm > lim:
                step *= lim / norm
            vn = self._clamp(v + step)
            gn = g(vn)
            tries = 0
            while np.linalg.norm(gn) > np.linalg.norm(gv) and tries < 20:
                vn = self._clamp(v + 0.5 * (vn - v))
                gn = g(vn)
                tries += 1
            moved = float(np.linalg.norm(vn - v))
            v, gv = vn, gn
            if moved < 1e-13:
                converged = True
                break
        y = np.array([v[0], v[1], float(self.F(v[0], v[1]))])
        u = self.normal_at(y)
        t = float((x - y) @ u)
        resid = float(np.linalg.norm(x - y - t * u))
        if resid > EPS_SURF:
            on_edge = self._on_domain_edge(v)
            if on_edge:
                degenerate = True
            elif not converged:
                raise NoConvergence(f'projection stalled at v={v} with residual {resid:.2e}')
            else:
                degenerate = True
        return SurfaceParamPoint(y=y, t=t, u_y=u, degenerate=degenerate)

    def _on_domain_edge(self, v) -> bool:
        for i in (0, 1):
            lo, hi = self.domain[i]
            if v[i] <= lo + 1e-10 or v[i] >= hi - 1e-10:
                return True
        if self.domain_kind == 'simplex':
            if v[0] + v[1] >= self.domain[0][1] - 1e-10:
                return True
        return False

    # -- measure -----------------------------------------------------------

    def measure(self, resolution: int = 10_000) -> float:
        if self.d == 2:
            (lo, hi), = self.domain
            v = np.linspace(lo, hi, resolution + 1)
            fp = np.asarray(self.dF(v), dtype=float)
            return float(np.trapezoid(np.sqrt(1.0 + fp * fp), v))
        m = max(2, int(round(np.sqrt(resolution))))
        (lo1, hi1), (lo2, hi2) = self.domain
        if self.domain_kind == 'simplex':
            # map the unit square onto the simplex, Jacobian (hi1 - a)
            a = np.linspace(lo1, hi1, m)
            b = np.linspace(0.0, 1.0, m)
            total = np.zeros((m, m))
            for i, ai in enumerate(a):
                for j, bj in enumerate(b):
                    v2 = (hi1 - ai) * bj
                    g = np.asarray(self.dF(ai, v2), dtype=float)
                    total[i, j] = np.sqrt(1.0 + g @ g) * (hi1 - ai)
            return float(np.trapezoid(np.trapezoid(total, b, axis=1), a))
        g1 = np.linspace(lo1, hi1, m)
        g2 = np.linspace(lo2, hi2, m)
        total = np.empty((m, m))
        for i, ai in enumerate(g1):
            for j, bj in enumerate(g2):
                g = np.asarray(self.dF(ai, bj), dtype=float)
                total[i, j] = np.sqrt(1.0 + g @ g)
        return float(np.trapezoid(np.trapezoid(total, g2, axis=1), g1))

    def sample(self, k: int) -> np.ndarray:
        if self.d == 2:
            (lo, hi), = self.domain
            v = np.linspace(lo, hi, k)
            return np.column_stack([v, np.asarray(self.F(v), dtype=float)])
        m = max(2, int(round(np.sqrt(k))))
        (lo1, hi1), (lo2, hi2) = self.domain
        g1 = np.linspace(lo1, hi1, m)
        g2 = np.linspace(lo2, hi2, m)
        vv1, vv2 = np.meshgrid(g1, g2, indexing='ij')
        v = np.column_stack([vv1.ravel(), vv2.ravel()])
        if self.domain_kind == 'simplex':
            v = v[v[:, 0] + v[:, 1] <= hi1 + 1e-12]
        z = np.array([self.F(a, b) for a, b in v], dtype=float)
        return np.column_stack([v, z])


def _distant_tie(pts: np.ndarray, d2: np.ndarray, k: int, strict: bool) -> bool:
    '''True when another sample at non-neighboring position ties the minimum.'''
    dmin = np.sqrt(d2[k])
    close = np.flatnonzero(np.sqrt(d2) <= dmin + EPS_SURF)
    far_ties = close[np.abs(close - k) > 2]
    if far_ties.size == 0:
        return False
    # ties among samples of the same local basin are not real ties
    if np.max(np.linalg.norm(pts[far_ties] - pts[k], axis=1)) <= 1e-6:
        return False
    if strict:
        raise NonUniqueProjection('two surface candidates at equal distance')
    return True


class Sphere(Surface):
    '''Circle (d=2) or sphere (d=3) of given center and radius.'''

    closed = True

    def __init__(self, center, radius: float):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.d = len(self.center)
        if self.d not in (2, 3):
            raise ValueError('Sphere supports d in {2, 3}')
        if self.radius <= 0:
            raise ValueError('radius must be positive')

    def closest_point(self, x, strict: bool = False) -> SurfaceParamPoint:
        x = np.asarray(x, dtype=float)
        r = x - self.center
        dist = float(np.linalg.norm(r))
        if dist < EPS_SURF:
            if strict:
                raise NonUniqueProjection('center of a sphere projects everywhere')
            u = np.zeros(self.d)
            u[0] = -1.0  # lexicographically smallest contact point
            y = self.center + self.radius * u
            return SurfaceParamPoint(y=y, t=float((x - y) @ u), u_y=u, degenerate=True)
        u = r / dist
        y = self.center + self.radius * u
        return SurfaceParamPoint(y=y, t=dist - self.radius, u_y=u, degenerate=False)

    def normal_at(self, y) -> np.ndarray:
        return _unit(np.asarray(y, dtype=float) - self.center)

    def measure(self, resolution: int = 10_000) -> float:
        if self.d == 2:
            return 2.0 * np.pi * self.radius
        return 4.0 * np.pi * self.radius ** 2

    def sample(self, k: int) -> np.ndarray:
        if self.d == 2:
            ang = np.linspace(0.0, 2.0 * np.pi, k, endpoint=False)
            return self.center + self.radius * np.column_stack([np.cos(ang), np.sin(ang)])
        m = max(2, int(round(np.sqrt(k))))
        th = np.linspace(0.0, np.pi, m)
        ph = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
        tt, pp = np.meshgrid(th, ph, indexing='ij')
        dirs = np.column_stack([np.sin(tt.ravel()) * np.cos(pp.ravel()),
                                np.sin(tt.ravel()) * np.sin(pp.ravel()),
                                np.cos(tt.ravel())])
        return self.center + self.radius * dirs


class PolygonalChain(Surface):
    '''Piecewise-linear surface in the plane.

    For a closed CCW chain the normal points outward; for open chains the
    normal of segment (p -> q) is (dy, -dx)/|pq|.
    '''

    def __init__(self, vertices, closed: bool = False):
        self.vertices = np.asarray(vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2 or len(self.vertices) < 2:
            raise ValueError('need at least two 2-d vertices')
        self.closed = bool(closed)
        self.d = 2
        p = self.vertices
        q = np.roll(p, -1, axis=0) if self.closed else p[1:]
        pp = p if self.closed else p[:-1]
        e = q - pp
        lens = np.linalg.norm(e, axis=1)
        if np.any(lens == 0):
            raise ValueError('degenerate zero-length segment')
        self._p = pp
        self._q = q
        self._e = e
        self._len = lens
        self._n = np.column_stack([e[:, 1], -e[:, 0]]) / lens[:, None]

    def closest_point(self, x, strict: bool = False) -> SurfaceParamPoint:
        x = np.asarray(x, dtype=float)
        w = x - self._p
        tproj = np.clip(np.einsum('ij,ij->i', w, self._e) / (self._len ** 2), 0.0, 1.0)
        feet = self._p + tproj[:, None] * self._e
        d2 = np.sum((feet - x) ** 2, axis=1)
        k = int(np.argmin(d2))
        dmin = float(np.sqrt(d2[k]))
        degenerate = False
        close = np.flatnonzero(np.sqrt(d2) <= dmin + EPS_SURF)
        if close.size > 1:
            cand = feet[close]
            spread = float(np.max(np.linalg.norm(cand - feet[k], axis=1)))
            if spread > EPS_SURF:
                if strict:
                    raise NonUniqueProjection('two chain candidates at equal distance')
                order = np.lexsort((cand[:, 1], cand[:, 0]))
                k = int(close[order[0]])
                degenerate = True
        y = feet[k]
        tk = float(tproj[k])
        if 0.0 < tk < 1.0:
            u = self._n[k]
            t = float((x - y) @ u)
        else:
            u, t = self._vertex_normal(x, y, k, tk)
        return SurfaceParamPoint(y=y.copy(), t=t, u_y=u, degenerate=degenerate)

    def _vertex_normal(self, x, y, k, tk):
        m = len(self._p)
        if tk <= 0.0:
            segs = [k, (k - 1) % m] if self.closed or k > 0 else [k]
        else:
            segs = [k, (k + 1) % m] if self.closed or k < m - 1 else [k]
        nb = self._n[segs].sum(axis=0)
        nb = nb / max(np.linalg.norm(nb), 1e-300)
        r = x - y
        dist = float(np.linalg.norm(r))
        if dist < EPS_SURF:
            return nb, 0.0
        sign = 1.0 if float(r @ nb) >= 0.0 else -1.0
        return sign * r / dist, sign * dist

    def normal_at(self, y) -> np.ndarray:
        chart = self.closest_point(np.asarray(y, dtype=float))
        if abs(chart.t) > 10 * EPS_SURF:
            raise NotOnSurface('point is not on the chain')
        return chart.u_y

    def measure(self, resolution: int = 10_000) -> float:
        return float(np.sum(self._len))

    def sample(self, k: int) -> np.ndarray:
        cum = np.concatenate([[0.0], np.cumsum(self._len)])
        s = np.linspace(0.0, cum[-1], k, endpoint=not self.closed)
        seg = np.clip(np.searchsorted(cum, s, side='right') - 1, 0, len(self._len) - 1)
        frac = (s - cum[seg]) / self._len[seg]
        return self._p[seg] + frac[:, None] * self._e[seg]


class ImplicitSmooth(Surface):
    '''Zero level set of g with a gradient oracle; projection only.'''

    def __init__(self, g: Callable, grad: Callable, d: int):
        if d not in (2, 3):
            raise ValueError('d must be 2 or 3')
        self.g = g
        self.grad = grad
        self.d = d

    def closest_point(self, x, strict: bool = False) -> SurfaceParamPoint:
        x = np.asarray(x, dtype=float)
        y = x.copy()
        # step 1: walk along the gradient onto the level set
        for _ in range(MAX_ITER):
            gv = float(self.g(y))
            gr = np.asarray(self.grad(y), dtype=float)
            n2 = float(gr @ gr)
            if n2 == 0.0:
                raise NoConvergence('vanishing gradient during projection')
            if abs(gv) < 1e-14:
                break
            y = y - (gv / n2) * gr
        else:
            raise NoConvergence('level-set walk did not converge')
        # step 2: slide tangentially toward the foot of the normal from x
        for _ in range(MAX_ITER):
            gr = np.asarray(self.grad(y), dtype=float)
            n = _unit(gr)
            r = x - y
            rt = r - (r @ n) * n
            if float(np.linalg.norm(rt)) < 0.1 * EPS_SURF:
                break
            y = y + 0.5 * rt
            for _ in range(8):
                gv = float(self.g(y))
                gr2 = np.asarray(self.grad(y), dtype=float)
                y = y - (gv / float(gr2 @ gr2)) * gr2
        else:
            raise NoConvergence('tangential slide did not converge')
        u = _unit(np.asarray(self.grad(y), dtype=float))
        t = float((x - y) @ u)
        resid = float(np.linalg.norm(x - y - t * u))
        if resid > EPS_SURF:
            raise NoConvergence(f'projection residual {resid:.2e}')
        return SurfaceParamPoint(y=y, t=t, u_y=u, degenerate=False)

    def normal_at(self, y) -> np.ndarray:
        return _unit(np.asarray(self.grad(np.asarray(y, dtype=float)), dtype=float))
