'''Planar Voronoi cell complex on the unit square, plus a generic NN index.

Construction: augment the sites with reflected copies (clip mode) or
periodic translates (torus mode) inside a margin strip, hand the augmented
cloud to Qhull, and read everything off the ridge list. Inside the square
the augmented diagram coincides with the clipped / periodic diagram as soon
as the margin exceeds the covering radius (clip) or twice the covering
radius (torus), which is validated after every build; the margin is grown
and the diagram rebuilt when the check fails, with a direct half-plane
construction as the last resort for degenerate inputs.

Cell areas come from a fan decomposition over ridges (apex at the site),
which vectorizes over the whole diagram; explicit cell polygons are only
assembled for the few cells a caller asks about.
'''

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay, QhullError, Voronoi, cKDTree

from .errors import DegenerateInput, NotAdjacent
from .geometry.polygon import (FREE_EDGE, bisector_halfplane, box_polygon,
                               clip_convex, clip_halfplane,
                               clip_segments_to_box, polygon_area)

WALL_SNAP = 1e-12
AREA_TOL = 1e-9
TORUS_SHIFTS = [np.array([dx, dy], dtype=float)
                for dx in (-1.0, 0.0, 1.0) for dy in (-1.0, 0.0, 1.0)]
SQUARE_PLANES = np.array([[-1.0, 0.0, 0.0], [1.0, 0.0, 1.0],
                          [0.0, -1.0, 0.0], [0.0, 1.0, 1.0]])


@dataclass
class NNIndex:
    '''Nearest-site index over d in {2, 3}; torus mode wraps the metric.'''
    points: np.ndarray
    boundary_mode: str = 'clip'
    tree: cKDTree = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if self.boundary_mode == 'torus':
            self.tree = cKDTree(np.mod(pts, 1.0), boxsize=1.0)
        else:
            self.tree = cKDTree(pts)

    def nearest(self, q):
        '''(index, distance) of the globally nearest site.'''
        q = np.asarray(q, dtype=float)
        if self.boundary_mode == 'torus':
            q = np.mod(q, 1.0)
        dist, idx = self.tree.query(q)
        return int(idx), float(dist)

    def query_many(self, qs: np.ndarray):
        qs = np.asarray(qs, dtype=float)
        if self.boundary_mode == 'torus':
            qs = np.mod(qs, 1.0)
        dist, idx = self.tree.query(qs)
        return idx, dist


class VoronoiDiagram:
    '''Voronoi cells of planar sites, clipped to [0,1]^2 or periodic.

    Attributes:
        sites: (n, 2) distinct sites inside the square.
        boundary_mode: 'clip' or 'torus'.
        areas: per-site cell area (torus areas are full periodic cells).
        merged_count: number of duplicate input sites merged away.
        site_map: original input index -> index into sites.
        sq_i, sq_j, sq_p, sq_q, sq_len: faces between real cells restricted
            to the square, as index pairs, endpoints and lengths.
    '''

    def __init__(self, sites: np.ndarray, boundary_mode: str = 'clip',
                 margin: float | None = None):
        pts = np.atleast_2d(np.asarray(sites, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
            raise DegenerateInput('need at least one 2-d site')
        if boundary_mode not in ('clip', 'torus'):
            raise ValueError("boundary_mode must be 'clip' or 'torus'")
        if np.any(pts < 0) or np.any(pts > 1):
            raise DegenerateInput('sites must lie in the unit square')
        self.boundary_mode = boundary_mode
        self.sites, self.site_map, self.merged_count = _merge_duplicates(pts)
        n = len(self.sites)
        if margin is None:
            margin = max(0.05, 3.5 * np.sqrt(np.log(max(n, 2)) / (np.pi * n)))
        built = False
        while margin <= 1.0 and not built:
            try:
                self._build(margin)
                built = True
            except (_MarginTooSmall, QhullError):
                margin = min(2.0 * margin, 1.0) if margin < 1.0 else 2.0
        if not built:
            self._build_fallback()
        self._nn: NNIndex | None = None
        self._adj: list[dict[int, float]] | None = None

    # -- public api --------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.sites)

    def nn_index(self) -> NNIndex:
        if self._nn is None:
            self._nn = NNIndex(self.sites, self.boundary_mode)
        return self._nn

    def cell_area(self, i: int) -> float:
        return float(self.areas[i])

    def adjacency(self, i: int) -> dict[int, float]:
        '''Neighbor index -> total shared face length inside the square.'''
        return self._adjacency()[i]

    def shared_face_measure(self, i: int, j: int) -> float:
        adj = self._adjacency()
        if j not in adj[i]:
            raise NotAdjacent(f'sites {i} and {j} share no face in the square')
        return adj[i][j]

    def cell_polygon(self, i: int) -> np.ndarray:
        '''The cell of site i as one convex CCW polygon.

        Clip mode: the cell clipped to the square. Torus mode: the full
        periodic cell drawn around the base site; it may overhang the
        square, and its translates by integer shifts tile the plane.
        '''
        return _polygon_from_segments(self._cell_segments(i), self.sites[i])

    def cell_pieces(self, i: int) -> list[np.ndarray]:
        '''Portions of cell i inside the square (torus cells may wrap).'''
        poly = self.cell_polygon(i)
        if self.boundary_mode == 'clip':
            return [poly] if len(poly) >= 3 else []
        pieces = []
        for shift in TORUS_SHIFTS:
            moved = poly + shift
            if (moved[:, 0].max() <= 0 or moved[:, 0].min() >= 1
                    or moved[:, 1].max() <= 0 or moved[:, 1].min() >= 1):
                continue
            v, _ = clip_convex(moved, SQUARE_PLANES)
            if len(v) >= 3 and abs(polygon_area(v)) > 0:
                pieces.append(v)
        return pieces

    def covering_radius(self) -> float:
        '''Max distance from any point of the square to its nearest site.'''
        return self._rho_max

    def stabilization_diagnostic(self, i: int) -> float:
        '''Diameter of the union of cell i and its adjacent cells.'''
        verts = [np.atleast_2d(p) for p in self.cell_pieces(i) if len(p)]
        for j in self._adjacency()[i]:
            verts.extend(np.atleast_2d(p) for p in self.cell_pieces(j) if len(p))
        allv = np.concatenate(verts, axis=0)
        diff = np.abs(allv[:, None, :] - allv[None, :, :])
        if self.boundary_mode == 'torus':
            diff = np.minimum(diff, 1.0 - diff)
        return float(np.max(np.hypot(diff[..., 0], diff[..., 1])))

    # -- construction ------------------------------------------------------

    def _build(self, margin: float) -> None:
        n = len(self.sites)
        aug, base = _augment(self.sites, self.boundary_mode, margin)
        if len(aug) < 5:
            raise QhullError('too few augmented sites')
        vor = Voronoi(aug)
        rp = vor.ridge_points
        rv = np.asarray(vor.ridge_vertices)
        p, q = _ridge_endpoints(aug, rp, rv, vor.vertices)
        for arr in (p, q):
            arr[np.abs(arr) < WALL_SNAP] = 0.0
            arr[np.abs(arr - 1.0) < WALL_SNAP] = 1.0

        if self.boundary_mode == 'torus':
            ok = np.ones(len(rp), dtype=bool)
        else:
            p, q, ok = clip_segments_to_box(p, q, 0.0, 1.0)
            p[~ok] = 2.0
            q[~ok] = 2.0

        areas = np.zeros(n)
        radii = np.zeros(n)
        for side in (rp[:, 0], rp[:, 1]):
            mask = (side < n) & ok
            tri = _tri_areas(aug[side[mask]], p[mask], q[mask])
            np.add.at(areas, side[mask], tri)
            np.maximum.at(radii, side[mask],
                          np.maximum(np.linalg.norm(p[mask] - aug[side[mask]], axis=1),
                                     np.linalg.norm(q[mask] - aug[side[mask]], axis=1)))
        rho = float(radii.max()) if n else 0.0

        factor = 2.0 if self.boundary_mode == 'torus' else 1.0
        if factor * rho > margin and not (self.boundary_mode == 'clip'
                                          and margin >= 1.0):
            raise _MarginTooSmall
        if abs(float(areas.sum()) - 1.0) > AREA_TOL:
            raise _MarginTooSmall

        self.aug_sites = aug
        self.base_index = base
        self.areas = areas
        self.cell_radii = radii
        self._rho_max = rho
        self.ridge_points = rp
        self.ridge_p = p
        self.ridge_q = q
        self.ridge_ok = ok
        self._fallback_cells = None
        self._ridge_index = None
        self._restrict_to_square()

    def _build_fallback(self) -> None:
        '''Direct half-plane intersection; O(n^2), for degenerate inputs.

        Torus mode uses the full 5x5 block of translates: any image that can
        win somewhere within reach of the square lies inside it.
        '''
        n = len(self.sites)
        if self.boundary_mode == 'torus':
            copies = [self.sites + np.array([dx, dy])
                      for dx in (-2.0, -1.0, 0.0, 1.0, 2.0)
                      for dy in (-2.0, -1.0, 0.0, 1.0, 2.0)]
            aug = np.concatenate(copies, axis=0)
            base = np.tile(np.arange(n), 25)
            window = box_polygon(-2.0, 3.0)
        else:
            aug, base = _augment(self.sites, 'clip', 1.0)
            window = box_polygon(0.0, 1.0)
        offset = n * 12 if self.boundary_mode == 'torus' else 0
        cells = []
        areas = np.zeros(n)
        radii = np.zeros(n)
        ridge_rows = []
        for i in range(n):
            me = offset + i
            v = window.copy()
            l = np.full(len(v), FREE_EDGE, dtype=int)
            for j in range(len(aug)):
                if j == me:
                    continue
                a, b, c = bisector_halfplane(self.sites[i], aug[j])
                v, l = clip_halfplane(v, l, a, b, c, j)
                if len(v) == 0:
                    break
            cells.append((v, l))
            areas[i] = abs(polygon_area(v))
            if len(v):
                radii[i] = float(np.max(np.linalg.norm(v - self.sites[i], axis=1)))
            # gather this cell's in-square face pieces; torus cells are also
            # scanned under all unit shifts since a wrapped face piece may
            # lie between two translated cells
            shifts = TORUS_SHIFTS if self.boundary_mode == 'torus' else [np.zeros(2)]
            for k in range(len(v)):
                lab = int(l[k])
                if lab == FREE_EDGE or int(base[lab]) < 0:
                    continue
                bj = int(base[lab])
                for shift in shifts:
                    pp = v[k] + shift
                    qq = v[(k + 1) % len(v)] + shift
                    cp, cq, okk = clip_segments_to_box(pp[None, :], qq[None, :],
                                                       0.0, 1.0)
                    if not okk[0]:
                        continue
                    length = float(np.hypot(*(cq[0] - cp[0])))
                    if length <= 0:
                        continue
                    mid = 0.5 * (cp[0] + cq[0])
                    key = (min(i, bj), max(i, bj),
                           round(float(mid[0]), 9), round(float(mid[1]), 9))
                    ridge_rows.append((key, i, bj, cp[0], cq[0], length))
        self.aug_sites = aug
        self.base_index = base
        self.areas = areas
        self.cell_radii = radii
        self._rho_max = float(radii.max()) if n else 0.0
        self._fallback_cells = cells
        self.ridge_points = np.empty((0, 2), dtype=int)
        self.ridge_p = np.empty((0, 2))
        self.ridge_q = np.empty((0, 2))
        self.ridge_ok = np.empty(0, dtype=bool)
        self._ridge_index = None
        # every in-square face piece is seen once per incident cell lift
        seen = set()
        sq_i, sq_j, sq_p, sq_q, sq_len = [], [], [], [], []
        for key, i, bj, pp, qq, length in ridge_rows:
            if key in seen:
                continue
            seen.add(key)
            sq_i.append(i)
            sq_j.append(bj)
            sq_p.append(pp)
            sq_q.append(qq)
            sq_len.append(length)
        self.sq_i = np.array(sq_i, dtype=int)
        self.sq_j = np.array(sq_j, dtype=int)
        self.sq_p = np.array(sq_p).reshape(-1, 2)
        self.sq_q = np.array(sq_q).reshape(-1, 2)
        self.sq_len = np.array(sq_len)

    def _restrict_to_square(self) -> None:
        rp = self.ridge_points
        if len(rp) == 0:
            self.sq_i = np.empty(0, dtype=int)
            self.sq_j = np.empty(0, dtype=int)
            self.sq_p = np.empty((0, 2))
            self.sq_q = np.empty((0, 2))
            self.sq_len = np.empty(0)
            return
        bi = self.base_index[rp[:, 0]]
        bj = self.base_index[rp[:, 1]]
        real = (bi >= 0) & (bj >= 0) & self.ridge_ok
        sp, sq_, ok = clip_segments_to_box(self.ridge_p, self.ridge_q, 0.0, 1.0)
        lens = np.where(ok, np.hypot(sq_[:, 0] - sp[:, 0], sq_[:, 1] - sp[:, 1]), 0.0)
        good = real & ok & (lens > 0)
        self.sq_i = bi[good]
        self.sq_j = bj[good]
        self.sq_p = sp[good]
        self.sq_q = sq_[good]
        self.sq_len = lens[good]

    # -- helpers -----------------------------------------------------------

    def _adjacency(self):
        if self._adj is None:
            adj: list[dict[int, float]] = [dict() for _ in range(self.n)]
            for i, j, ln in zip(self.sq_i, self.sq_j, self.sq_len):
                i, j, ln = int(i), int(j), float(ln)
                adj[i][j] = adj[i].get(j, 0.0) + ln
                adj[j][i] = adj[j].get(i, 0.0) + ln
            self._adj = adj
        return self._adj

    def _cell_segments(self, i: int):
        if self._fallback_cells is not None:
            v, _ = self._fallback_cells[i]
            return [(v[k], v[(k + 1) % len(v)]) for k in range(len(v))]
        if self._ridge_index is None:
            rp = self.ridge_points
            both = np.concatenate([rp[:, 0], rp[:, 1]])
            ridx = np.tile(np.arange(len(rp)), 2)
            okm = np.tile(self.ridge_ok, 2)
            order = np.argsort(both[okm], kind='stable')
            self._ridge_index = (both[okm][order], ridx[okm][order])
        owners, rids = self._ridge_index
        lo = np.searchsorted(owners, i, side='left')
        hi = np.searchsorted(owners, i, side='right')
        return [(self.ridge_p[r], self.ridge_q[r]) for r in rids[lo:hi]]


class _MarginTooSmall(Exception):
    pass


def _merge_duplicates(pts: np.ndarray):
    keys = np.round(pts / 1e-12).astype(np.int64)
    _, first_idx, inverse = np.unique(keys, axis=0, return_index=True,
                                      return_inverse=True)
    order = np.argsort(first_idx)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    site_map = rank[np.asarray(inverse).ravel()]
    unique_pts = pts[np.sort(first_idx)]
    merged = len(pts) - len(unique_pts)
    return np.ascontiguousarray(unique_pts), site_map, merged


def _augment(sites: np.ndarray, mode: str, margin: float):
    n = len(sites)
    base = [np.arange(n)]
    copies = [sites]
    if mode == 'torus':
        for shift in TORUS_SHIFTS:
            if shift[0] == 0.0 and shift[1] == 0.0:
                continue
            moved = sites + shift
            keep = np.all((moved > -margin) & (moved < 1.0 + margin), axis=1)
            if np.any(keep):
                copies.append(moved[keep])
                base.append(np.flatnonzero(keep))
    else:
        for axis, wall in ((0, 0.0), (0, 1.0), (1, 0.0), (1, 1.0)):
            dist = np.abs(sites[:, axis] - wall)
            keep = (dist < margin) & (dist > WALL_SNAP)
            if np.any(keep):
                ref = sites[keep].copy()
                ref[:, axis] = 2.0 * wall - ref[:, axis]
                copies.append(ref)
                base.append(np.full(int(keep.sum()), -1, dtype=int))
    return np.concatenate(copies, axis=0), np.concatenate(base)


def _ridge_endpoints(aug, rp, rv, verts):
    finite = rv.min(axis=1) >= 0
    p = np.zeros((len(rp), 2))
    q = np.zeros((len(rp), 2))
    p[finite] = verts[rv[finite, 0]]
    q[finite] = verts[rv[finite, 1]]
    inf_idx = np.flatnonzero(~finite)
    if inf_idx.size:
        center = aug.mean(axis=0)
        far = 8.0 * (1.0 + float(np.max(np.abs(aug))))
        for r in inf_idx:
            iv = int(max(rv[r, 0], rv[r, 1]))
            a, b = rp[r]
            t = aug[b] - aug[a]
            t = t / np.linalg.norm(t)
            nrm = np.array([-t[1], t[0]])
            mid = 0.5 * (aug[a] + aug[b])
            if (mid - center) @ nrm < 0:
                nrm = -nrm
            p[r] = verts[iv]
            q[r] = verts[iv] + far * nrm
    return p, q


def _tri_areas(apex, p, q):
    return 0.5 * np.abs((p[:, 0] - apex[:, 0]) * (q[:, 1] - apex[:, 1])
                        - (q[:, 0] - apex[:, 0]) * (p[:, 1] - apex[:, 1]))



def _polygon_from_segments(segs, site) -> np.ndarray:
    if not segs:
        return np.empty((0, 2))
    pts = np.concatenate([np.stack([a, b]) for a, b in segs], axis=0)
    drop = np.hypot(pts[:, 0] - site[0], pts[:, 1] - site[1]) < 1e-13
    pts = pts[~drop]
    _, idx = np.unique(np.round(pts, 9), axis=0, return_index=True)
    v = pts[np.sort(idx)]
    ang = np.arctan2(v[:, 1] - site[1], v[:, 0] - site[0])
    return v[np.argsort(ang, kind='stable')]


def build_voronoi_2d(sites, boundary_mode: str = 'clip') -> VoronoiDiagram:
    '''Cell complex of 2-d sites (see VoronoiDiagram).'''
    pts = sites.points if hasattr(sites, 'points') else np.asarray(sites, dtype=float)
    return VoronoiDiagram(pts, boundary_mode)


def cell_volume(diagram: VoronoiDiagram, site_index: int) -> float:
    '''Exact area of the cell of one site.'''
    return diagram.cell_area(site_index)


def cell_volume_mc(index: NNIndex, site_index: int, region_filter=None,
                   probes: int = 4096, seed=0) -> tuple[float, float]:
    '''Monte Carlo volume of the cell of one site inside the unit cube.

    Draws uniform probes, counts those whose nearest site is site_index
    (optionally also inside region_filter). Returns (estimate, std_error).
    '''
    if probes < 1:
        raise ValueError('probes must be >= 1')
    from .rng import stream
    rng = seed if isinstance(seed, np.random.Generator) else stream(int(seed))
    d = np.asarray(index.points).shape[1]
    w = rng.random((probes, d))
    idx, _ = index.query_many(w)
    hits = idx == site_index
    if region_filter is not None:
        hits &= region_filter.contains(w)
    phat = float(np.mean(hits))
    se = float(np.sqrt(max(phat * (1.0 - phat), 0.0) / probes))
    return phat, se


def shared_face_measure(diagram: VoronoiDiagram, i: int, j: int) -> float:
    return diagram.shared_face_measure(i, j)


def stabilization_diagnostic(diagram: VoronoiDiagram, site_index: int) -> float:
    return diagram.stabilization_diagnostic(site_index)


def delaunay_circumcircle_violations(points: np.ndarray, tol: float = 1e-9) -> int:
    '''Count (triangle, site) pairs violating the empty-circumcircle property.

    Brute O(n * triangles) check intended for n up to a few hundred.
    '''
    pts = np.asarray(points, dtype=float)
    tri = Delaunay(pts)
    bad = 0
    for simplex in tri.simplices:
        a, b, c = pts[simplex]
        center, r = _circumcircle(a, b, c)
        if not np.isfinite(r):
            continue
        d = np.linalg.norm(pts - center, axis=1)
        inside = d < r - tol * max(r, 1.0)
        inside[simplex] = False
        bad += int(np.sum(inside))
    return bad


def _circumcircle(a, b, c):
    ax, ay = a
    bx, by = b
    cx, cy = c
    dd = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if dd == 0.0:
        return np.array([np.nan, np.nan]), np.inf
    ux = ((ax ** 2 + ay ** 2) * (by - cy) + (bx ** 2 + by ** 2) * (cy - ay)
          + (cx ** 2 + cy ** 2) * (ay - by)) / dd
    uy = ((ax ** 2 + ay ** 2) * (cx - bx) + (bx ** 2 + by ** 2) * (ax - cx)
          + (cx ** 2 + cy ** 2) * (bx - ax)) / dd
    center = np.array([ux, uy])
    return center, float(np.linalg.norm(a - center))


def single_cell_polygon(x, points: np.ndarray, tree: cKDTree,
                        window: tuple[float, float]):
    '''Voronoi cell of an inserted point x among `points`, within a window box.

    Clips the window against bisector half-planes of the nearest candidates,
    growing the candidate set until every point within twice the cell's
    reach was considered. Returns (vertices, labels): label k >= 0 marks an
    edge contributed by points[k], FREE_EDGE marks a window wall.

    Only the inserted point's cell is needed by the tangent-plane
    experiments, so building a full diagram would be wasted work.
    '''
    x = np.asarray(x, dtype=float)
    lo, hi = window
    n = len(points)
    k = min(16, n)
    while True:
        dist, idx = tree.query(x, k=k)
        dist = np.atleast_1d(np.asarray(dist, dtype=float))
        idx = np.atleast_1d(np.asarray(idx, dtype=int))
        real = idx < n
        idx, dist = idx[real], dist[real]
        v = box_polygon(lo, hi)
        l = np.full(len(v), FREE_EDGE, dtype=int)
        for j in idx:
            pj = points[j]
            if np.all(pj == x):
                continue
            a, b, c = bisector_halfplane(x, pj)
            v, l = clip_halfplane(v, l, a, b, c, int(j))
            if len(v) == 0:
                break
        if len(v) == 0:
            return v, l
        rho = float(np.max(np.linalg.norm(v - x, axis=1)))
        kth = float(dist[-1]) if len(dist) else np.inf
        if k >= n or kth > 2.0 * rho:
            return v, l
        k = min(2 * k, n)


def batch_cell_polygons(aug_sites, ridge_points, ridge_p, ridge_q, ridge_ok,
                        wanted) -> list[np.ndarray]:
    '''Convex CCW cell polygons for many sites of one diagram at once.

    Gathers every ridge endpoint per wanted site, dedupes and angularly
    orders them in a single vectorized pass; the per-cell work is just an
    array split. Intended for the boundary-candidate sweeps where a few
    thousand small polygons are needed per replicate.
    '''
    wanted = np.asarray(wanted, dtype=int)
    if len(wanted) == 0:
        return []
    rp = ridge_points
    both = np.concatenate([rp[:, 0], rp[:, 1]])
    ridx = np.tile(np.arange(len(rp)), 2)
    okm = np.tile(ridge_ok, 2)
    order = np.argsort(both[okm], kind='stable')
    owners = both[okm][order]
    rids = ridx[okm][order]
    lo = np.searchsorted(owners, wanted, side='left')
    hi = np.searchsorted(owners, wanted, side='right')
    counts = hi - lo
    total = int(counts.sum())
    if total == 0:
        return [np.empty((0, 2)) for _ in wanted]
    cell_row = np.repeat(np.arange(len(wanted)), counts)
    starts = np.cumsum(counts) - counts
    pos = np.arange(total) - np.repeat(starts, counts) + np.repeat(lo, counts)
    rows = rids[pos]
    verts = np.concatenate([ridge_p[rows], ridge_q[rows]], axis=0)
    cells = np.concatenate([cell_row, cell_row])
    centers = aug_sites[wanted][cells]
    rel = verts - centers
    rad = np.hypot(rel[:, 0], rel[:, 1])
    keep = rad > 1e-13
    verts, cells, rel = verts[keep], cells[keep], rel[keep]
    key_round = np.round(verts, 9)
    order2 = np.lexsort((key_round[:, 1], key_round[:, 0], cells))
    verts, cells, rel = verts[order2], cells[order2], rel[order2]
    kr = key_round[order2]
    dup = np.zeros(len(verts), dtype=bool)
    if len(verts) > 1:
        dup[1:] = ((cells[1:] == cells[:-1])
                   & (kr[1:, 0] == kr[:-1, 0]) & (kr[1:, 1] == kr[:-1, 1]))
    verts, cells, rel = verts[~dup], cells[~dup], rel[~dup]
    ang = np.arctan2(rel[:, 1], rel[:, 0])
    order3 = np.lexsort((ang, cells))
    verts, cells = verts[order3], cells[order3]
    bounds = np.searchsorted(cells, np.arange(len(wanted) + 1))
    return [verts[bounds[k]:bounds[k + 1]] for k in range(len(wanted))]


class BandUnavailable(Exception):
    '''Raised when the boundary-collar construction cannot be certified.'''


class BandDiagram:
    '''Exact Voronoi cells for the sites near a region boundary only.

    For surface-order statistics every contributing cell crosses or touches
    the boundary, so the full diagram is wasted work. This builds the
    diagram of the sites inside a collar around the boundary and certifies,
    by explicit post-build checks, that

      * every cell crossing the boundary has its site in the target collar
        (covering-radius bound along the boundary, Lipschitz-extended from
        a fine parametric grid),
      * every target cell is identical to its cell in the full diagram
        (any omitted site is farther than twice the largest target cell
        reach),
      * every face between a target pair is present exactly once.

    The collar is also required to clear the square walls by its own
    width, which makes every certified cell independent of the boundary
    mode: clip, torus, and unbounded diagrams agree on cells that far
    from the walls, so one collar build serves either mode.

    Raises BandUnavailable when the certificate fails or when the collar
    is not comfortably inside the unit square; callers fall back to the
    full diagram then.
    '''

    def __init__(self, points, region, grid_size: int = 4096):
        pts = np.asarray(points, dtype=float)
        n = len(pts)
        if n < 64:
            raise BandUnavailable('too few points for a collar build')
        bounds_fn = getattr(region, 'boundary_distance_bounds', None)
        chain = getattr(region, 'active_boundary', None)
        if bounds_fn is None or chain is None:
            raise BandUnavailable('region provides no boundary distance bounds')
        tree = cKDTree(pts)
        grid = chain.sample(grid_size)
        spacing = chain.measure() / grid_size
        nn_d, _ = tree.query(grid)
        rho_bar = float(np.max(nn_d)) + 0.5 * spacing + 1e-9
        d_lo, d_hi = bounds_fn(pts)
        t = 4.0 * rho_bar
        m = 4.0 * rho_bar
        for _ in range(6):
            incl = np.flatnonzero(d_lo <= t + m)
            if len(incl) > 0.45 * n or len(incl) < 8:
                raise BandUnavailable('collar would cover most of the sample')
            sub = pts[incl]
            if (sub.min() < t + m) or (sub.max() > 1.0 - t - m):
                raise BandUnavailable('collar too close to the square walls')
            vor = Voronoi(sub)
            rp = vor.ridge_points
            rv = np.asarray(vor.ridge_vertices)
            p, q = _ridge_endpoints(sub, rp, rv, vor.vertices)
            areas = np.zeros(len(sub))
            radius = np.zeros(len(sub))
            for side in (rp[:, 0], rp[:, 1]):
                np.add.at(areas, side, _tri_areas(sub[side], p, q))
                np.maximum.at(radius, side,
                              np.maximum(np.linalg.norm(p - sub[side], axis=1),
                                         np.linalg.norm(q - sub[side], axis=1)))
            targ = d_hi[incl] <= t
            rho_t = float(radius[targ].max()) if np.any(targ) else rho_bar
            crossing = targ & (d_lo[incl] <= radius)
            rho_star = float(radius[crossing].max()) if np.any(crossing) else rho_bar
            if 3.0 * rho_star + 1e-6 <= t and 2.0 * rho_t + 1e-6 <= m:
                break
            # grow to what the measured reaches require, with headroom;
            # the measured values only grow with the collar, so keep margin
            t_next = max(t, 3.3 * rho_star)
            m_next = max(m, 2.2 * rho_t)
            if t_next < 1.05 * t and m_next < 1.05 * m:
                t_next, m_next = 1.5 * t, 1.5 * m
            t, m = t_next, m_next
        else:
            raise BandUnavailable('collar certificate failed to converge')
        self.points = pts
        self.region = region
        self.rho_bar = rho_bar
        self.t = t
        self.m = m
        self.included = incl
        self.sub = sub
        self.d_lo = d_lo[incl]
        self.d_hi = d_hi[incl]
        self.areas = areas
        self.radius = radius
        self.target = targ
        self.ridge_points = rp
        self.ridge_p = p
        self.ridge_q = q
        self.ridge_ok = np.ones(len(rp), dtype=bool)

    def target_indices(self) -> np.ndarray:
        '''Global indices of the certified (target) sites.'''
        return self.included[self.target]

    def cell_polygons(self, local_ids) -> list[np.ndarray]:
        return batch_cell_polygons(self.sub, self.ridge_points, self.ridge_p,
                                   self.ridge_q, self.ridge_ok, local_ids)
