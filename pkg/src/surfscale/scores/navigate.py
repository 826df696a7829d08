'''Greedy cell-hopping navigation between two points of the unit square.

The walk starts at the site owning the start point and repeatedly hops to
the adjacent site closest to the target, stopping once no neighbor improves.
On a nearest-neighbor graph that contains all cell adjacencies this walk
provably terminates at the site owning the target: while the current site
does not own the target, the segment toward the target leaves the current
cell through some shared face, and the site on the far side is strictly
closer. Per-site hop lengths double as scores whose sum telescopes to the
exact path length.
'''

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay, QhullError

from ..errors import CurveEscapes, DegenerateInput
from ..voronoi import VoronoiDiagram


@dataclass(frozen=True)
class NavigationResult:
    path: list[int]
    sites: np.ndarray = field(repr=False)
    lengths: np.ndarray = field(repr=False)
    total_length: float
    hops: int
    boundary_mode: str


def _metric(a: np.ndarray, b: np.ndarray, torus: bool) -> np.ndarray:
    delta = np.abs(np.atleast_2d(a) - b)
    if torus:
        delta = np.minimum(delta, 1.0 - delta)
    return np.sqrt((delta * delta).sum(axis=-1))


def _clip_adjacency(sites: np.ndarray) -> dict[int, list[int]]:
    n = len(sites)
    if n <= 3:
        return {i: [j for j in range(n) if j != i] for i in range(n)}
    try:
        tri = Delaunay(sites)
    except QhullError:
        return {i: [j for j in range(n) if j != i] for i in range(n)}
    indptr, indices = tri.vertex_neighbor_vertices
    return {i: list(indices[indptr[i]:indptr[i + 1]]) for i in range(n)}


def navigate(points, start, target, boundary_mode: str = 'clip',
             diagram: VoronoiDiagram | None = None) -> NavigationResult:
    '''Greedy walk through cell adjacencies from start to target.'''
    pts = np.asarray(points.points if hasattr(points, 'points') else points,
                     dtype=float)
    start = np.asarray(start, dtype=float)
    target = np.asarray(target, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DegenerateInput('navigate expects (n, 2) points')
    if len(pts) == 0:
        raise DegenerateInput('navigate needs at least one site')
    torus = boundary_mode == 'torus'
    if torus:
        if diagram is None:
            diagram = VoronoiDiagram(pts, boundary_mode='torus')
        sites = diagram.sites
        adjacency = diagram._adjacency()
    else:
        sites = pts
        adjacency = _clip_adjacency(sites)

    dist_t = _metric(sites, target, torus)
    current = int(np.argmin(_metric(sites, start, torus)))
    goal = int(np.argmin(dist_t))
    path = [current]
    lengths: list[float] = []
    cap = len(sites) + 1
    while current != goal:
        neigh = list(adjacency[current])
        if not neigh:
            raise CurveEscapes('site %d has no neighbors' % current)
        neigh_arr = np.asarray(neigh, dtype=int)
        best = neigh_arr[int(np.argmin(dist_t[neigh_arr]))]
        if dist_t[best] >= dist_t[current]:
            raise CurveEscapes(
                'greedy walk stuck at site %d before reaching %d'
                % (current, goal))
        lengths.append(float(_metric(sites[current], sites[best], torus)[0]))
        path.append(int(best))
        current = int(best)
        if len(path) > cap:
            raise CurveEscapes('walk exceeded %d hops' % cap)
    lengths_arr = np.asarray(lengths, dtype=float)
    return NavigationResult(path=path, sites=sites[np.asarray(path, dtype=int)],
                            lengths=lengths_arr,
                            total_length=math.fsum(lengths),
                            hops=len(lengths), boundary_mode=boundary_mode)


def rho_scores(points, start, target, boundary_mode: str = 'clip',
               diagram: VoronoiDiagram | None = None):
    '''Per-site outgoing-hop lengths along the greedy path.

    Sites off the path score zero. Exact (compensated) summation of the
    scores reproduces total_length bit for bit, because both reduce the
    same multiset of hop lengths and fsum rounds the true sum once.
    '''
    pts = np.asarray(points.points if hasattr(points, 'points') else points,
                     dtype=float)
    torus = boundary_mode == 'torus'
    if torus and diagram is None:
        diagram = VoronoiDiagram(pts, boundary_mode='torus')
    result = navigate(pts, start, target, boundary_mode, diagram)
    scores = np.zeros(len(pts))
    if torus:
        # path indices refer to merged sites; credit the first original point
        first = np.full(len(diagram.sites), -1, dtype=int)
        for orig in range(len(pts) - 1, -1, -1):
            first[diagram.site_map[orig]] = orig
        owner = [int(first[s]) for s in result.path[:-1]]
    else:
        owner = result.path[:-1]
    for k, site in enumerate(owner):
        scores[site] += result.lengths[k]
    return scores, result


def validate_path(points, result: NavigationResult, target,
                  boundary_mode: str | None = None) -> bool:
    '''Recheck a finished walk: monotone progress and consistent lengths.'''
    mode = boundary_mode or result.boundary_mode
    torus = mode == 'torus'
    target = np.asarray(target, dtype=float)
    coords = result.sites
    dist_t = _metric(coords, target, torus)
    if np.any(np.diff(dist_t) >= 0):
        return False
    step = _metric(coords[:-1], coords[1:], torus) if len(coords) > 1 \
        else np.zeros(0)
    if not np.array_equal(step, result.lengths):
        return False
    return math.fsum(result.lengths) == result.total_length
