'''Maximal (Pareto) points under the coordinatewise-dominance cone.

A sample point is maximal when no other sample point weakly dominates it in
every coordinate. Exact duplicates dominate each other and are therefore
all non-maximal; their count is surfaced as a diagnostic. The count of
maximal points is the surface-order statistic whose mean, normalized by
lam^((d-1)/d), converges to a boundary integral of the sample density
along the dominance-facing part of the region boundary.
'''

from __future__ import annotations

from bisect import bisect_left, bisect_right

import numpy as np

from ..errors import DegenerateInput


def maximal_layer(points) -> tuple[np.ndarray, int]:
    '''Boolean maximality mask plus the number of duplicated points.

    d=2 runs a descending sweep with a prefix maximum; d=3 sweeps the last
    coordinate downward and keeps the 2-d staircase front of everything
    already seen. Both are O(n log n).
    '''
    pts = np.asarray(points.points if hasattr(points, 'points') else points,
                     dtype=float)
    if pts.ndim != 2 or pts.shape[1] not in (2, 3):
        raise DegenerateInput('maximal_layer expects (n, 2) or (n, 3) points')
    n = len(pts)
    if n == 0:
        return np.zeros(0, dtype=bool), 0
    uniq, inverse, counts = np.unique(pts, axis=0, return_inverse=True,
                                      return_counts=True)
    inverse = np.asarray(inverse).ravel()
    if pts.shape[1] == 2:
        umask = _maximal_unique_2d(uniq)
    else:
        umask = _maximal_unique_3d(uniq)
    # a duplicated location is dominated by its own copies
    mask = umask[inverse] & (counts[inverse] == 1)
    return mask, int(n - len(uniq))


def _maximal_unique_2d(u: np.ndarray) -> np.ndarray:
    order = np.lexsort((-u[:, 1], -u[:, 0]))
    y = u[order, 1]
    best_before = np.concatenate([[-np.inf], np.maximum.accumulate(y)[:-1]])
    mask_sorted = y > best_before
    mask = np.empty(len(u), dtype=bool)
    mask[order] = mask_sorted
    return mask


def _maximal_unique_3d(u: np.ndarray) -> np.ndarray:
    order = np.lexsort((u[:, 1], u[:, 0], -u[:, 2]))
    su = u[order]
    mask_sorted = np.zeros(len(u), dtype=bool)
    front_x: list[float] = []   # strictly ascending
    front_y: list[float] = []   # strictly descending, paired with front_x
    start = 0
    n = len(su)
    while start < n:
        stop = start
        z = su[start, 2]
        while stop < n and su[stop, 2] == z:
            stop += 1
        batch = su[start:stop, :2]
        if stop - start == 1:
            survivors = [0]
        else:
            survivors = list(np.flatnonzero(_maximal_unique_2d(batch)))
        for k in survivors:
            px, py = batch[k]
            pos = bisect_left(front_x, px)
            if pos < len(front_x) and front_y[pos] >= py:
                continue    # dominated from a strictly higher z
            mask_sorted[start + k] = True
            # fold into the front, dropping points it dominates
            r = bisect_right(front_x, px)
            cut = r
            while cut > 0 and front_y[cut - 1] <= py:
                cut -= 1
            del front_x[cut:r]
            del front_y[cut:r]
            front_x.insert(cut, px)
            front_y.insert(cut, py)
        start = stop
    mask = np.empty(len(u), dtype=bool)
    mask[order] = mask_sorted
    return mask


def count_maximal(points, region=None) -> int:
    '''Number of maximal points, optionally restricted to a region.'''
    pts = np.asarray(points.points if hasattr(points, 'points') else points,
                     dtype=float)
    if region is not None:
        pts = pts[region.contains(pts)]
    mask, _ = maximal_layer(pts)
    return int(mask.sum())


def zeta_scores(points, region=None):
    '''Per-point 0/1 maximality scores (points outside the region score 0).'''
    pts = np.asarray(points.points if hasattr(points, 'points') else points,
                     dtype=float)
    scores = np.zeros(len(pts))
    if region is not None:
        keep = region.contains(pts)
    else:
        keep = np.ones(len(pts), dtype=bool)
    mask, _ = maximal_layer(pts[keep])
    scores[np.flatnonzero(keep)] = mask.astype(float)
    return scores


def maximal_statistic(points, region=None, lam: float | None = None) -> dict:
    '''Count of maximal points and its surface-order normalization.'''
    pts = np.asarray(points.points if hasattr(points, 'points') else points,
                     dtype=float)
    if lam is None:
        lam = float(len(pts))
    d = pts.shape[1]
    count = count_maximal(pts, region)
    norm = count / lam ** ((d - 1) / d) if lam > 0 else float('nan')
    return {'count': count, 'normalized': norm, 'lam': lam, 'n': len(pts)}
