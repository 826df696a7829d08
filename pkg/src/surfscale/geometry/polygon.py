'''Planar polygon primitives: areas, convex clipping, segment/box clipping.

Conventions used throughout:
  - polygons are (m, 2) float arrays of vertices in CCW order, implicitly closed;
  - a half-plane is (a, b, c) and keeps the side a*x + b*y <= c;
  - clipping tracks a per-edge integer label so a clipped cell remembers which
    cutting plane produced each of its edges (label of edge i = edge from
    vertex i to vertex i+1; FREE_EDGE marks edges inherited from the seed
    polygon).
'''

from __future__ import annotations

import numpy as np

FREE_EDGE = -1


def polygon_area(verts: np.ndarray) -> float:
    '''Signed shoelace area; positive for CCW orientation.'''
    v = np.asarray(verts, dtype=float)
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_perimeter(verts: np.ndarray) -> float:
    v = np.asarray(verts, dtype=float)
    if len(v) < 2:
        return 0.0
    return float(np.sum(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)))


def polygon_centroid(verts: np.ndarray) -> np.ndarray:
    '''Area centroid of a simple polygon (falls back to vertex mean if tiny).'''
    v = np.asarray(verts, dtype=float)
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = 0.5 * float(np.sum(cross))
    if abs(a) < 1e-300:
        return v.mean(axis=0)
    cx = float(np.sum((x + xn) * cross)) / (6.0 * a)
    cy = float(np.sum((y + yn) * cross)) / (6.0 * a)
    return np.array([cx, cy])


def box_polygon(lo: float, hi: float) -> np.ndarray:
    '''CCW square [lo,hi]^2.'''
    return np.array([[lo, lo], [hi, lo], [hi, hi], [lo, hi]], dtype=float)


def rect_polygon(x0: float, x1: float, y0: float, y1: float) -> np.ndarray:
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)


def clip_halfplane(verts: np.ndarray,
                   labels: np.ndarray | None,
                   a: float, b: float, c: float,
                   new_label: int):
    '''Clip a convex CCW polygon against the half-plane a*x + b*y <= c.

    Returns (verts, labels) of the clipped polygon; empty arrays when the
    intersection is empty. Points exactly on the line count as inside.
    '''
    v = np.asarray(verts, dtype=float)
    m = len(v)
    if m == 0:
        return v, np.empty(0, dtype=int)
    if labels is None:
        labels = np.full(m, FREE_EDGE, dtype=int)
    s = c - (a * v[:, 0] + b * v[:, 1])
    if np.all(s >= 0.0):
        return v, labels
    if np.all(s < 0.0):
        return np.empty((0, 2)), np.empty(0, dtype=int)
    out_v: list[np.ndarray] = []
    out_l: list[int] = []
    for i in range(m):
        j = (i + 1) % m
        p, q = v[i], v[j]
        sp, sq = s[i], s[j]
        if sq >= 0.0:
            if sp < 0.0:
                t = sp / (sp - sq)
                out_v.append(p + t * (q - p))
                out_l.append(int(labels[i]))
            out_v.append(q)
            out_l.append(int(labels[j]))
        elif sp >= 0.0:
            t = sp / (sp - sq)
            out_v.append(p + t * (q - p))
            out_l.append(new_label)
    if len(out_v) < 3:
        return np.empty((0, 2)), np.empty(0, dtype=int)
    rv = np.array(out_v)
    rl = np.array(out_l, dtype=int)
    # drop a vertex whose outgoing edge is zero-length (duplicate ahead); the
    # surviving copy carries the outgoing-edge label of the real edge
    keep = np.linalg.norm(rv - np.roll(rv, -1, axis=0), axis=1) > 1e-14
    if not np.all(keep):
        rv, rl = rv[keep], rl[keep]
        if len(rv) < 3:
            return np.empty((0, 2)), np.empty(0, dtype=int)
    return rv, rl


def clip_convex(subject: np.ndarray, planes: np.ndarray,
                labels_for_planes: np.ndarray | None = None):
    '''Clip a convex polygon against many half-planes (rows (a, b, c)).

    Returns (verts, labels). Plane i contributes edges labeled
    labels_for_planes[i] (default i).
    '''
    v = np.asarray(subject, dtype=float)
    l = np.full(len(v), FREE_EDGE, dtype=int)
    planes = np.asarray(planes, dtype=float)
    for i in range(len(planes)):
        lab = int(labels_for_planes[i]) if labels_for_planes is not None else i
        v, l = clip_halfplane(v, l, planes[i, 0], planes[i, 1], planes[i, 2], lab)
        if len(v) == 0:
            break
    return v, l


def clip_area_convex(subject: np.ndarray, planes: np.ndarray) -> float:
    '''Area of a convex polygon intersected with half-planes.'''
    v, _ = clip_convex(subject, planes)
    return abs(polygon_area(v))


def clip_area_fast(subject: np.ndarray, planes: np.ndarray) -> float:
    '''Area of a convex polygon intersected with half-planes, no labels.

    Same geometry as clip_convex (points exactly on a line count as
    inside) but runs on plain floats; meant for the clip-heavy boundary
    sweeps where thousands of small cells meet many cutting lines.
    '''
    sub = np.asarray(subject, dtype=float)
    if len(sub) < 3:
        return 0.0
    xs = sub[:, 0].tolist()
    ys = sub[:, 1].tolist()
    for a, b, c in np.asarray(planes, dtype=float).tolist():
        m = len(xs)
        if m < 3:
            return 0.0
        s = [c - a * xs[i] - b * ys[i] for i in range(m)]
        if min(s) >= 0.0:
            continue
        if max(s) < 0.0:
            return 0.0
        nx: list[float] = []
        ny: list[float] = []
        for i in range(m):
            j = i + 1 if i + 1 < m else 0
            sp, sq = s[i], s[j]
            if sq >= 0.0:
                if sp < 0.0:
                    t = sp / (sp - sq)
                    nx.append(xs[i] + t * (xs[j] - xs[i]))
                    ny.append(ys[i] + t * (ys[j] - ys[i]))
                nx.append(xs[j])
                ny.append(ys[j])
            elif sp >= 0.0:
                t = sp / (sp - sq)
                nx.append(xs[i] + t * (xs[j] - xs[i]))
                ny.append(ys[i] + t * (ys[j] - ys[i]))
        xs, ys = nx, ny
    m = len(xs)
    if m < 3:
        return 0.0
    acc = 0.0
    for i in range(m):
        j = i + 1 if i + 1 < m else 0
        acc += xs[i] * ys[j] - xs[j] * ys[i]
    return abs(0.5 * acc)


def bisector_halfplane(site: np.ndarray, other: np.ndarray) -> tuple[float, float, float]:
    '''Half-plane of points at least as close to `site` as to `other`.'''
    d = np.asarray(other, dtype=float) - np.asarray(site, dtype=float)
    mid = 0.5 * (np.asarray(site, dtype=float) + np.asarray(other, dtype=float))
    return float(d[0]), float(d[1]), float(d @ mid)


def clip_segments_to_box(p: np.ndarray, q: np.ndarray, lo: float, hi: float):
    '''Liang-Barsky clip of many segments to the square [lo,hi]^2.

    Args:
        p, q: (n, 2) endpoint arrays.

    Returns:
        (cp, cq, inside): clipped endpoints and a boolean mask of segments with
        a nonempty (possibly degenerate) intersection. Segments lying exactly
        on a wall are kept.
    '''
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d = q - p
    t0 = np.zeros(len(p))
    t1 = np.ones(len(p))
    ok = np.ones(len(p), dtype=bool)
    for axis in (0, 1):
        for sign, bound in ((-1.0, lo), (1.0, hi)):
            pk = sign * d[:, axis]
            qk = sign * (bound - p[:, axis])
            par = pk == 0.0
            ok &= ~(par & (qk < 0.0))
            with np.errstate(divide='ignore', invalid='ignore'):
                t = qk / pk
            enter = pk < 0.0
            leave = pk > 0.0
            t0 = np.where(enter, np.maximum(t0, t), t0)
            t1 = np.where(leave, np.minimum(t1, t), t1)
    ok &= t0 <= t1
    cp = p + t0[:, None] * d
    cq = p + t1[:, None] * d
    cp[~ok] = 0.0
    cq[~ok] = 0.0
    return cp, cq, ok


def order_around(points: np.ndarray, center: np.ndarray) -> np.ndarray:
    '''Indices sorting points CCW by angle around an interior center.'''
    pts = np.asarray(points, dtype=float)
    ang = np.arctan2(pts[:, 1] - center[1], pts[:, 0] - center[0])
    return np.argsort(ang, kind='stable')


def regular_polygon(center, circumradius: float, k: int, phase: float = 0.0) -> np.ndarray:
    '''CCW regular k-gon; vertex 0 at angle `phase`.'''
    ang = phase + 2.0 * np.pi * np.arange(k) / k
    c = np.asarray(center, dtype=float)
    return np.column_stack([c[0] + circumradius * np.cos(ang),
                            c[1] + circumradius * np.sin(ang)])


def equal_area_circumradius(r: float, k: int) -> float:
    '''Circumradius making a regular k-gon's area equal pi*r^2 exactly.'''
    theta = 2.0 * np.pi / k
    return r * np.sqrt(2.0 * np.pi / (k * np.sin(theta)))


def convex_polygon_planes(verts: np.ndarray) -> np.ndarray:
    '''Half-plane rows (a, b, c) whose intersection is the convex CCW polygon.'''
    v = np.asarray(verts, dtype=float)
    e = np.roll(v, -1, axis=0) - v
    # inward side of each edge: left of the direction for CCW orientation
    a = e[:, 1]
    b = -e[:, 0]
    c = a * v[:, 0] + b * v[:, 1]
    return np.column_stack([a, b, c])


def points_in_convex(points: np.ndarray, planes: np.ndarray) -> np.ndarray:
    '''Membership mask (boundary counts as inside) via the polygon's planes.'''
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    s = pts @ planes[:, :2].T - planes[:, 2][None, :]
    return np.all(s <= 0.0, axis=1)
