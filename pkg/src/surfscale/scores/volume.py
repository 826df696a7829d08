'''Volume scores: how much the cell-union estimate of a region over- and
under-shoots the region itself.

The per-point score of a site x with cell C is, after the order-d volume
rescaling by lam:

    nu_minus(x) =  lam * (Vol(C) - Vol(C & A))   if x in A
                  -lam * Vol(C & A)              otherwise
    nu_plus(x)  =  lam * (Vol(C) - Vol(C & A))   if x in A
                  +lam * Vol(C & A)              otherwise

so the totals satisfy, configuration by configuration,

    sum nu_minus = lam * (Vol(A_lam) - Vol(A))
    sum nu_plus  = lam * Vol(A sym-diff A_lam)

where A_lam is the union of cells with site in A. Only cells meeting the
boundary contribute, which is what makes the collar-restricted build
(BandDiagram) equivalent to the full diagram; the full path is kept both
as the oracle for that equivalence and for regions without certified
distance bounds.
'''

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import HypothesisViolation
from ..voronoi import (BandDiagram, BandUnavailable, VoronoiDiagram,
                       batch_cell_polygons)

IDENTITY_TOL = 1e-6


@dataclass(frozen=True)
class VolumeRun:
    '''One evaluation of the cell-union volume statistics.'''
    volume: float          # Vol(A_lam)
    symmdiff: float        # Vol(A sym-diff A_lam)
    covered: float         # Vol(A & A_lam)
    nu_minus_total: float
    nu_plus_total: float
    lam: float
    n: int
    path: str              # 'band' or 'full'
    identity_residual: float


def volume_statistic(points, region, boundary_mode: str = 'torus',
                     method: str = 'auto', lam: float | None = None) -> VolumeRun:
    '''Overlap statistics of the cell union A_lam against region A.

    method: 'auto' tries the certified boundary collar for large inputs and
    falls back to the full diagram; 'full' and 'band' force a path.
    '''
    pts = np.asarray(points.points if hasattr(points, 'points') else points,
                     dtype=float)
    if lam is None:
        lam = float(len(pts))
    if method not in ('auto', 'full', 'band'):
        raise ValueError("method must be 'auto', 'full' or 'band'")
    if method in ('auto', 'band'):
        try:
            return _volume_band(pts, region, lam)
        except BandUnavailable:
            if method == 'band':
                raise
    return _volume_full(pts, region, boundary_mode, lam)


def estimate_volume(points, region, boundary_mode: str = 'torus') -> float:
    '''Plain volume estimate Vol(A_lam) of region A.'''
    return volume_statistic(points, region, boundary_mode).volume


def _volume_band(pts, region, lam) -> VolumeRun:
    band = BandDiagram(pts, region)
    vol_a = region.volume()
    member = region.contains(band.sub)
    cand = band.target & (band.d_lo <= band.radius)
    idx = np.flatnonzero(cand)
    polys = band.cell_polygons(idx)
    clip = np.array([region.clip_cell_area(p) for p in polys])
    s1 = float(np.sum((band.areas[idx] - clip)[member[idx]]))
    s2 = float(np.sum(clip[~member[idx]]))
    volume = vol_a + s1 - s2
    return VolumeRun(volume=volume, symmdiff=s1 + s2, covered=vol_a - s2,
                     nu_minus_total=lam * (s1 - s2),
                     nu_plus_total=lam * (s1 + s2),
                     lam=lam, n=len(pts), path='band', identity_residual=0.0)


def _volume_full(pts, region, boundary_mode, lam) -> VolumeRun:
    diagram = VoronoiDiagram(pts, boundary_mode)
    vol_a = region.volume()
    member = region.contains(diagram.sites)
    volume = float(diagram.areas[member].sum())
    s1, s2, clip_total = _boundary_sums(diagram, region, member)
    # the cell pieces of A partition it: two independent routes to the
    # boundary excess must coincide
    residual = lam * abs((volume - vol_a) - (s1 - s2))
    if residual > IDENTITY_TOL:
        raise HypothesisViolation(
            f'cell-sum identity residual {residual:.3e} exceeds {IDENTITY_TOL}')
    return VolumeRun(volume=volume, symmdiff=s1 + s2, covered=vol_a - s2,
                     nu_minus_total=lam * (s1 - s2),
                     nu_plus_total=lam * (s1 + s2),
                     lam=lam, n=len(pts), path='full',
                     identity_residual=residual)


def _boundary_sums(diagram: VoronoiDiagram, region, member):
    '''S1 = overshoot of A-cells past A, S2 = overshoot of outside cells into A.'''
    bounds_fn = getattr(region, 'boundary_distance_bounds', None)
    if bounds_fn is not None:
        d_lo, _ = bounds_fn(diagram.sites)
        cand = np.flatnonzero(d_lo <= diagram.cell_radii)
    else:
        cand = np.arange(diagram.n)
    torus = diagram.boundary_mode == 'torus'
    clip = np.empty(len(cand))
    if diagram._fallback_cells is not None:
        polys = [diagram.cell_polygon(int(i)) for i in cand]
    else:
        polys = batch_cell_polygons(diagram.aug_sites, diagram.ridge_points,
                                    diagram.ridge_p, diagram.ridge_q,
                                    diagram.ridge_ok, cand)
    for k, poly in enumerate(polys):
        clip[k] = region.cell_area_in(poly, torus=torus)
    inside = member[cand]
    s1 = float(np.sum((diagram.areas[cand] - clip)[inside]))
    s2 = float(np.sum(clip[~inside]))
    return s1, s2, float(clip.sum())


def nu_scores(points, region, boundary_mode: str = 'clip',
              lam: float | None = None):
    '''Per-site (nu_minus, nu_plus) score arrays plus the diagram.

    Always uses the full diagram; meant for tests and small inputs.
    '''
    pts = np.asarray(points.points if hasattr(points, 'points') else points,
                     dtype=float)
    if lam is None:
        lam = float(len(pts))
    diagram = VoronoiDiagram(pts, boundary_mode)
    member = region.contains(diagram.sites)
    torus = diagram.boundary_mode == 'torus'
    clip = np.empty(diagram.n)
    for i in range(diagram.n):
        clip[i] = region.cell_area_in(diagram.cell_polygon(i), torus=torus)
    over = diagram.areas - clip
    nu_minus = lam * np.where(member, over, -clip)
    nu_plus = lam * np.where(member, over, clip)
    return nu_minus, nu_plus, diagram
