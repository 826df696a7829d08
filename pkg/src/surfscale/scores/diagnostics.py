'''Empirical checks of the locality assumptions behind the score sums.

Two knobs matter for surface-order behavior: how fast the influence radius
of a single point decays (exponential stabilization), and whether scaled
score moments stay bounded along the intensity grid. Neither is provable
from one sample, so these helpers fit the observable proxies and report.
'''

from __future__ import annotations

import numpy as np

from ..errors import DegenerateVariance
from ..rng import stream
from ..voronoi import VoronoiDiagram


def collect_stabilization_radii(points, boundary_mode: str = 'torus',
                                sites: int = 64, seed: int = 0,
                                diagram: VoronoiDiagram | None = None,
                                scale: float | None = None) -> np.ndarray:
    '''Union diameters of cell-plus-neighbors for a random subset of sites.

    Scaled by lam**(1/d) (lam defaults to the point count) so values are
    comparable across intensities.
    '''
    pts = np.asarray(points.points if hasattr(points, 'points') else points,
                     dtype=float)
    if diagram is None:
        diagram = VoronoiDiagram(pts, boundary_mode=boundary_mode)
    n = len(diagram.sites)
    rng = stream(seed, 'stab-radii')
    chosen = rng.choice(n, size=min(sites, n), replace=False)
    if scale is None:
        scale = float(n) ** (1.0 / pts.shape[1])
    return np.array([diagram.stabilization_diagnostic(int(i)) * scale
                     for i in chosen])


def stabilization_tail(radii, bins: int = 10) -> dict:
    '''Log-linear fit of the survival function of scaled radii.

    Returns the fitted decay rate (positive when the tail is at most
    exponential over the sampled range) together with the raw curve.
    '''
    r = np.sort(np.asarray(radii, dtype=float))
    if len(r) < 8:
        raise DegenerateVariance('need at least 8 radii for a tail fit')
    qs = np.linspace(0.30, 0.95, bins)
    thresholds = np.quantile(r, qs)
    survival = (r[None, :] > thresholds[:, None]).mean(axis=1)
    keep = survival > 0
    if keep.sum() < 3:
        raise DegenerateVariance('survival curve too short to fit')
    slope, intercept = np.polyfit(thresholds[keep], np.log(survival[keep]), 1)
    return {
        'thresholds': thresholds,
        'survival': survival,
        'decay_rate': float(-slope),
        'intercept': float(intercept),
        'exponential_ok': bool(slope < 0),
    }


def moment_envelope(samples_by_level: dict, order: int = 4) -> dict:
    '''Standardized moments of a statistic across intensity levels.

    Bounded values along the grid back the uniform moment condition that
    variance asymptotics and the CLT lean on.
    '''
    rows = []
    for level in sorted(samples_by_level):
        v = np.asarray(samples_by_level[level], dtype=float)
        centered = v - v.mean()
        sd = centered.std()
        if sd == 0.0:
            raise DegenerateVariance('constant sample at level %r' % (level,))
        rows.append({
            'level': level,
            'n': len(v),
            'moment': float(np.mean((centered / sd) ** order)),
        })
    return {
        'order': order,
        'rows': rows,
        'max_moment': max(row['moment'] for row in rows),
    }
