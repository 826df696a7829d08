'''Per-point scores and surface-order statistics over Voronoi input.'''

from .volume import (VolumeRun, volume_statistic, estimate_volume, nu_scores)
from .surface import (SurfaceRun, surface_statistic, estimate_surface,
                      alpha_scores, boundary_integral)
from .maximal import (maximal_layer, count_maximal, zeta_scores,
                      maximal_statistic)
from .navigate import NavigationResult, navigate, validate_path
from .diagnostics import stabilization_tail, moment_envelope

__all__ = [
    'VolumeRun', 'volume_statistic', 'estimate_volume', 'nu_scores',
    'SurfaceRun', 'surface_statistic', 'estimate_surface', 'alpha_scores',
    'boundary_integral',
    'maximal_layer', 'count_maximal', 'zeta_scores', 'maximal_statistic',
    'NavigationResult', 'navigate', 'validate_path',
    'stabilization_tail', 'moment_envelope',
]
