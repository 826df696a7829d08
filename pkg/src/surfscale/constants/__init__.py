'''Limiting constants: half-space Monte Carlo, surface integrals, closed forms.'''

from .halfspace import (LimitConstant, HalfSpaceExperiment, AlphaFaceScore,
                        ZetaDominanceScore, SlabIndicatorScore,
                        mu_universal, nu_universal)
from .surface_integrals import (mu_surface, sigma2_surface,
                                zeta_depth_profile, nu_zeta_quadrature,
                                sigma2_zeta_polyline)
from .closed_forms import mu_zeta_closed_form, mu_zeta_closed_form_2d
from .fixtures import load_fixtures, get_constant, fixture_path

__all__ = [
    'LimitConstant', 'HalfSpaceExperiment', 'AlphaFaceScore',
    'ZetaDominanceScore', 'SlabIndicatorScore', 'mu_universal', 'nu_universal',
    'mu_surface', 'sigma2_surface', 'zeta_depth_profile', 'nu_zeta_quadrature',
    'sigma2_zeta_polyline', 'mu_zeta_closed_form', 'mu_zeta_closed_form_2d',
    'load_fixtures', 'get_constant', 'fixture_path',
]
