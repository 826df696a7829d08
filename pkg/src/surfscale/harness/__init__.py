'''Replicated Monte Carlo experiments and their statistical reductions.'''

from .analysis import (CompareReport, NormalityReport, ScalingReport,
                       exact_ks, normality_check, poisson_binomial_compare,
                       scaling_regression, self_calibrate,
                       synthetic_power_table)
from .config import ExperimentConfig, config_from_dict, load_config
from .runner import (STATISTICS, Table, kappa_floor, resolve_statistic,
                     run_experiment)

__all__ = [
    'CompareReport', 'NormalityReport', 'ScalingReport', 'exact_ks',
    'normality_check', 'poisson_binomial_compare', 'scaling_regression',
    'self_calibrate', 'synthetic_power_table',
    'ExperimentConfig', 'config_from_dict', 'load_config',
    'STATISTICS', 'Table', 'kappa_floor', 'resolve_statistic',
    'run_experiment',
]
