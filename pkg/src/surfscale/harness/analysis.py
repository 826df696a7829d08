'''Statistical reductions of replicate tables: log-log scaling fits,
normality distances, and coupled Poisson-vs-binomial variance gaps.

Slope confidence intervals come from a replicate-level bootstrap (the
replicates within each level are resampled, the whole fit redone), so
they reflect the finite replicate budget rather than a residual-based
formula that the handful of grid points could not support.
'''

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from ..errors import DegenerateVariance, SurfscaleError
from ..rng import seed_record, stream
from ..sampler import couple_poissonized
from ..scenes import build_scene
from .config import ExperimentConfig
from .runner import (MAX_FAILURE_RATE, Table, execute_jobs,
                     experiment_identity, kappa_floor, resolve_statistic)

BOOTSTRAP_DEFAULT = 1000


@dataclass
class ScalingReport:
    '''Per-level moments and fitted log-log slopes with bootstrap CIs.'''
    column: str
    levels: list
    per_level: list
    mean_slope: float | None
    mean_ci: tuple | None
    mean_target: float | None
    var_slope: float
    var_ci: tuple
    var_target: float | None
    tolerance: float
    mean_ok: bool | None
    var_ok: bool | None
    bootstrap: int
    dropped_resamples: int

    def to_json(self, path: str | None = None) -> str:
        text = json.dumps(asdict(self), indent=2, sort_keys=True)
        if path:
            with open(path, 'w') as fh:
                fh.write(text + '\n')
        return text


def _ols_slope(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    return float(xc @ (y - y.mean()) / (xc @ xc))


def _bootstrap_slopes(values_by_level, logx, rng, b):
    '''Vectorized per-resample mean/variance slopes.

    Returns (mean_slopes, var_slopes, dropped) where resamples with a
    nonpositive mean or variance at any level are dropped from the
    corresponding slope sample.
    '''
    L = len(values_by_level)
    means = np.empty((b, L))
    varis = np.empty((b, L))
    for li, v in enumerate(values_by_level):
        r = len(v)
        idx = rng.integers(0, r, size=(b, r))
        draws = v[idx]
        means[:, li] = draws.mean(axis=1)
        varis[:, li] = draws.var(axis=1, ddof=1)
    xc = logx - logx.mean()
    den = float(xc @ xc)

    def slopes(mat):
        good = np.all(mat > 0.0, axis=1)
        ly = np.log(mat[good])
        ly_c = ly - ly.mean(axis=1, keepdims=True)
        return ly_c @ xc / den, int(b - good.sum())

    mean_slopes, drop_m = slopes(means)
    var_slopes, drop_v = slopes(varis)
    return mean_slopes, var_slopes, varis, drop_m + drop_v


def exact_ks(values: np.ndarray) -> float:
    '''Exact one-sample Kolmogorov distance of standardized values to N(0,1).'''
    v = np.asarray(values, dtype=float)
    sd = v.std(ddof=1)
    if sd == 0.0:
        raise DegenerateVariance('constant sample cannot be standardized')
    z = (v - v.mean()) / sd
    return float(stats.kstest(z, 'norm').statistic)


def scaling_regression(table: Table, mean_exponent_target: float | None = None,
                       var_exponent_target: float | None = None,
                       column: str = 'value', tolerance: float = 0.1,
                       bootstrap: int = BOOTSTRAP_DEFAULT,
                       seed: int = 0) -> ScalingReport:
    '''Fit, with bootstrap CIs, the log-log slopes of mean and variance.'''
    levels = table.levels()
    if len(levels) < 3:
        raise ValueError('scaling regression needs at least 3 levels')
    values = [table.values(level, column) for level in levels]
    for level, v in zip(levels, values):
        if len(v) < 2:
            raise ValueError('level %r has fewer than 2 replicates' % level)
        if v.var(ddof=1) <= 0.0:
            raise DegenerateVariance('variance not positive at level %r'
                                     % level)
    x = np.log(np.asarray(levels, dtype=float))
    means = np.array([v.mean() for v in values])
    varis = np.array([v.var(ddof=1) for v in values])
    rng = stream(seed, 'bootstrap', column)
    bs_mean, bs_var, boot_varis, dropped = _bootstrap_slopes(
        values, x, rng, bootstrap)
    var_slope = _ols_slope(x, np.log(varis))
    var_ci = (float(np.percentile(bs_var, 2.5)),
              float(np.percentile(bs_var, 97.5)))
    if np.all(means > 0.0):
        mean_slope = _ols_slope(x, np.log(means))
        mean_ci = (float(np.percentile(bs_mean, 2.5)),
                   float(np.percentile(bs_mean, 97.5)))
    else:
        mean_slope, mean_ci = None, None
    per_level = []
    for li, (level, v) in enumerate(zip(levels, values)):
        entry = {
            'level': level, 'count': int(len(v)),
            'mean': float(v.mean()),
            'sem': float(v.std(ddof=1) / np.sqrt(len(v))),
            'variance': float(v.var(ddof=1)),
            'variance_se': float(boot_varis[:, li].std(ddof=1)),
        }
        try:
            entry['ks'] = exact_ks(v)
        except DegenerateVariance:
            entry['ks'] = None
        per_level.append(entry)
    mean_ok = (None if mean_exponent_target is None or mean_slope is None
               else abs(mean_slope - mean_exponent_target) <= tolerance)
    var_ok = (None if var_exponent_target is None
              else abs(var_slope - var_exponent_target) <= tolerance)
    return ScalingReport(
        column=column, levels=list(levels), per_level=per_level,
        mean_slope=mean_slope, mean_ci=mean_ci,
        mean_target=mean_exponent_target,
        var_slope=var_slope, var_ci=var_ci,
        var_target=var_exponent_target,
        tolerance=tolerance, mean_ok=mean_ok, var_ok=var_ok,
        bootstrap=bootstrap, dropped_resamples=dropped)


@dataclass
class NormalityReport:
    '''Exact KS distances per level after per-level standardization.'''
    column: str
    rows: list
    decreasing: bool

    def to_json(self, path: str | None = None) -> str:
        text = json.dumps(asdict(self), indent=2, sort_keys=True)
        if path:
            with open(path, 'w') as fh:
                fh.write(text + '\n')
        return text


def normality_check(table: Table, column: str = 'value',
                    min_replicates: int = 100) -> NormalityReport:
    '''Standardize each level and measure the Kolmogorov distance to normal.

    A level with zero spread is reported as degenerate instead of
    carrying a distance.
    '''
    rows = []
    distances = []
    for level in table.levels():
        v = table.values(level, column)
        if len(v) < min_replicates:
            raise ValueError('level %r has %d replicates; need %d'
                             % (level, len(v), min_replicates))
        try:
            ks = exact_ks(v)
            rows.append({'level': level, 'count': int(len(v)), 'ks': ks,
                         'degenerate': False})
            distances.append(ks)
        except DegenerateVariance:
            rows.append({'level': level, 'count': int(len(v)), 'ks': None,
                         'degenerate': True})
    decreasing = (len(distances) >= 2
                  and all(b <= a for a, b in zip(distances, distances[1:])))
    return NormalityReport(column=column, rows=rows, decreasing=decreasing)


# -- coupled Poisson vs binomial -------------------------------------------

_COMPARE_CONTEXT: dict = {}


def _compare_context(key):
    if key not in _COMPARE_CONTEXT:
        scene_spec, statistic, opts_json, boundary_mode = key
        scene = build_scene(scene_spec)
        opts = json.loads(opts_json)
        stat = resolve_statistic(statistic, opts, scene)
        _COMPARE_CONTEXT[key] = (scene, stat, opts, boundary_mode)
    return _COMPARE_CONTEXT[key]


def _coupled_job(payload) -> dict:
    key, level_index, n, rep, master_seed = payload
    scene, stat, opts, boundary_mode = _compare_context(key)
    seed_key = (master_seed, 'couple', level_index, rep)
    row = {
        'level': n, 'level_index': level_index, 'replicate': rep,
        'seed': seed_record(*seed_key), 'ok': True,
        'value': float('nan'), 'value_poisson': float('nan'),
        'n_poisson': '', 'error': '',
    }
    try:
        binom, poiss = couple_poissonized(n, scene.density, seed_key)
        vb, _ = stat.evaluate(binom, float(n), scene, opts, boundary_mode)
        vp, _ = stat.evaluate(poiss, float(n), scene, opts, boundary_mode)
        row['value'] = float(vb)
        row['value_poisson'] = float(vp)
        row['n_poisson'] = poiss.n
    except SurfscaleError as exc:
        row['ok'] = False
        row['error'] = '%s: %s' % (type(exc).__name__, exc)
    return row


@dataclass
class CompareReport:
    '''Variance curves of coupled binomial/poissonized replicates.'''
    statistic: str
    gap_exponent: float
    rows: list
    normalized_gaps: list
    gap_decreasing: bool
    meta: dict = field(default_factory=dict)

    def to_json(self, path: str | None = None) -> str:
        text = json.dumps(asdict(self), indent=2, sort_keys=True)
        if path:
            with open(path, 'w') as fh:
                fh.write(text + '\n')
        return text


def poisson_binomial_compare(cfg: ExperimentConfig,
                             bootstrap: int = BOOTSTRAP_DEFAULT,
                             seed: int = 0) -> tuple[Table, CompareReport]:
    '''Run coupled replicates along cfg.n_grid and compare variances.

    The normalized gap divides |Var_binomial - Var_poisson| by the
    surface-order scale n^((d-1)/d), or by the volume-order scale
    n^(-(d+1)/d) for the volume statistic whose variance itself decays.
    '''
    if not cfg.n_grid:
        raise ValueError('poisson_binomial_compare needs n_grid')
    scene = build_scene(cfg.scene)
    resolve_statistic(cfg.statistic, cfg.statistic_options, scene)
    key = (cfg.scene, cfg.statistic,
           json.dumps(cfg.statistic_options, sort_keys=True),
           cfg.boundary_mode)
    payloads = [(key, li, n, rep, cfg.master_seed)
                for li, n in enumerate(cfg.n_grid)
                for rep in range(cfg.replicates)]
    rows = execute_jobs(_coupled_job, payloads, cfg.workers)
    failures = sum(1 for r in rows if not r['ok'])
    if failures > MAX_FAILURE_RATE * len(rows):
        examples = [r['error'] for r in rows if not r['ok']][:3]
        raise RuntimeError('replicate failure rate %d/%d too high: %s'
                           % (failures, len(rows), '; '.join(examples)))
    columns = ['level', 'level_index', 'replicate', 'seed', 'ok',
               'value', 'value_poisson', 'n_poisson', 'error']
    meta = {'config': experiment_identity(cfg), 'failures': failures,
            'kappa_floor': kappa_floor(scene)}
    table = Table(columns=columns, rows=rows, meta=meta)
    if cfg.out_table:
        table.to_csv(cfg.out_table)

    d = scene.d
    if cfg.statistic == 'volume':
        gap_exponent = -(d + 1) / d
    else:
        gap_exponent = (d - 1) / d
    rng = stream(seed, 'compare-bootstrap')
    report_rows = []
    normalized = []
    for li, n in enumerate(cfg.n_grid):
        vb = table.values(n, 'value')
        vp = table.values(n, 'value_poisson')
        var_b = float(vb.var(ddof=1))
        var_p = float(vp.var(ddof=1))
        gap = abs(var_b - var_p)
        scale = float(n) ** gap_exponent
        plateau = float(n) ** (-gap_exponent)
        # paired resampling keeps the coupling between the two columns
        idx = rng.integers(0, len(vb), size=(bootstrap, len(vb)))
        bb = vb[idx].var(axis=1, ddof=1)
        bp = vp[idx].var(axis=1, ddof=1)
        gaps = np.abs(bb - bp)
        report_rows.append({
            'n': int(n), 'count': int(len(vb)),
            'var_binomial': var_b, 'var_poisson': var_p,
            'gap': gap, 'normalized_gap': gap / scale,
            'normalized_gap_se': float(gaps.std(ddof=1)) / scale,
            'plateau_binomial': var_b * plateau,
            'plateau_poisson': var_p * plateau,
            'plateau_binomial_se': float(bb.std(ddof=1)) * plateau,
            'plateau_poisson_se': float(bp.std(ddof=1)) * plateau,
        })
        normalized.append(gap / scale)
    decreasing = (len(normalized) >= 2
                  and all(b <= a for a, b in zip(normalized, normalized[1:])))
    report = CompareReport(statistic=cfg.statistic,
                           gap_exponent=gap_exponent, rows=report_rows,
                           normalized_gaps=normalized,
                           gap_decreasing=decreasing, meta=meta)
    if cfg.out_report:
        report.to_json(cfg.out_report)
    return table, report


# -- harness self-calibration ----------------------------------------------

def synthetic_power_table(levels, replicates: int, mean_exponent: float,
                          var_exponent: float, seed: int = 0,
                          noise: float = 0.05) -> Table:
    '''Synthetic replicates with exact power-law mean and variance.

    value = level^m + level^(v/2) * noise * N(0, 1), so the mean follows
    level^m and the variance (noise^2) * level^v.
    '''
    rows = []
    for li, level in enumerate(levels):
        rng = stream(seed, 'synthetic', li)
        draws = (float(level) ** mean_exponent
                 + float(level) ** (0.5 * var_exponent) * noise
                 * rng.standard_normal(replicates))
        for rep, v in enumerate(draws):
            rows.append({'level': level, 'level_index': li, 'replicate': rep,
                         'seed': seed_record(seed, 'synthetic', li), 'ok': True,
                         'value': float(v), 'error': ''})
    columns = ['level', 'level_index', 'replicate', 'seed', 'ok', 'value',
               'error']
    return Table(columns=columns, rows=rows,
                 meta={'synthetic': True, 'mean_exponent': mean_exponent,
                       'var_exponent': var_exponent})


def self_calibrate(levels, mean_exponent: float, var_exponent: float,
                   replicates: int = 200, seed: int = 0,
                   tolerance: float = 0.1) -> ScalingReport:
    '''Run the scaling fit on synthetic power-law data before a real scene.

    Raises RuntimeError when the fit misses its own generating exponents,
    which would mean the regression (not the scene) is broken.
    '''
    table = synthetic_power_table(levels, replicates, mean_exponent,
                                  var_exponent, seed=seed)
    report = scaling_regression(table, mean_exponent_target=mean_exponent,
                                var_exponent_target=var_exponent,
                                tolerance=tolerance, seed=seed)
    if not report.mean_ok or not report.var_ok:
        raise RuntimeError(
            'harness self-calibration failed: fitted slopes (%s, %s) '
            'miss targets (%g, %g)' % (report.mean_slope, report.var_slope,
                                       mean_exponent, var_exponent))
    return report
