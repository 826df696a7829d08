'''Replicated experiment execution with deterministic parallelism.

Each (level, replicate) job draws its own seed stream from the master
seed, so the value table is a pure function of the config no matter how
many workers computed it. Workers receive only picklable payloads and
rebuild the scene once per process; results are reduced in fixed
(level, replicate) order. Replicates that fail with a library error are
recorded and excluded, but more than one in a thousand failing aborts
the experiment.
'''

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import SurfscaleError
from ..rng import seed_record
from ..sampler import sample_binomial, sample_poisson
from ..scenes import Scene, build_scene
from ..scores.maximal import maximal_layer
from ..scores.navigate import navigate
from ..scores.surface import surface_statistic
from ..scores.volume import volume_statistic
from .config import ExperimentConfig

MAX_FAILURE_RATE = 0.001
KAPPA_FLOOR = 1e-12

WEIGHTS = {
    'x1': lambda p: p[:, 0],
    'x2': lambda p: p[:, 1],
}


class StatisticDef:
    '''A named per-sample statistic with a fixed auxiliary column set.'''

    def __init__(self, name, aux, evaluate, planar_only=False,
                 option_keys=()):
        self.name = name
        self.aux = tuple(aux)
        self.evaluate = evaluate
        self.planar_only = planar_only
        self.option_keys = frozenset(option_keys)


def _eval_maximal(ps, level, scene: Scene, opts, boundary_mode):
    pts = ps.points[scene.region.contains(ps.points)]
    mask, dup = maximal_layer(pts)
    count = int(mask.sum())
    d = scene.d
    return float(count), {
        'n': ps.n, 'duplicates': dup,
        'normalized': count / level ** ((d - 1) / d),
    }


def _eval_volume(ps, level, scene: Scene, opts, boundary_mode):
    run = volume_statistic(ps, scene.region, boundary_mode=boundary_mode,
                           method=opts.get('method', 'auto'), lam=level)
    return run.volume, {
        'n': run.n, 'symmdiff': run.symmdiff, 'covered': run.covered,
        'nu_minus_total': run.nu_minus_total,
        'nu_plus_total': run.nu_plus_total,
        'identity_residual': run.identity_residual, 'path': run.path,
    }


def _eval_surface(ps, level, scene: Scene, opts, boundary_mode):
    weight = opts.get('weight')
    run = surface_statistic(ps, scene.region, boundary_mode=boundary_mode,
                            weight=WEIGHTS[weight] if weight else None,
                            method=opts.get('method', 'auto'), lam=level)
    return run.alpha_total, {
        'n': run.n,
        'weighted_total': '' if run.weighted_total is None
        else run.weighted_total,
        'path': run.path,
    }


def _eval_navigate(ps, level, scene: Scene, opts, boundary_mode):
    start = tuple(opts.get('start', (0.1, 0.1)))
    target = tuple(opts.get('target', (0.9, 0.9)))
    res = navigate(ps.points, start, target, boundary_mode=boundary_mode)
    return res.total_length, {'n': ps.n, 'hops': res.hops}


def _eval_zero(ps, level, scene: Scene, opts, boundary_mode):
    return 0.0, {'n': ps.n}


STATISTICS = {
    'maximal': StatisticDef('maximal', ('n', 'duplicates', 'normalized'),
                            _eval_maximal),
    'volume': StatisticDef('volume',
                           ('n', 'symmdiff', 'covered', 'nu_minus_total',
                            'nu_plus_total', 'identity_residual', 'path'),
                           _eval_volume, planar_only=True,
                           option_keys=('method',)),
    'surface': StatisticDef('surface', ('n', 'weighted_total', 'path'),
                            _eval_surface, planar_only=True,
                            option_keys=('method', 'weight')),
    'navigate': StatisticDef('navigate', ('n', 'hops'), _eval_navigate,
                             planar_only=True,
                             option_keys=('start', 'target')),
    'zero': StatisticDef('zero', ('n',), _eval_zero),
}


def resolve_statistic(name: str, options: dict, scene: Scene) -> StatisticDef:
    stat = STATISTICS[name]
    unknown = sorted(set(options) - stat.option_keys)
    if unknown:
        raise ValueError('statistic %r takes no options %s'
                         % (name, ', '.join(unknown)))
    if stat.planar_only and scene.d != 2:
        raise ValueError('statistic %r needs a planar scene, got d=%d'
                         % (name, scene.d))
    weight = options.get('weight')
    if weight is not None and weight not in WEIGHTS:
        raise ValueError('unknown weight %r; available: %s'
                         % (weight, ', '.join(sorted(WEIGHTS))))
    return stat


@dataclass
class Table:
    '''Raw replicate table with provenance metadata.'''
    columns: list[str]
    rows: list[dict]
    meta: dict = field(default_factory=dict)

    def values(self, level=None, column: str = 'value') -> np.ndarray:
        picked = [r for r in self.rows
                  if r['ok'] and (level is None or r['level'] == level)]
        return np.array([float(r[column]) for r in picked])

    def levels(self) -> list:
        seen = []
        for r in self.rows:
            if r['level'] not in seen:
                seen.append(r['level'])
        return seen

    def to_csv(self, path: str) -> None:
        with open(path, 'w') as fh:
            fh.write('# %s\n' % json.dumps(self.meta, sort_keys=True))
            fh.write(','.join(self.columns) + '\n')
            for r in self.rows:
                fh.write(','.join(_cell(r[c]) for c in self.columns) + '\n')

    @classmethod
    def from_csv(cls, path: str) -> 'Table':
        with open(path) as fh:
            meta = json.loads(fh.readline().lstrip('# ').strip())
            columns = fh.readline().strip().split(',')
            rows = []
            for line in fh:
                if not line.strip():
                    continue
                rows.append(_parse_row(columns, line.rstrip('\n').split(',')))
        return cls(columns=columns, rows=rows, meta=meta)


def _cell(v) -> str:
    if isinstance(v, bool):
        return '1' if v else '0'
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_row(columns, raw) -> dict:
    row = dict(zip(columns, raw))
    for key in row:
        if key in ('level_index', 'replicate', 'n', 'hops', 'duplicates'):
            row[key] = int(row[key]) if row[key] != '' else ''
        elif key == 'ok':
            row[key] = row[key] == '1'
        elif key in ('seed', 'path', 'error'):
            pass
        else:
            try:
                row[key] = float(row[key])
            except ValueError:
                pass
    return row


# -- worker side -----------------------------------------------------------

_CONTEXT: dict = {}


def _context(key):
    if key not in _CONTEXT:
        scene_spec, statistic, opts_json, boundary_mode = key
        scene = build_scene(scene_spec)
        opts = json.loads(opts_json)
        stat = resolve_statistic(statistic, opts, scene)
        _CONTEXT[key] = (scene, stat, opts, boundary_mode)
    return _CONTEXT[key]


def _run_job(payload) -> dict:
    key, kind, level_index, level, rep, master_seed = payload
    scene, stat, opts, boundary_mode = _context(key)
    seed_key = (master_seed, 'exp', level_index, rep)
    row = {
        'level': level, 'level_index': level_index, 'replicate': rep,
        'seed': seed_record(*seed_key), 'ok': True, 'value': float('nan'),
        'error': '',
    }
    for c in stat.aux:
        row[c] = ''
    try:
        if kind == 'poisson':
            ps = sample_poisson(level, scene.density, seed_key)
        else:
            ps = sample_binomial(int(level), scene.density, seed_key)
        value, aux = stat.evaluate(ps, level, scene, opts, boundary_mode)
        row['value'] = float(value)
        row.update(aux)
    except SurfscaleError as exc:
        row['ok'] = False
        row['error'] = '%s: %s' % (type(exc).__name__, exc)
    return row


def execute_jobs(fn, payloads, workers: int) -> list:
    '''Run fn over payloads, reducing in submission order.'''
    if workers <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, payloads, chunksize=1))


def experiment_identity(cfg: ExperimentConfig) -> dict:
    '''Config record for table metadata.

    Worker count and output paths are execution details, not part of the
    experiment: tables produced with different worker counts must be
    byte-identical.
    '''
    record = cfg.to_dict()
    for key in ('workers', 'out_table', 'out_report', 'out_plot'):
        record.pop(key, None)
    return record


def kappa_floor(scene: Scene, grid: int = 64) -> float:
    '''Minimum sampled density over a regular probe grid of the cube.'''
    if scene.d == 2:
        g = np.linspace(0.0, 1.0, grid)
        pts = np.column_stack([a.ravel() for a in np.meshgrid(g, g)])
    else:
        g = np.linspace(0.0, 1.0, 17)
        pts = np.column_stack([a.ravel() for a in np.meshgrid(g, g, g)])
    return float(np.min(scene.density.values(pts)))


def run_experiment(cfg: ExperimentConfig) -> Table:
    '''Evaluate the configured statistic over the level grid.

    Returns the raw replicate table; writes it to cfg.out_table when set.
    '''
    scene = build_scene(cfg.scene)
    stat = resolve_statistic(cfg.statistic, cfg.statistic_options, scene)
    floor = kappa_floor(scene)
    key = (cfg.scene, cfg.statistic,
           json.dumps(cfg.statistic_options, sort_keys=True),
           cfg.boundary_mode)
    payloads = [(key, cfg.kind, li, level, rep, cfg.master_seed)
                for li, level in enumerate(cfg.levels)
                for rep in range(cfg.replicates)]
    rows = execute_jobs(_run_job, payloads, cfg.workers)
    failures = sum(1 for r in rows if not r['ok'])
    if failures > MAX_FAILURE_RATE * len(rows):
        examples = [r['error'] for r in rows if not r['ok']][:3]
        raise RuntimeError('replicate failure rate %d/%d too high: %s'
                           % (failures, len(rows), '; '.join(examples)))
    columns = (['level', 'level_index', 'replicate', 'seed', 'ok', 'value']
               + list(stat.aux) + ['error'])
    meta = {
        'config': experiment_identity(cfg),
        'kappa_floor': floor,
        'kappa_warning': floor <= KAPPA_FLOOR,
        'failures': failures,
    }
    table = Table(columns=columns, rows=rows, meta=meta)
    if cfg.out_table:
        table.to_csv(cfg.out_table)
    return table
