'''Shared replicate tables for the acceptance suite.

Heavy tables are cached as CSV under tests/_cache with a sidecar JSON
recording the wall time of the original computation. Every table is a
pure function of its config and seeds, so a cache hit holds exactly the
bytes a recompute would produce; deleting _cache reruns everything.
'''

from __future__ import annotations

import json
import time
from pathlib import Path

import numpy as np

from surfscale.constants import (HalfSpaceExperiment, ZetaDominanceScore,
                                 AlphaFaceScore, mu_universal)
from surfscale.constants.surface_integrals import sigma2_surface
from surfscale.geometry.surfaces import PolygonalChain
from surfscale.harness import (CompareReport, ExperimentConfig, Table,
                               poisson_binomial_compare, run_experiment)

CACHE = Path(__file__).resolve().parent / '_cache'

LEVEL_EXPONENTS = range(12, 18)
N_GRID = tuple(2 ** k for k in range(12, 17))


def cached_experiment(name: str, cfg: ExperimentConfig):
    CACHE.mkdir(exist_ok=True)
    csv = CACHE / (name + '.csv')
    side = CACHE / (name + '.elapsed.json')
    if csv.exists() and side.exists():
        elapsed = json.loads(side.read_text())['elapsed']
        return Table.from_csv(str(csv)), elapsed
    cfg = cfg.with_overrides(out_table=str(csv))
    t0 = time.time()
    table = run_experiment(cfg)
    elapsed = time.time() - t0
    side.write_text(json.dumps({'elapsed': elapsed}))
    return table, elapsed


def merge_tables(tables) -> Table:
    '''Concatenate per-level tables that share a column layout.'''
    first = tables[0]
    rows = []
    for t in tables:
        if t.columns != first.columns:
            raise ValueError('cannot merge tables with different columns')
        rows.extend(t.rows)
    return Table(columns=list(first.columns), rows=rows,
                 meta={'merged': [t.meta.get('config') for t in tables]})


def criterion1_table():
    '''Maximal count at the top intensity only, criterion-sized.'''
    cfg = ExperimentConfig(scene='triangle-pareto', statistic='maximal',
                           lambda_grid=(2.0 ** 17,), replicates=200,
                           master_seed=811001)
    return cached_experiment('maximal-c1', cfg)


def maximal_level_table(k: int):
    cfg = ExperimentConfig(scene='triangle-pareto', statistic='maximal',
                           lambda_grid=(float(2 ** k),), replicates=500,
                           master_seed=811100 + k)
    return cached_experiment('maximal-l%02d' % k, cfg)


def maximal_grid_table() -> Table:
    return merge_tables([maximal_level_table(k)[0]
                         for k in LEVEL_EXPONENTS])


def volume_level_table(k: int):
    cfg = ExperimentConfig(scene='disk:0.25', statistic='volume',
                           lambda_grid=(float(2 ** k),), replicates=500,
                           master_seed=811200 + k)
    return cached_experiment('volume-l%02d' % k, cfg)


def volume_grid_table() -> Table:
    return merge_tables([volume_level_table(k)[0]
                         for k in LEVEL_EXPONENTS])


def volume_fixed_table():
    '''Volume at lambda = 10^4, criterion-sized.'''
    cfg = ExperimentConfig(scene='disk:0.25', statistic='volume',
                           lambda_grid=(1.0e4,), replicates=500,
                           master_seed=811301)
    return cached_experiment('volume-c3', cfg)


def surface_table():
    cfg = ExperimentConfig(scene='disk:0.3', statistic='surface',
                           lambda_grid=(2.0 ** 17,), replicates=100,
                           master_seed=811401,
                           statistic_options={'weight': 'x1'})
    return cached_experiment('surface-c5', cfg)


def compare_artifacts(statistic: str):
    '''Coupled binomial/poissonized table and report for one statistic.'''
    CACHE.mkdir(exist_ok=True)
    csv = CACHE / ('compare-%s.csv' % statistic)
    rep_path = CACHE / ('compare-%s.report.json' % statistic)
    if csv.exists() and rep_path.exists():
        return (Table.from_csv(str(csv)),
                CompareReport(**json.loads(rep_path.read_text())))
    cfg = ExperimentConfig(scene='disk:0.25', statistic=statistic,
                           n_grid=N_GRID, replicates=200,
                           master_seed=811501, out_table=str(csv),
                           out_report=str(rep_path))
    table, report = poisson_binomial_compare(cfg, seed=811501)
    return table, report


def sigma2_mc_record() -> dict:
    '''Monte Carlo variance constant for the maximal count on the
    diagonal interface at local intensity 2.'''
    CACHE.mkdir(exist_ok=True)
    path = CACHE / 'sigma2-mc.json'
    if path.exists():
        return json.loads(path.read_text())
    hyp = PolygonalChain(np.array([[1.0, 0.0], [0.0, 1.0]]))
    cfg = HalfSpaceExperiment(halfwidth=8.0, u_max=3.0, z_max=6.5,
                              replicates=20000, pair_replicates=2500,
                              pair_u_nodes=13, seed=811601)
    t0 = time.time()
    rec = sigma2_surface(ZetaDominanceScore(), hyp, 2.0, cfg,
                         surface_nodes=2)
    out = {'value': rec.value, 'std_error': rec.std_error,
           'method': rec.method, 'elapsed': time.time() - t0}
    path.write_text(json.dumps(out, sort_keys=True))
    return out


def rescale_records() -> dict:
    '''Independent mu runs at intensities 1 and 2 for the face score.'''
    CACHE.mkdir(exist_ok=True)
    path = CACHE / 'rescale-mc.json'
    if path.exists():
        return json.loads(path.read_text())
    out = {}
    for tau, seed in ((1.0, 811701), (2.0, 811702)):
        cfg = HalfSpaceExperiment(tau=tau, halfwidth=6.5, u_max=3.0,
                                  u_nodes=32, replicates=3000, seed=seed)
        rec = mu_universal(AlphaFaceScore(), 2, cfg)
        out['tau%g' % tau] = {'value': rec.value,
                              'std_error': rec.std_error}
    path.write_text(json.dumps(out, sort_keys=True))
    return out


WARMS = {
    'maximal-c1': criterion1_table,
    'volume-c3': volume_fixed_table,
    'surface-c5': surface_table,
    'compare-maximal': lambda: compare_artifacts('maximal'),
    'compare-volume': lambda: compare_artifacts('volume'),
    'sigma2-mc': sigma2_mc_record,
    'rescale-mc': rescale_records,
}
for _k in LEVEL_EXPONENTS:
    WARMS['maximal-l%02d' % _k] = (
        lambda k=_k: maximal_level_table(k))
    WARMS['volume-l%02d' % _k] = (
        lambda k=_k: volume_level_table(k))


def main(argv=None) -> int:
    import argparse
    ap = argparse.ArgumentParser(description='prebuild acceptance tables')
    ap.add_argument('names', nargs='*', default=[],
                    help='table names (default: all)')
    args = ap.parse_args(argv)
    names = args.names or sorted(WARMS)
    for name in names:
        t0 = time.time()
        WARMS[name]()
        print('%s ready (%.1fs)' % (name, time.time() - t0), flush=True)
    return 0


if __name__ == '__main__':
    import sys
    sys.exit(main())
