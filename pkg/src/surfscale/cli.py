'''Command-line front end: samples, diagrams, estimators, constants,
and the replicated verification experiments.

Every stochastic subcommand requires an explicit --seed; nothing ever
seeds from the clock, so a command line is a complete description of
its output and rerunning it reproduces the bytes. Validation problems
(unknown names, bad grids, malformed configs) exit with status 2,
runtime failures with 1.
'''

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .constants import (AlphaFaceScore, HalfSpaceExperiment,
                        ZetaDominanceScore, get_constant, mu_universal,
                        nu_universal)
from .errors import SurfscaleError, UnknownName
from .harness import (ExperimentConfig, config_from_dict, load_config,
                      normality_check, poisson_binomial_compare,
                      run_experiment, scaling_regression, self_calibrate)
from .harness.runner import STATISTICS
from .plots import log_log_plot, qq_plot
from .sampler import sample_poisson, save_csv
from .scenes import build_scene, scene_names
from .scores.maximal import maximal_statistic
from .scores.navigate import navigate
from .scores.surface import surface_statistic
from .scores.volume import volume_statistic
from .voronoi import VoronoiDiagram

DEFAULT_TARGETS = {
    # (mean slope, variance slope) of the raw statistic per dimension
    ('maximal', 2): (0.5, 0.5),
    ('maximal', 3): (2.0 / 3.0, 2.0 / 3.0),
    ('volume', 2): (None, -1.5),
    ('surface', 2): (0.5, 0.5),
}


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + '\n'
    sys.stdout.write(text)
    if out:
        with open(out, 'w') as fh:
            fh.write(text)


def _parse_levels(spec: str) -> tuple[float, ...]:
    '''"4096:131072" doubles between the ends; "a,b,c" lists levels.'''
    if ':' in spec:
        lo_s, hi_s = spec.split(':', 1)
        lo, hi = float(lo_s), float(hi_s)
        if lo <= 0 or hi < lo:
            raise ValueError('bad level range %r' % spec)
        levels = []
        v = lo
        while v <= hi * (1 + 1e-9):
            levels.append(v)
            v *= 2.0
        return tuple(levels)
    return tuple(float(tok) for tok in spec.split(',') if tok)


def _parse_point(spec: str) -> tuple[float, float]:
    parts = [float(tok) for tok in spec.split(',')]
    if len(parts) != 2:
        raise ValueError('expected "x,y", got %r' % spec)
    return parts[0], parts[1]


def _sample_for(args):
    scene = build_scene(args.scene)
    return scene, sample_poisson(args.lam, scene.density, (args.seed, 'cli'))


def cmd_sample(args) -> None:
    scene, ps = _sample_for(args)
    if args.out:
        save_csv(ps, args.out)
    _emit({'scene': scene.name, 'lambda': args.lam, 'n_points': ps.n,
           'seed': ps.seed, 'out': args.out}, None)


def cmd_voronoi(args) -> None:
    scene, ps = _sample_for(args)
    diagram = VoronoiDiagram(ps.points, boundary_mode=args.boundary)
    if args.out:
        with open(args.out, 'w') as fh:
            fh.write('site_index,x,y,area\n')
            for i in range(diagram.n):
                fh.write('%d,%s,%s,%s\n'
                         % (i, repr(float(diagram.sites[i, 0])),
                            repr(float(diagram.sites[i, 1])),
                            repr(float(diagram.areas[i]))))
    _emit({'scene': scene.name, 'n_sites': int(diagram.n),
           'area_total': float(diagram.areas.sum()),
           'boundary_mode': diagram.boundary_mode, 'out': args.out}, None)


def cmd_estimate_volume(args) -> None:
    scene, ps = _sample_for(args)
    run = volume_statistic(ps, scene.region, boundary_mode=args.boundary,
                           lam=args.lam)
    _emit({'scene': scene.name, 'lambda': args.lam,
           'vol_estimate': run.volume, 'sym_diff': run.symmdiff,
           'vol_target': scene.region.volume(), 'n_points': ps.n,
           'path': run.path}, args.out)


def cmd_estimate_surface(args) -> None:
    scene, ps = _sample_for(args)
    mu = get_constant('mu(alpha,1)')
    weight = None
    if args.weight:
        from .harness.runner import WEIGHTS
        if args.weight not in WEIGHTS:
            raise UnknownName('weight', args.weight, WEIGHTS)
        weight = WEIGHTS[args.weight]
    run = surface_statistic(ps, scene.region, boundary_mode=args.boundary,
                            weight=weight, lam=args.lam)
    out = {'scene': scene.name, 'lambda': args.lam,
           'raw_interface': run.alpha_total,
           'surface_estimate': run.alpha_total / mu.value,
           'mu_alpha': mu.value, 'mu_alpha_std_error': mu.std_error,
           'n_points': ps.n}
    if weight is not None:
        out['weighted_estimate'] = run.weighted_total / mu.value
    _emit(out, args.out)


def cmd_maximal(args) -> None:
    scene, ps = _sample_for(args)
    stat = maximal_statistic(ps, scene.region, lam=args.lam)
    stat['scene'] = scene.name
    _emit(stat, args.out)


def cmd_navigate(args) -> None:
    scene, ps = _sample_for(args)
    res = navigate(ps.points, _parse_point(args.start),
                   _parse_point(args.target), boundary_mode=args.boundary)
    _emit({'scene': scene.name, 'hops': res.hops,
           'total_length': res.total_length,
           'path': [int(i) for i in res.path]}, args.out)


def cmd_constants(args) -> None:
    if args.dim != 1:
        raise ValueError('only codimension-1 constants in d=2 are supported '
                         '(--dim 1)')
    if args.frozen:
        record = get_constant('%s(%s,1)' % (args.which, args.xi),
                              label=args.label)
        _emit({'name': record.name, 'value': record.value,
               'std_error': record.std_error, 'method': record.method,
               'truncation_report': record.truncation_report,
               'frozen': True}, args.out)
        return
    if args.xi == 'alpha':
        xi = AlphaFaceScore()
        normal = (0.0, 1.0)
        halfwidth = 6.5 if args.halfwidth is None else args.halfwidth
    else:
        xi = ZetaDominanceScore()
        m = -args.slope
        if m <= 0:
            raise ValueError('zeta needs a negative --slope')
        normal = (m / np.hypot(m, 1.0), 1.0 / np.hypot(m, 1.0))
        # the dominance cone reaches much farther sideways than a shared
        # cell face, so the box must be wider for the same insertion depth
        halfwidth = 8.0 if args.halfwidth is None else args.halfwidth
    cfg = HalfSpaceExperiment(
        tau=args.tau, halfwidth=halfwidth, u_max=args.u_max,
        z_max=args.z_max, replicates=args.reps,
        pair_replicates=args.pair_reps, pair_u_nodes=args.pair_u_nodes,
        z_nodes=args.z_nodes, seed=args.seed, normal=normal)
    if args.which == 'mu':
        record = mu_universal(xi, 2, cfg)
    else:
        record = nu_universal(xi, 2, cfg)
    _emit({'name': record.name, 'value': record.value,
           'std_error': record.std_error, 'method': record.method,
           'truncation_report': record.truncation_report,
           'frozen': False}, args.out)


def _experiment_config(args, grid_field: str) -> ExperimentConfig:
    overrides = {
        'scene': args.scene,
        'statistic': args.statistic,
        grid_field: list(_parse_levels(args.levels)) if args.levels else None,
        'replicates': args.reps,
        'master_seed': args.seed,
        'boundary_mode': args.boundary,
        'workers': args.workers,
        'out_table': args.table,
        'out_report': args.out,
    }
    if args.config:
        return load_config(args.config, overrides)
    merged = {k: v for k, v in overrides.items() if v is not None}
    return config_from_dict(merged)


def cmd_verify_scaling(args) -> None:
    cfg = _experiment_config(args, 'lambda_grid')
    scene = build_scene(cfg.scene)
    key = (cfg.statistic, scene.d)
    mean_t, var_t = DEFAULT_TARGETS.get(key, (None, None))
    if args.mean_target is not None:
        mean_t = args.mean_target
    if args.var_target is not None:
        var_t = args.var_target
    column = args.column
    self_calibrate(cfg.levels, mean_t if mean_t is not None else 0.5,
                   var_t if var_t is not None else 0.5,
                   seed=cfg.master_seed)
    table = run_experiment(cfg)
    report = scaling_regression(table, mean_exponent_target=mean_t,
                                var_exponent_target=var_t, column=column,
                                tolerance=args.tolerance,
                                seed=cfg.master_seed)
    if args.plot:
        series = [('variance', report.levels,
                   [r['variance'] for r in report.per_level])]
        if all(r['mean'] > 0 for r in report.per_level):
            series.append(('mean', report.levels,
                           [r['mean'] for r in report.per_level]))
        log_log_plot(series, args.plot,
                     title='%s / %s' % (cfg.scene, cfg.statistic))
    sys.stdout.write(report.to_json(args.out) + '\n')


def cmd_verify_clt(args) -> None:
    cfg = _experiment_config(args, 'lambda_grid')
    table = run_experiment(cfg)
    report = normality_check(table, column=args.column,
                             min_replicates=args.min_reps)
    if args.plot:
        top = table.levels()[-1]
        qq_plot(table.values(top, args.column), args.plot,
                title='%s at level %g' % (cfg.statistic, top))
    sys.stdout.write(report.to_json(args.out) + '\n')


def cmd_compare_binomial(args) -> None:
    cfg = _experiment_config(args, 'n_grid')
    _, report = poisson_binomial_compare(cfg, seed=cfg.master_seed)
    if args.plot:
        series = [
            ('binomial', [r['n'] for r in report.rows],
             [r['var_binomial'] for r in report.rows]),
            ('poisson', [r['n'] for r in report.rows],
             [r['var_poisson'] for r in report.rows]),
        ]
        log_log_plot(series, args.plot,
                     title='coupled variances: %s' % cfg.statistic)
    sys.stdout.write(report.to_json(args.out) + '\n')


def _add_scene_sample_flags(p, lam_default=None):
    p.add_argument('--scene', required=True,
                   help='scene spec, e.g. disk:0.25 (%s)'
                   % ', '.join(scene_names()))
    p.add_argument('--lambda', dest='lam', type=float,
                   required=lam_default is None, default=lam_default,
                   help='Poisson intensity')
    p.add_argument('--seed', type=int, required=True,
                   help='master seed (no wall-clock seeding)')
    p.add_argument('--boundary', choices=('clip', 'torus'), default='torus')
    p.add_argument('--out', default=None, help='output path')


def _add_experiment_flags(p, default_stat):
    p.add_argument('--scene', default=None)
    p.add_argument('--statistic', default=default_stat,
                   choices=sorted(STATISTICS))
    p.add_argument('--levels', default=None,
                   help='"lo:hi" doubling grid or comma list')
    p.add_argument('--reps', type=int, default=None)
    p.add_argument('--seed', type=int, required=True)
    p.add_argument('--boundary', choices=('clip', 'torus'), default=None)
    p.add_argument('--workers', type=int, default=None)
    p.add_argument('--config', default=None, help='JSON config file')
    p.add_argument('--table', default=None, help='raw replicate CSV path')
    p.add_argument('--out', default=None, help='report JSON path')
    p.add_argument('--plot', default=None, help='SVG plot path')
    p.add_argument('--column', default='value')


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog='surfscale',
        description='Voronoi set estimators, maximal-point counts, and '
                    'surface-order scaling experiments.')
    sub = ap.add_subparsers(dest='command', required=True)

    p = sub.add_parser('sample', help='draw a Poisson sample of a scene')
    _add_scene_sample_flags(p)
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser('voronoi', help='cell areas of a sampled diagram')
    _add_scene_sample_flags(p)
    p.set_defaults(fn=cmd_voronoi)

    p = sub.add_parser('estimate-volume',
                       help='cell-union volume estimate of a scene')
    _add_scene_sample_flags(p)
    p.set_defaults(fn=cmd_estimate_volume)

    p = sub.add_parser('estimate-surface',
                       help='corrected interface-length estimate')
    _add_scene_sample_flags(p)
    p.add_argument('--weight', default=None,
                   help='boundary weight function name (x1, x2)')
    p.set_defaults(fn=cmd_estimate_surface)

    p = sub.add_parser('maximal', help='count of maximal points')
    _add_scene_sample_flags(p)
    p.set_defaults(fn=cmd_maximal)

    p = sub.add_parser('navigate', help='greedy cell walk between points')
    _add_scene_sample_flags(p)
    p.add_argument('--start', default='0.1,0.1')
    p.add_argument('--target', default='0.9,0.9')
    p.set_defaults(fn=cmd_navigate)

    p = sub.add_parser('constants',
                       help='half-space Monte Carlo limit constants')
    p.add_argument('--xi', choices=('alpha', 'zeta'), required=True)
    p.add_argument('--dim', type=int, default=1,
                   help='codimension of the boundary (1)')
    p.add_argument('--which', choices=('mu', 'nu'), default='mu')
    p.add_argument('--seed', type=int, required=True)
    p.add_argument('--reps', type=int, default=2000)
    p.add_argument('--pair-reps', type=int, default=500)
    p.add_argument('--pair-u-nodes', type=int, default=4)
    p.add_argument('--z-nodes', type=int, default=5)
    p.add_argument('--halfwidth', type=float, default=None,
                   help='box half-width (default 6.5 alpha, 8.0 zeta)')
    p.add_argument('--u-max', type=float, default=3.0)
    p.add_argument('--z-max', type=float, default=6.5)
    p.add_argument('--tau', type=float, default=1.0)
    p.add_argument('--slope', type=float, default=-1.0,
                   help='boundary slope for the zeta score')
    p.add_argument('--frozen', action='store_true',
                   help='read the shipped fixture instead of sampling')
    p.add_argument('--label', default='primary',
                   help='fixture truncation level (primary, wide)')
    p.add_argument('--out', default=None)
    p.set_defaults(fn=cmd_constants)

    p = sub.add_parser('verify-scaling',
                       help='log-log slope fit over an intensity grid')
    _add_experiment_flags(p, 'maximal')
    p.add_argument('--mean-target', type=float, default=None)
    p.add_argument('--var-target', type=float, default=None)
    p.add_argument('--tolerance', type=float, default=0.1)
    p.set_defaults(fn=cmd_verify_scaling)

    p = sub.add_parser('verify-clt',
                       help='per-level normality distances')
    _add_experiment_flags(p, 'maximal')
    p.add_argument('--min-reps', type=int, default=100)
    p.set_defaults(fn=cmd_verify_clt)

    p = sub.add_parser('compare-binomial',
                       help='coupled Poisson vs binomial variance gap')
    _add_experiment_flags(p, 'maximal')
    p.set_defaults(fn=cmd_compare_binomial)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args.fn(args)
    except (UnknownName, ValueError) as exc:
        sys.stderr.write('error: %s\n' % exc)
        return 2
    except (SurfscaleError, RuntimeError, OSError) as exc:
        sys.stderr.write('failure: %s: %s\n' % (type(exc).__name__, exc))
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
