"""Regenerate the shipped limit-constant fixtures.

Each record is a half-space Monte Carlo estimate for the face-length
score, produced at two box truncation levels so the loader can check
that halving the truncation error does not move the value.  A full
regeneration takes on the order of ten minutes on one core, so the
records can be produced one at a time with --parts and combined with
--merge.
"""

import argparse
import json
from pathlib import Path

from surfscale.constants import (AlphaFaceScore, HalfSpaceExperiment,
                                 mu_universal, nu_universal)

DATA_PATH = (Path(__file__).resolve().parent.parent
             / 'src' / 'surfscale' / 'data' / 'constants_fixtures.json')

RECIPES = {
    'mu-primary': dict(kind='mu', label='primary', seed=101,
                       cfg=dict(tau=1.0, halfwidth=6.5, u_max=3.0,
                                u_nodes=32, replicates=12000)),
    'mu-wide': dict(kind='mu', label='wide', seed=102,
                    cfg=dict(tau=1.0, halfwidth=13.0, u_max=3.0,
                             u_nodes=32, replicates=6000)),
    'nu-primary': dict(kind='nu', label='primary', seed=103,
                       cfg=dict(tau=1.0, halfwidth=6.5, u_max=3.0,
                                z_max=6.5, pair_u_nodes=4, z_nodes=5,
                                pair_replicates=900)),
    'nu-wide': dict(kind='nu', label='wide', seed=104,
                    cfg=dict(tau=1.0, halfwidth=13.0, u_max=3.0,
                             z_max=6.5, pair_u_nodes=4, z_nodes=5,
                             pair_replicates=650)),
}


def run_part(part: str) -> dict:
    recipe = RECIPES[part]
    cfg = HalfSpaceExperiment(seed=recipe['seed'], **recipe['cfg'])
    xi = AlphaFaceScore()
    fn = mu_universal if recipe['kind'] == 'mu' else nu_universal
    const = fn(xi, 2, cfg)
    return {
        'name': const.name,
        'label': recipe['label'],
        'value': const.value,
        'std_error': const.std_error,
        'method': const.method,
        'seed': recipe['seed'],
        'truncation_report': const.truncation_report,
    }


def merge(parts_dir: Path) -> None:
    records = []
    for path in sorted(parts_dir.glob('*.json')):
        records.extend(json.loads(path.read_text())['records'])
    records.sort(key=lambda r: (r['name'], r['label']))
    names = {(r['name'], r['label']) for r in records}
    if len(names) != len(records):
        raise SystemExit('duplicate records in %s' % parts_dir)
    DATA_PATH.parent.mkdir(parents=True, exist_ok=True)
    DATA_PATH.write_text(json.dumps({'records': records}, indent=2) + '\n')
    print('wrote %s (%d records)' % (DATA_PATH, len(records)))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument('--parts', nargs='+', choices=sorted(RECIPES))
    ap.add_argument('--parts-dir', type=Path,
                    default=Path('/tmp/surfscale_fixture_parts'))
    ap.add_argument('--merge', action='store_true')
    args = ap.parse_args()
    if not args.parts and not args.merge:
        ap.error('nothing to do: pass --parts and/or --merge')
    args.parts_dir.mkdir(parents=True, exist_ok=True)
    for part in args.parts or []:
        rec = run_part(part)
        out = args.parts_dir / ('%s.json' % part)
        out.write_text(json.dumps({'records': [rec]}, indent=2) + '\n')
        print('%s: %.6f +- %.6f -> %s'
              % (rec['name'], rec['value'], rec['std_error'], out))
    if args.merge:
        merge(args.parts_dir)


if __name__ == '__main__':
    main()
