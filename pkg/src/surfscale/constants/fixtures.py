'''Frozen numeric constants shipped with the package.

Some correction constants have no closed form and are too expensive to
re-derive on every run, so a one-off calibration records them as JSON,
each with its standard error, seed, and truncation report, at two
truncation levels. Values here are measurements, not exact numbers;
consumers must propagate std_error.

Set SURFSCALE_FIXTURES to point at an alternative file.
'''

from __future__ import annotations

import json
import os
from pathlib import Path

from .halfspace import LimitConstant

ENV_VAR = 'SURFSCALE_FIXTURES'
_CACHE: dict = {}


def fixture_path() -> Path:
    override = os.environ.get(ENV_VAR)
    if override:
        return Path(override)
    return Path(__file__).resolve().parent.parent / 'data' \
        / 'constants_fixtures.json'


def load_fixtures(path=None) -> dict:
    '''All records as {name: {label: LimitConstant}}.

    label distinguishes truncation levels: 'primary' is the tighter
    production value, 'wide' the enlarged-window rerun kept for the
    stability check.
    '''
    p = Path(path) if path is not None else fixture_path()
    key = str(p)
    if key in _CACHE:
        return _CACHE[key]
    with open(p) as fh:
        raw = json.load(fh)
    out: dict = {}
    for rec in raw['records']:
        report = dict(rec.get('truncation_report', {}))
        report['seed'] = rec.get('seed')
        c = LimitConstant(name=rec['name'], value=float(rec['value']),
                          std_error=float(rec['std_error']),
                          method=rec['method'], truncation_report=report)
        out.setdefault(rec['name'], {})[rec.get('label', 'primary')] = c
    _CACHE[key] = out
    return out


def get_constant(name: str, label: str = 'primary', path=None) -> LimitConstant:
    table = load_fixtures(path)
    if name not in table:
        raise KeyError('no frozen constant named %r' % name)
    if label not in table[name]:
        raise KeyError('constant %r has no %r truncation level' % (name, label))
    return table[name][label]
