'''Experiment configuration: a validated, hashable description of one
replicated run (scene, statistic, level grid, seeds, outputs).

Configs come from JSON files or CLI flags; the two merge with flags
winning. Validation is strict: unknown keys are rejected rather than
ignored, so a typo in an experiment file fails loudly instead of
silently running the default.
'''

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import Any

import json

from ..scenes import scene_names

BOUNDARY_MODES = ('torus', 'clip')
STATISTIC_NAMES = ('maximal', 'volume', 'surface', 'navigate', 'zero')


@dataclass(frozen=True)
class ExperimentConfig:
    '''One replicated experiment over a grid of intensities or sizes.

    Exactly one of lambda_grid (Poisson intensities) and n_grid
    (binomial sizes) must be set; both must be strictly increasing.
    '''
    scene: str = 'disk:0.25'
    statistic: str = 'volume'
    lambda_grid: tuple[float, ...] = ()
    n_grid: tuple[int, ...] = ()
    replicates: int = 100
    master_seed: int = 0
    boundary_mode: str = 'torus'
    workers: int = 1
    statistic_options: dict = field(default_factory=dict)
    out_table: str | None = None
    out_report: str | None = None
    out_plot: str | None = None

    def __post_init__(self):
        object.__setattr__(self, 'lambda_grid',
                           tuple(float(v) for v in self.lambda_grid))
        object.__setattr__(self, 'n_grid',
                           tuple(int(v) for v in self.n_grid))
        if bool(self.lambda_grid) == bool(self.n_grid):
            raise ValueError('exactly one of lambda_grid and n_grid '
                             'must be non-empty')
        grid = self.levels
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError('level grid must be strictly increasing')
        if any(v <= 0 for v in grid):
            raise ValueError('levels must be positive')
        if self.replicates < 1:
            raise ValueError('replicates must be at least 1')
        if self.master_seed < 0:
            raise ValueError('master_seed must be nonnegative')
        if self.boundary_mode not in BOUNDARY_MODES:
            raise ValueError('boundary_mode must be one of %s'
                             % (BOUNDARY_MODES,))
        if self.workers < 1:
            raise ValueError('workers must be at least 1')
        if self.statistic not in STATISTIC_NAMES:
            raise ValueError('unknown statistic %r; available: %s'
                             % (self.statistic, ', '.join(STATISTIC_NAMES)))
        head = str(self.scene).partition(':')[0]
        if head not in scene_names():
            raise ValueError('unknown scene %r; available: %s'
                             % (head, ', '.join(scene_names())))
        if not isinstance(self.statistic_options, dict):
            raise ValueError('statistic_options must be a mapping')

    @property
    def levels(self) -> tuple:
        return self.lambda_grid or self.n_grid

    @property
    def kind(self) -> str:
        return 'poisson' if self.lambda_grid else 'binomial'

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out

    def with_overrides(self, **kw) -> 'ExperimentConfig':
        return replace(self, **kw)


def config_from_dict(raw: dict[str, Any]) -> ExperimentConfig:
    '''Build a config from a mapping, rejecting unknown keys.'''
    allowed = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ValueError('unknown config keys: %s (allowed: %s)'
                         % (', '.join(unknown), ', '.join(sorted(allowed))))
    return ExperimentConfig(**raw)


def load_config(path: str, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    '''Read a JSON config file and apply flag overrides on top.'''
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError('config file must hold a JSON object')
    merged = dict(raw)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    return config_from_dict(merged)
