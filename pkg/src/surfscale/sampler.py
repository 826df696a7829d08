'''Point-process samplers: inhomogeneous Poisson, binomial, homogeneous.

All samplers are pure functions of (parameters, seed): the same inputs
reproduce the same point list bit for bit, independent of worker count.
Inhomogeneous intensities are realized by thinning a homogeneous proposal
at the declared sup bound; binomial samples use rejection against the same
bound. The Poisson counts come from the generator's own count sampler,
which switches between inversion for small means and transformed rejection
for large ones while staying bit-stable per seed.
'''

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidDensity, RejectionBudgetExceeded
from .rng import seed_record, stream

REJECTION_BUDGET_FACTOR = 1_000_000


@dataclass
class Density:
    '''Sampling density kappa on the unit cube.

    Attributes:
        kappa: vectorized oracle mapping (n, d) points to nonnegative values.
        sup_bound: a finite upper bound for kappa (need not be tight).
        d: ambient dimension.
        normalized: declares integral(kappa) = 1, required for binomial use.
        label: short name used in provenance records.
    '''
    kappa: Callable[[np.ndarray], np.ndarray]
    sup_bound: float
    d: int
    normalized: bool = True
    label: str = 'kappa'

    def __post_init__(self):
        if not np.isfinite(self.sup_bound) or self.sup_bound <= 0:
            raise InvalidDensity('sup_bound must be finite and positive')

    def values(self, pts: np.ndarray) -> np.ndarray:
        v = np.asarray(self.kappa(pts), dtype=float)
        if np.any(v < 0):
            raise InvalidDensity(f'negative density value from {self.label}')
        if np.any(v > self.sup_bound * (1 + 1e-12)):
            raise InvalidDensity(f'density exceeds its declared sup bound {self.sup_bound}')
        return v


def uniform_density(d: int) -> Density:
    return Density(kappa=lambda p: np.ones(len(np.atleast_2d(p))), sup_bound=1.0,
                   d=d, normalized=True, label='uniform')


def indicator_density(region, scale: float) -> Density:
    '''kappa = scale * 1_A; normalized when scale * Vol(A) = 1.'''
    normalized = abs(scale * region.volume() - 1.0) < 1e-9

    def kappa(p):
        return scale * region.contains(p).astype(float)

    return Density(kappa=kappa, sup_bound=scale, d=region.d,
                   normalized=normalized, label=f'{scale}*indicator')


@dataclass
class PointSet:
    '''An immutable finite configuration with provenance.

    Attributes:
        points: (n, d) float array inside the carrier.
        kind: 'poisson' | 'binomial' | 'homogeneous'.
        params: scalar parameters of the generating mechanism.
        seed: textual stream identifier.
    '''
    points: np.ndarray
    kind: str
    params: dict
    seed: str

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise ValueError('points must be a 2-d array')
        self.points.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def d(self) -> int:
        return self.points.shape[1]


def _as_generator(seed) -> tuple[np.random.Generator, str]:
    if isinstance(seed, np.random.Generator):
        return seed, 'generator'
    if isinstance(seed, (tuple, list)):
        return stream(*seed), seed_record(*seed)
    return stream(int(seed)), seed_record(int(seed))


def sample_poisson(lam: float, kappa: Density, seed) -> PointSet:
    '''Poisson process of intensity lam * kappa on the unit cube.

    A homogeneous proposal of intensity lam * sup_bound is thinned with
    acceptance probability kappa(x) / sup_bound.
    '''
    if not np.isfinite(lam) or lam <= 0:
        raise ValueError('lambda must be finite and positive')
    rng, rec = _as_generator(seed)
    mean = lam * kappa.sup_bound
    count = int(rng.poisson(mean))
    proposals = rng.random((count, kappa.d))
    if count:
        accept = rng.random(count) * kappa.sup_bound < kappa.values(proposals)
        pts = proposals[accept]
    else:
        pts = np.empty((0, kappa.d))
    return PointSet(points=pts, kind='poisson',
                    params={'lambda': float(lam), 'density': kappa.label}, seed=rec)


def sample_binomial(n: int, kappa: Density, seed) -> PointSet:
    '''Exactly n i.i.d. points with density kappa (rejection sampling).'''
    if n < 0:
        raise ValueError('n must be nonnegative')
    if not kappa.normalized:
        raise InvalidDensity('binomial sampling requires a normalized density')
    rng, rec = _as_generator(seed)
    pts = _rejection_iid(n, kappa, rng)
    return PointSet(points=pts, kind='binomial',
                    params={'n': int(n), 'density': kappa.label}, seed=rec)


def _rejection_iid(n: int, kappa: Density, rng: np.random.Generator) -> np.ndarray:
    if n == 0:
        return np.empty((0, kappa.d))
    out = np.empty((n, kappa.d))
    have = 0
    proposed = 0
    budget = REJECTION_BUDGET_FACTOR * n
    while have < n:
        batch = max(1024, 2 * (n - have))
        if proposed + batch > budget:
            batch = budget - proposed
            if batch <= 0:
                raise RejectionBudgetExceeded(
                    f'gave up after {proposed} proposals for {n} points')
        cand = rng.random((batch, kappa.d))
        accept = rng.random(batch) * kappa.sup_bound < kappa.values(cand)
        good = cand[accept]
        take = min(len(good), n - have)
        out[have:have + take] = good[:take]
        have += take
        proposed += batch
    return out


def sample_homogeneous(tau: float, box, seed) -> PointSet:
    '''Homogeneous Poisson process of intensity tau on an axis-aligned box.

    Args:
        box: sequence of per-axis (lo, hi) pairs.
    '''
    if not np.isfinite(tau) or tau <= 0:
        raise ValueError('tau must be finite and positive')
    box = np.asarray(box, dtype=float)
    if box.ndim != 2 or box.shape[1] != 2:
        raise ValueError('box must be a sequence of (lo, hi) pairs')
    widths = box[:, 1] - box[:, 0]
    if np.any(widths <= 0):
        raise ValueError('box must be nondegenerate')
    rng, rec = _as_generator(seed)
    vol = float(np.prod(widths))
    count = int(rng.poisson(tau * vol))
    pts = box[:, 0] + rng.random((count, len(box))) * widths
    return PointSet(points=pts, kind='homogeneous',
                    params={'tau': float(tau), 'box': box.tolist()}, seed=rec)


def couple_poissonized(n: int, kappa: Density, seed) -> tuple[PointSet, PointSet]:
    '''A binomial sample of size n and a Poissonized one sharing its prefix.

    Draws N ~ Poisson(n), then max(n, N) i.i.d. points from one stream; the
    binomial set is the first n of them and the Poissonized set the first N,
    so the two configurations share min(n, N) common points.
    '''
    if n < 0:
        raise ValueError('n must be nonnegative')
    if not kappa.normalized:
        raise InvalidDensity('coupling requires a normalized density')
    rng, rec = _as_generator(seed)
    big_n = int(rng.poisson(n))
    pool = _rejection_iid(max(n, big_n), kappa, rng)
    binom = PointSet(points=pool[:n].copy(), kind='binomial',
                     params={'n': int(n), 'density': kappa.label}, seed=rec)
    poiss = PointSet(points=pool[:big_n].copy(), kind='poisson',
                     params={'lambda': float(n), 'coupled_count': big_n,
                             'density': kappa.label}, seed=rec)
    return binom, poiss


# -- serialization ---------------------------------------------------------

_MAGIC = b'SSPS'
_KINDS = {'poisson': 0, 'binomial': 1, 'homogeneous': 2}
_KINDS_INV = {v: k for k, v in _KINDS.items()}


def save_csv(ps: PointSet, path: str) -> None:
    meta = json.dumps({'kind': ps.kind, 'params': ps.params, 'seed': ps.seed},
                      sort_keys=True)
    header = ','.join(f'x{i}' for i in range(ps.d))
    with open(path, 'w') as fh:
        fh.write(f'# {meta}\n{header}\n')
        for row in ps.points:
            fh.write(','.join(repr(float(v)) for v in row) + '\n')


def load_csv(path: str) -> PointSet:
    with open(path) as fh:
        meta_line = fh.readline()
        meta = json.loads(meta_line.lstrip('# ').strip())
        fh.readline()  # column header
        rows = [line.strip().split(',') for line in fh if line.strip()]
    pts = np.array([[float(v) for v in row] for row in rows], dtype=float)
    if len(rows) == 0:
        pts = np.empty((0, 2))
    return PointSet(points=pts, kind=meta['kind'], params=meta['params'], seed=meta['seed'])


def save_binary(ps: PointSet, path: str) -> None:
    '''Little-endian binary: magic, version, d, meta json, count, f64 coords.'''
    meta = json.dumps({'kind': ps.kind, 'params': ps.params, 'seed': ps.seed},
                      sort_keys=True).encode()
    with open(path, 'wb') as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack('<BBH', 1, ps.d, len(meta)))
        fh.write(meta)
        fh.write(struct.pack('<Q', ps.n))
        fh.write(ps.points.astype('<f8').tobytes())


def load_binary(path: str) -> PointSet:
    with open(path, 'rb') as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError('not a surfscale pointset file')
        version, d, mlen = struct.unpack('<BBH', fh.read(4))
        if version != 1:
            raise ValueError(f'unsupported version {version}')
        meta = json.loads(fh.read(mlen).decode())
        (count,) = struct.unpack('<Q', fh.read(8))
        pts = np.frombuffer(fh.read(count * d * 8), dtype='<f8').reshape(count, d)
    return PointSet(points=pts.copy(), kind=meta['kind'], params=meta['params'],
                    seed=meta['seed'])
