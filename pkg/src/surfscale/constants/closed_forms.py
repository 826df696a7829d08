'''Deterministic formulas for the mean count of undominated points.

When the region boundary near the accumulation set is the graph of a
strictly decreasing function F, the limiting mean of the normalized count
is an explicit integral over the parameter domain: a Gamma-function
prefactor times |product of the partials|^(1/d) weighted by an intensity
power. The planar case has an equivalent specialized form; both are kept
and must agree to machine precision since their integrands coincide.
'''

from __future__ import annotations

import math

import numpy as np

from ..errors import HypothesisViolation
from .halfspace import LimitConstant
from .surface_integrals import _gauss

FD_STEP = 1e-5


def _kappa_fn(kappa):
    if callable(kappa):
        return kappa
    k = float(kappa)
    return lambda p: k


def _deriv_1d(F, dF):
    if dF is not None:
        return lambda v: float(dF(v))
    return lambda v: (float(F(v + FD_STEP)) - float(F(v - FD_STEP))) \
        / (2.0 * FD_STEP)


def _partials_2d(F, dF):
    if dF is not None:
        return lambda v1, v2: tuple(float(t) for t in dF(v1, v2))

    def fd(v1, v2):
        g1 = (float(F(v1 + FD_STEP, v2)) - float(F(v1 - FD_STEP, v2))) \
            / (2.0 * FD_STEP)
        g2 = (float(F(v1, v2 + FD_STEP)) - float(F(v1, v2 - FD_STEP))) \
            / (2.0 * FD_STEP)
        return g1, g2
    return fd


def mu_zeta_closed_form_2d(F, kappa, domain=(0.0, 1.0), dF=None,
                           order: int = 64) -> LimitConstant:
    '''(pi/2)^(1/2) * integral of |F'|^(1/2) kappa^(1/2) over the domain.'''
    kf = _kappa_fn(kappa)
    der = _deriv_1d(F, dF)
    lo, hi = float(domain[0]), float(domain[1])

    def run(n: int) -> float:
        v, w = _gauss(n, lo, hi)
        acc = 0.0
        for vi, wi in zip(v, w):
            g = der(float(vi))
            if g >= 0.0:
                raise HypothesisViolation(
                    'boundary graph must be strictly decreasing, '
                    'F\'(%g) = %g' % (vi, g))
            k = float(kf(np.array([vi, float(F(vi))])))
            acc += wi * math.sqrt(-g) * math.sqrt(k)
        return math.sqrt(math.pi / 2.0) * acc

    coarse = run(max(4, order // 2))
    value = run(order)
    return LimitConstant(name='mu(zeta,graph2d)', value=value, std_error=0.0,
                         method='closed_form',
                         truncation_report={'order': int(order),
                                            'refinement_gap':
                                                abs(value - coarse)})


def _simplex_nodes(n: int, lo, hi):
    '''Tensor Gauss nodes mapped onto the triangle v1+v2 <= hi via a
    collapsed-square substitution; weights carry the Jacobian.'''
    x, wx = _gauss(n, 0.0, 1.0)
    nodes = []
    weights = []
    for a, wa in zip(lo[0] + (hi - lo[0]) * x, wx * (hi - lo[0])):
        top = hi - a            # second coordinate runs over [lo2, hi - v1]
        if top <= lo[1]:
            continue
        for t, wt in zip(x, wx):
            nodes.append((float(a), float(lo[1] + (top - lo[1]) * t)))
            weights.append(float(wa * wt * (top - lo[1])))
    return nodes, weights


def _rect_nodes(n: int, dom):
    x1, w1 = _gauss(n, dom[0][0], dom[0][1])
    x2, w2 = _gauss(n, dom[1][0], dom[1][1])
    nodes = [(float(a), float(b)) for a in x1 for b in x2]
    weights = [float(wa * wb) for wa in w1 for wb in w2]
    return nodes, weights


def mu_zeta_closed_form(F, kappa, d: int = 2, domain=None, dF=None,
                        domain_kind: str = 'interval',
                        order: int = 64) -> LimitConstant:
    '''(d!)^(1/d) d^(-1) Gamma(1/d) * integral over the parameter domain
    of |prod of partials|^(1/d) kappa^((d-1)/d).

    Supported domains: an interval for d=2; a rectangle or the corner
    simplex (v1 + v2 <= hi1) for d=3. Raises HypothesisViolation the
    moment any sampled partial fails to be strictly negative.
    '''
    if d not in (2, 3):
        raise HypothesisViolation('boundary-graph formula needs d in {2, 3}')
    kf = _kappa_fn(kappa)
    pref = (math.factorial(d) ** (1.0 / d)) / d * math.gamma(1.0 / d)
    if d == 2:
        dom = (0.0, 1.0) if domain is None else domain
        der = _deriv_1d(F, dF)

        def run(n: int) -> float:
            v, w = _gauss(n, float(dom[0]), float(dom[1]))
            acc = 0.0
            for vi, wi in zip(v, w):
                g = der(float(vi))
                if g >= 0.0:
                    raise HypothesisViolation(
                        'partial must be strictly negative, got %g' % g)
                k = float(kf(np.array([vi, float(F(vi))])))
                acc += wi * math.sqrt(-g) * k ** 0.5
            return pref * acc
    else:
        dom = ((0.0, 1.0), (0.0, 1.0)) if domain is None else domain
        part = _partials_2d(F, dF)

        def run(n: int) -> float:
            if domain_kind == 'simplex':
                nodes, weights = _simplex_nodes(
                    n, (dom[0][0], dom[1][0]), dom[0][1])
            else:
                nodes, weights = _rect_nodes(n, dom)
            acc = 0.0
            for (a, b), wi in zip(nodes, weights):
                g1, g2 = part(a, b)
                if g1 >= 0.0 or g2 >= 0.0:
                    raise HypothesisViolation(
                        'partials must be strictly negative, got '
                        '(%g, %g)' % (g1, g2))
                k = float(kf(np.array([a, b, float(F(a, b))])))
                acc += wi * abs(g1 * g2) ** (1.0 / 3.0) * k ** (2.0 / 3.0)
            return pref * acc

    coarse = run(max(4, order // 2))
    value = run(order)
    return LimitConstant(name='mu(zeta,graph%dd)' % d, value=value,
                         std_error=0.0, method='closed_form',
                         truncation_report={'order': int(order),
                                            'refinement_gap':
                                                abs(value - coarse)})
