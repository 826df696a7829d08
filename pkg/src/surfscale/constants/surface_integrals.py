'''Boundary integrals that assemble the limit mean and variance of a
surface-order statistic from local flat-boundary values.

Two routes exist. A score that is rotation invariant and homogeneous of
degree gamma contributes one universal constant times a boundary integral
of an intensity power. Any other score (the dominance indicator, whose
cone is axis-aligned) is integrated orientation by orientation: every
quadrature node of the boundary gets its own flat-boundary run with the
local normal and the local intensity.

The dominance indicator additionally admits exact formulas: the vacancy
region of an insertion at depth u below a slope -m boundary is a triangle
of area u^2 (1+m^2) / (2m), so its depth profile is a Gaussian and the
pair correlation is piecewise analytic. Those are evaluated here by
deterministic quadrature and serve as the independent check on the
Monte Carlo route.
'''

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..errors import DegenerateInput, HypothesisViolation
from ..geometry.surfaces import Surface
from ..rng import stream
from .halfspace import HalfSpaceExperiment, LimitConstant, _gauss, \
    mu_universal, nu_universal


def zeta_depth_profile(u, slope: float = -1.0, kappa: float = 1.0):
    '''Mean dominance-indicator score at depth u below a slope boundary.

    exp(-kappa * u^2 (1+m^2) / (2m)) for u >= 0, zero above the boundary;
    m = -slope must be positive.
    '''
    if slope >= 0.0:
        raise HypothesisViolation('boundary slope must be strictly negative')
    m = -slope
    u = np.asarray(u, dtype=float)
    rate = kappa * (1.0 + m * m) / (2.0 * m)
    out = np.where(u >= 0.0, np.exp(-rate * np.square(u)), 0.0)
    return out if out.ndim else float(out)


def _zeta_pair_z_integral(u, s, m: float, kappa: float, z_order: int):
    '''Integral over the boundary offset z of the two-insertion covariance.

    For fixed depths the covariance is piecewise smooth in z with breaks
    exactly at the two cone-corner alignments m(s-u) and (u-s)/m, which
    also bound the domination window; outside [-(mu+s/m), u/m+ms] both
    the overlap and the domination vanish and the covariance is zero.
    Per-piece Gauss quadrature therefore sees only analytic integrands.
    '''
    u = np.asarray(u, dtype=float)[:, None]
    s = np.asarray(s, dtype=float)[None, :]
    w2 = 1.0 + m * m
    a_p = kappa * w2 / (2.0 * m) * u * u
    a_q = kappa * w2 / (2.0 * m) * s * s
    solo = np.exp(-a_p) * np.exp(-a_q)
    lo = -(m * u + s / m) + 0.0 * s
    hi = (u / m + m * s) + 0.0 * u
    b1 = np.minimum(m * (s - u), (u - s) / m)
    b2 = np.maximum(m * (s - u), (u - s) / m)
    total = np.zeros(np.broadcast_shapes(u.shape, s.shape))
    for za, zb in ((lo, b1), (b1, b2), (b2, hi)):
        x01, w01 = _gauss(z_order, 0.0, 1.0)
        for t, wt in zip(x01, w01):
            z = za + t * (zb - za)
            # componentwise max of the two insertions, times sqrt(1+m^2)
            r1 = np.maximum(-u * m, z - s * m)
            r2 = np.maximum(-u, -z * m - s)
            bracket = -(m * r1 + r2)
            ov = np.where(bracket > 0.0,
                          kappa * np.square(bracket) / (2.0 * m * w2), 0.0)
            q_dom_p = (z >= m * (s - u)) & (z <= (u - s) / m)
            p_dom_q = (z <= m * (s - u)) & (z >= (u - s) / m)
            joint = np.where(q_dom_p | p_dom_q, 0.0,
                             np.exp(-(a_p + a_q - ov)))
            total += wt * (zb - za) * (joint - solo)
    return total


def nu_zeta_quadrature(slope: float = -1.0, kappa: float = 1.0,
                       nodes: int = 48, z_order: int = 24) -> LimitConstant:
    '''Deterministic triple integral of the dominance-pair covariance.

    Depths run over (0, U] with U chosen so the depth profile is below
    1e-16 at the cut; the offset integral is exact per smooth piece. The
    value at half the node count is recorded as a refinement gap.
    '''
    if slope >= 0.0:
        raise HypothesisViolation('boundary slope must be strictly negative')
    m = -slope

    def run(n: int) -> float:
        # the integrand kinks along u = s (domination window collapses),
        # so integrate the u <= s triangle and double: relabeling the two
        # insertions is a symmetry once z is integrated out
        rate = kappa * (1.0 + m * m) / (2.0 * m)
        u_cut = float(np.sqrt(37.0 / rate))
        ug, wu = _gauss(n, 0.0, u_cut)
        t, wt = _gauss(n, 0.0, 1.0)
        acc = 0.0
        for ui, wi in zip(ug, wu):
            s = ui + (u_cut - ui) * t
            row = _zeta_pair_z_integral([ui], s, m, kappa, z_order)[0]
            acc += wi * (u_cut - ui) * float(wt @ row)
        return 2.0 * acc

    coarse = run(max(8, nodes // 2))
    value = run(nodes)
    return LimitConstant(
        name='nu(zeta,1)[slope=%g,kappa=%g]' % (slope, kappa),
        value=value, std_error=0.0, method='quadrature',
        truncation_report={'nodes': int(nodes), 'z_order': int(z_order),
                           'refinement_gap': abs(value - coarse)})


def _surface_nodes(M: Surface, k: int):
    '''Quadrature points and weights on M from its uniform sampler.

    Closed surfaces get equal weights; open chains and graphs include
    their endpoints, so trapezoid end-weights apply.
    '''
    pts = M.sample(k)
    total = M.measure()
    if bool(getattr(M, 'closed', True)):
        w = np.full(len(pts), total / len(pts))
    else:
        w = np.full(len(pts), total / (len(pts) - 1.0))
        w[0] *= 0.5
        w[-1] *= 0.5
    return pts, w


def _kappa_fn(kappa):
    if callable(kappa):
        return kappa
    k = float(kappa)
    return lambda y: k


def mu_surface(xi, M: Surface, kappa, cfg: HalfSpaceExperiment,
               constant: LimitConstant | None = None,
               surface_nodes: int = 8) -> LimitConstant:
    '''Limiting mean per unit of the surface-order normalization.

    Rotation-invariant homogeneous scores reduce to one flat-boundary
    constant times the boundary integral of kappa^((d-gamma-1)/d); pass
    that constant (for instance a frozen fixture) to skip the Monte
    Carlo. Other scores are integrated per orientation.
    '''
    kf = _kappa_fn(kappa)
    d = M.d
    if getattr(xi, 'rotation_invariant', False):
        c0 = constant if constant is not None else mu_universal(xi, d, cfg)
        p = (d - xi.gamma - 1) / d
        ys, w = _surface_nodes(M, max(surface_nodes, 32))
        vals = np.ones(len(ys)) if p == 0 else \
            np.array([kf(y) ** p for y in ys])
        integral = float(w @ vals)
        report = dict(c0.truncation_report)
        report['surface_integral'] = integral
        return LimitConstant(name='mu(%s,%s)' % (xi.name, type(M).__name__),
                             value=c0.value * integral,
                             std_error=c0.std_error * integral,
                             method=c0.method, truncation_report=report)
    ys, w = _surface_nodes(M, surface_nodes)
    value = 0.0
    var = 0.0
    report = {'surface_nodes': len(ys), 'reach_q9999': 0.0, 'tail_mass': 0.0}
    for j, y in enumerate(ys):
        tau = float(kf(y))
        if tau <= 0.0:
            continue
        n = M.normal_at(y)
        scale = tau ** (-1.0 / d)
        cfg_j = replace(cfg, tau=tau, normal=tuple(n),
                        u_max=cfg.u_max * scale,
                        halfwidth=cfg.halfwidth * scale,
                        margin=cfg.margin * scale,
                        seed=int(stream(cfg.seed, 'mu-surface', j)
                                 .integers(2 ** 62)))
        cj = mu_universal(xi, d, cfg_j)
        value += w[j] * tau * cj.value
        var += (w[j] * tau * cj.std_error) ** 2
        report['reach_q9999'] = max(report['reach_q9999'],
                                    cj.truncation_report['reach_q9999'])
        report['tail_mass'] = max(report['tail_mass'],
                                  cj.truncation_report['tail_mass'])
    return LimitConstant(name='mu(%s,%s)' % (xi.name, type(M).__name__),
                         value=value, std_error=float(np.sqrt(var)),
                         method='half_space_mc', truncation_report=report)


def sigma2_surface(xi, M: Surface, kappa, cfg: HalfSpaceExperiment,
                   xi_squared=None, mu2: LimitConstant | None = None,
                   nu: LimitConstant | None = None,
                   surface_nodes: int = 4) -> LimitConstant:
    '''Limiting variance per unit of the surface-order normalization.

    Sum of the squared-score mean term and the boundary integral of the
    pair-correlation triple integral, weighted by the squared intensity.
    Indicator scores square to themselves; any other score must supply
    its square explicitly.
    '''
    if xi_squared is None:
        if not getattr(xi, 'idempotent', False):
            raise DegenerateInput('non-indicator score needs xi_squared')
        xi_squared = xi
    kf = _kappa_fn(kappa)
    d = M.d
    if mu2 is None:
        mu2 = mu_surface(xi_squared, M, kappa, cfg,
                         surface_nodes=surface_nodes)
    if getattr(xi, 'rotation_invariant', False):
        c_nu = nu if nu is not None else nu_universal(xi, d, cfg)
        p = (d - 2 * xi.gamma - 1) / d
        ys, w = _surface_nodes(M, max(surface_nodes, 32))
        vals = np.ones(len(ys)) if p == 0 else \
            np.array([kf(y) ** p for y in ys])
        integral = float(w @ vals)
        corr = c_nu.value * integral
        corr_se = c_nu.std_error * integral
        report = {'mu2': mu2.truncation_report,
                  'nu': c_nu.truncation_report}
    else:
        ys, w = _surface_nodes(M, surface_nodes)
        corr = 0.0
        cvar = 0.0
        report = {'mu2': mu2.truncation_report, 'surface_nodes': len(ys)}
        for j, y in enumerate(ys):
            tau = float(kf(y))
            if tau <= 0.0:
                continue
            n = M.normal_at(y)
            scale = tau ** (-1.0 / d)
            cfg_j = replace(cfg, tau=tau, normal=tuple(n),
                            u_max=cfg.u_max * scale,
                            z_max=cfg.z_max * scale,
                            halfwidth=cfg.halfwidth * scale,
                            margin=cfg.margin * scale,
                            seed=int(stream(cfg.seed, 's2-surface', j)
                                     .integers(2 ** 62)))
            cj = nu_universal(xi, d, cfg_j)
            corr += w[j] * tau * tau * cj.value
            cvar += (w[j] * tau * tau * cj.std_error) ** 2
        corr_se = float(np.sqrt(cvar))
    value = mu2.value + corr
    se = float(np.hypot(mu2.std_error, corr_se))
    return LimitConstant(name='sigma2(%s,%s)' % (xi.name, type(M).__name__),
                         value=value, std_error=max(se, 1e-300),
                         method='half_space_mc', truncation_report=report)


def sigma2_zeta_polyline(segments, nodes: int = 48) -> LimitConstant:
    '''Exact-variance counterpart for a piecewise-linear boundary.

    segments: iterable of (length, slope, kappa) with slope < 0. Each
    segment contributes
        length * [kappa * integral of the depth profile
                  + kappa^2 * triple integral of the pair covariance],
    both in closed or quadrature form, no Monte Carlo anywhere.
    '''
    total = 0.0
    gap = 0.0
    for length, slope, kappa in segments:
        if slope >= 0.0:
            raise HypothesisViolation('boundary slope must be negative')
        m = -slope
        rate = kappa * (1.0 + m * m) / (2.0 * m)
        mean_term = kappa * 0.5 * np.sqrt(np.pi / rate)
        c_nu = nu_zeta_quadrature(slope, kappa, nodes=nodes)
        total += length * (mean_term + kappa * kappa * c_nu.value)
        gap = max(gap, c_nu.truncation_report['refinement_gap'])
    return LimitConstant(name='sigma2(zeta,polyline)', value=float(total),
                         std_error=0.0, method='quadrature',
                         truncation_report={'refinement_gap': gap})
