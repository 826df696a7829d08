import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from surfscale.errors import InvalidDensity
from surfscale.geometry.regions import RegularPolygonRegion
from surfscale.sampler import (couple_poissonized, indicator_density,
                               load_binary, load_csv, sample_binomial,
                               sample_homogeneous, sample_poisson,
                               save_binary, save_csv, uniform_density)
from surfscale.scenes import build_scene


def test_uniform_density_normalized():
    k = uniform_density(2)
    assert k.normalized
    pts = np.random.default_rng(0).random((100, 2))
    assert np.all(k.values(pts) == 1.0)


def test_indicator_density_support_and_mass():
    tri = build_scene('triangle-pareto')
    k = tri.density
    inside = np.array([[0.2, 0.2], [0.1, 0.8]])
    outside = np.array([[0.9, 0.9]])
    assert np.all(k.values(inside) == 2.0)
    assert np.all(k.values(outside) == 0.0)
    assert k.normalized          # 2 * Vol(triangle) = 1


def test_indicator_density_normalization_flag():
    disk = RegularPolygonRegion((0.5, 0.5), 0.25)
    assert not indicator_density(disk, 1.0).normalized
    assert indicator_density(disk, 1.0 / disk.volume()).normalized


def test_poisson_count_near_mean():
    lam = 4000.0
    ps = sample_poisson(lam, uniform_density(2), 5)
    assert abs(ps.n - lam) < 6 * np.sqrt(lam)
    assert ps.kind == 'poisson'
    assert np.all((ps.points >= 0) & (ps.points <= 1))


def test_poisson_respects_indicator_support():
    tri = build_scene('triangle-pareto')
    ps = sample_poisson(3000.0, tri.density, 6)
    assert np.all(tri.region.contains(ps.points))
    # density 2 on half the square: expected count is lam itself
    assert abs(ps.n - 3000.0) < 6 * np.sqrt(3000.0)


def test_binomial_exact_count_and_determinism():
    k = uniform_density(2)
    a = sample_binomial(257, k, (9, 'rep', 0))
    b = sample_binomial(257, k, (9, 'rep', 0))
    c = sample_binomial(257, k, (9, 'rep', 1))
    assert a.n == 257
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)
    assert a.seed == b.seed


def test_homogeneous_box_bounds():
    ps = sample_homogeneous(3.0, ((-2.0, 2.0), (-1.0, 1.0)), 11)
    assert np.all(ps.points[:, 0] >= -2.0) and np.all(ps.points[:, 0] <= 2.0)
    assert np.all(ps.points[:, 1] >= -1.0) and np.all(ps.points[:, 1] <= 1.0)
    # intensity 3 over an 8-area box
    assert abs(ps.n - 24.0) < 6 * np.sqrt(24.0) + 1


def test_coupling_shares_prefix():
    k = uniform_density(2)
    for rep in range(5):
        binom, poiss = couple_poissonized(400, k, (13, rep))
        m = min(binom.n, poiss.n)
        assert binom.n == 400
        assert np.array_equal(binom.points[:m], poiss.points[:m])


def test_coupling_requires_normalized_density():
    disk = RegularPolygonRegion((0.5, 0.5), 0.25)
    with pytest.raises(InvalidDensity):
        couple_poissonized(50, indicator_density(disk, 1.0), 3)


def test_csv_roundtrip(tmp_path):
    ps = sample_poisson(200.0, uniform_density(2), 21)
    path = str(tmp_path / 'pts.csv')
    save_csv(ps, path)
    back = load_csv(path)
    assert np.array_equal(back.points, ps.points)
    assert back.kind == ps.kind
    assert back.seed == ps.seed


def test_binary_roundtrip(tmp_path):
    ps = sample_binomial(123, uniform_density(3), (22, 'bin'))
    path = str(tmp_path / 'pts.bin')
    save_binary(ps, path)
    back = load_binary(path)
    assert np.array_equal(back.points, ps.points)
    assert back.kind == ps.kind
    assert back.params == ps.params


@given(seed=st.integers(min_value=0, max_value=10 ** 6),
       n=st.integers(min_value=1, max_value=40),
       d=st.sampled_from([2, 3]))
@settings(max_examples=25, deadline=None)
def test_binary_roundtrip_exact_floats(seed, n, d):
    import tempfile
    ps = sample_binomial(n, uniform_density(d), (seed, 'prop'))
    with tempfile.TemporaryDirectory() as tmp:
        path = tmp + '/p.bin'
        save_binary(ps, path)
        back = load_binary(path)
    assert back.points.shape == (n, d)
    assert np.array_equal(back.points, ps.points)
