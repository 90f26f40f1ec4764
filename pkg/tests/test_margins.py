import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tailspec.errors import DegenerateSampleError, InputError
from tailspec.margins import (
    AngleSample,
    BivariateSample,
    PseudoPolar,
    angles_from_sample,
    empirical_quantile,
    frechet_cdf,
    known_margin_transform,
    pseudo_polar,
    rank_transform,
    select_exceedances,
)
from tailspec.models import LogisticModel, logistic_sample


def test_rank_transform_small():
    xs, ys = rank_transform(BivariateSample([10, 20, 30], [3, 1, 2]))
    np.testing.assert_allclose(xs, [4 / 3, 2, 4])
    np.testing.assert_allclose(ys, [4, 4 / 3, 2])


def test_rank_transform_too_short():
    with pytest.raises(InputError, match="too short"):
        rank_transform(BivariateSample([1.0], [2.0]))


def test_rank_transform_constant_column():
    with pytest.raises(DegenerateSampleError):
        rank_transform(BivariateSample([1.0, 1.0, 1.0], [1.0, 2.0, 3.0]))


def test_rank_transform_ties_average():
    xs, _ = rank_transform(BivariateSample([1.0, 2.0, 2.0, 3.0], [1, 2, 3, 4]))
    # tied pair shares rank 2.5
    assert xs[1] == xs[2] == 5 / (5 - 2.5)


def test_rank_transform_pareto_ks():
    rng = np.random.default_rng(11)
    n = 1000
    xs, _ = rank_transform(BivariateSample(rng.standard_normal(n), rng.standard_normal(n)))
    # rank n maps to exactly n + 1
    assert np.all((xs > 1) & (xs <= n + 1))
    z = np.sort(xs)
    ecdf_hi = np.arange(1, n + 1) / n
    ecdf_lo = np.arange(n) / n
    cdf = 1 - 1 / z
    ks = max(np.max(np.abs(ecdf_hi - cdf)), np.max(np.abs(ecdf_lo - cdf)))
    assert ks < 0.05


def test_rank_invariance_under_monotone_map():
    rng = np.random.default_rng(2)
    x, y = rng.standard_normal(300), rng.standard_normal(300)
    a = rank_transform(BivariateSample(x, y))
    b = rank_transform(BivariateSample(np.exp(x), y**3))
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])


def test_known_margin_transform_frechet():
    s = BivariateSample([2.0, 1.0], [2.0, 1.0])
    xs, _ = known_margin_transform(s, frechet_cdf, frechet_cdf)
    assert xs[0] == pytest.approx(2.5414940825367984, rel=1e-14)


def test_known_margin_transform_half():
    s = BivariateSample([0.0], [0.0])
    xs, ys = known_margin_transform(s, lambda v: np.full_like(v, 0.5), lambda v: np.full_like(v, 0.5))
    assert xs[0] == 2.0 and ys[0] == 2.0


def test_known_margin_transform_rejects_unit_cdf():
    s = BivariateSample([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(InputError):
        known_margin_transform(s, lambda v: np.ones_like(v), frechet_cdf)


@pytest.mark.parametrize("xy, wr", [((3, 1), (0.75, 4)), ((2, 2), (0.5, 4))])
def test_pseudo_polar_points(xy, wr):
    pp = pseudo_polar([xy[0]], [xy[1]])
    assert (pp.angles[0], pp.radii[0]) == wr


def test_pseudo_polar_rejects_zero():
    with pytest.raises(InputError):
        pseudo_polar([0.0], [1.0])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.floats(1e-3, 1e6), st.floats(1e-3, 1e6)), min_size=1, max_size=50))
def test_pseudo_polar_recovers_first_coordinate(pairs):
    xs = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    pp = pseudo_polar(xs, ys)
    assert np.all((pp.angles > 0) & (pp.angles < 1))
    np.testing.assert_allclose(pp.angles * pp.radii, xs, rtol=1e-12)


def test_quantile_example_ten_radii():
    radii = np.arange(1.0, 11.0)
    pp = PseudoPolar(angles=np.linspace(0.1, 0.9, 10), radii=radii)
    a = select_exceedances(pp, 0.8)
    assert a.k == 2
    assert a.threshold == 8.0
    np.testing.assert_array_equal(a.w, pp.angles[[8, 9]])


def test_low_level_keeps_everything():
    pp = PseudoPolar(angles=np.array([0.2, 0.5, 0.7]), radii=np.array([3.0, 2.0, 5.0]))
    a = select_exceedances(pp, 0.1)
    assert a.k == 3
    np.testing.assert_array_equal(a.w, pp.angles)


def test_select_exceedances_too_few():
    pp = PseudoPolar(angles=np.array([0.2, 0.5, 0.7]), radii=np.array([3.0, 2.0, 5.0]))
    with pytest.raises(DegenerateSampleError):
        select_exceedances(pp, 0.9)


def test_select_exceedances_degenerate_angles():
    pp = PseudoPolar(angles=np.full(5, 0.3), radii=np.arange(1.0, 6.0))
    with pytest.raises(DegenerateSampleError, match="zero variance"):
        select_exceedances(pp, 0.2)


@pytest.mark.parametrize("level", [0.0, 1.0, -0.5])
def test_select_exceedances_bad_level(level):
    pp = PseudoPolar(angles=np.array([0.2, 0.5]), radii=np.array([3.0, 2.0]))
    with pytest.raises(InputError):
        select_exceedances(pp, level)


@pytest.mark.parametrize("n", [2850, 2800, 2899])
def test_k_at_98_percent(n):
    s = logistic_sample(LogisticModel(0.3), n, seed=n)
    a = angles_from_sample(s, 0.98, "rank")
    assert abs(a.k - math.ceil(0.02 * n)) <= 1


@settings(max_examples=100, deadline=None)
@given(st.integers(5, 400), st.floats(0.01, 0.95), st.integers(0, 10**6))
def test_k_count_and_nesting(n, q, seed):
    rng = np.random.default_rng(seed)
    radii = rng.permutation(np.arange(1.0, n + 1.0)) + rng.uniform(0, 0.5, n)
    pp = PseudoPolar(angles=rng.uniform(0.01, 0.99, n), radii=radii)
    t = empirical_quantile(radii, q)
    k = int(np.sum(radii > t))
    assert abs(k - math.ceil((1 - q) * n)) <= 1
    if k >= 2:
        assert select_exceedances(pp, q).k == k
    lower = empirical_quantile(radii, q / 2)
    assert set(np.flatnonzero(radii > t)) <= set(np.flatnonzero(radii > lower))


def test_angle_sample_validation():
    with pytest.raises(DegenerateSampleError):
        AngleSample(w=[0.5])
    with pytest.raises(InputError):
        AngleSample(w=[0.0, 0.5])
    a = AngleSample(w=[0.2, 0.6])
    assert a.k == 2 and a.source_size == 2


def test_bivariate_sample_validation():
    with pytest.raises(InputError):
        BivariateSample([1.0, 2.0], [1.0])
    with pytest.raises(InputError):
        BivariateSample([1.0, np.nan], [1.0, 2.0])
