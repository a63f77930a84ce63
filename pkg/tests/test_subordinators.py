import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from skellamk.montecarlo import ks_two_sample
from skellamk.subordinators import (
    PrecisionLossError,
    SamplerStats,
    SubordinatorSpec,
    UnsupportedFamilyError,
    bernstein,
    bernstein_taylor,
    laplace_exponent,
    lt_derivative_moment,
    lt_derivative_moment_mc,
    lt_moment_coefficients,
    sample_increment,
    stable_unit,
    subordinator_moments,
)

FAMILIES = [
    SubordinatorSpec.gamma_sub(2.0, 3.0),
    SubordinatorSpec.tempered_stable(0.3, 1.0),
    SubordinatorSpec.inverse_gaussian(1.0, 2.0),
    SubordinatorSpec.stable(0.5),
]
FINITE = FAMILIES[:3]


def test_laplace_exponent_examples():
    assert laplace_exponent(SubordinatorSpec.stable(0.5), 4) == pytest.approx(2.0, rel=1e-15)
    assert laplace_exponent(SubordinatorSpec.tempered_stable(0.3, 1.0), 0) == 0.0
    g = SubordinatorSpec.gamma_sub(2.0, 3.0)
    assert laplace_exponent(g, 3 * (math.e - 1)) == pytest.approx(2.0, rel=1e-14)


@pytest.mark.parametrize("spec", FAMILIES)
def test_laplace_exponent_zero_and_domain(spec):
    assert laplace_exponent(spec, 0) == 0
    with pytest.raises(ValueError):
        laplace_exponent(spec, -0.1)


@pytest.mark.parametrize("spec", FAMILIES)
def test_laplace_exponent_concave_increasing(spec):
    s = np.linspace(0, 20, 401)
    f = np.array([laplace_exponent(spec, x) for x in s])
    assert np.all(np.diff(f) >= 0)
    assert np.all(np.diff(f, 2) <= 1e-12)


@pytest.mark.parametrize(
    "bad",
    [
        dict(family="gamma", p=0, alpha=1),
        dict(family="tempered_stable", alpha=1.0, mu=1),
        dict(family="inverse_gaussian", gamma=-1, delta=1),
        dict(family="stable", alpha=1.2),
        dict(family="levy"),
    ],
)
def test_invalid_parameters(bad):
    with pytest.raises(ValueError):
        SubordinatorSpec(**bad)


@pytest.mark.parametrize("spec", FAMILIES)
def test_spec_round_trip(spec):
    assert SubordinatorSpec.from_dict(spec.to_dict()) == spec


@pytest.mark.parametrize("spec", FINITE)
def test_bernstein_taylor_matches_finite_differences(spec):
    c = 0.8
    b = bernstein_taylor(spec, c, 3)
    h = 1e-3
    d1 = (bernstein(spec, c + h) - bernstein(spec, c - h)) / (2 * h)
    d2 = (bernstein(spec, c + h) - 2 * bernstein(spec, c) + bernstein(spec, c - h)) / h**2
    assert b[0] == pytest.approx(bernstein(spec, c))
    assert b[1] == pytest.approx(d1, rel=1e-6)
    assert b[2] == pytest.approx(-d2 / 2, rel=1e-5)
    assert np.all(bernstein_taylor(spec, c, 30)[1:] >= 0)


@pytest.mark.parametrize("spec", FAMILIES)
def test_draws_positive(spec, rng):
    for dt in (1e-3, 0.1, 1.0):
        x = sample_increment(spec, dt, rng, size=5000)
        assert np.all(x > 0)
    assert isinstance(sample_increment(spec, 0.5, rng), float)


@pytest.mark.parametrize("spec", FAMILIES)
@pytest.mark.parametrize("dt", [0.1, 1.0])
def test_laplace_transform_of_draws(spec, dt, rng):
    x = sample_increment(spec, dt, rng, size=200_000)
    for s in (0.1, 1.0, 5.0):
        y = np.exp(-s * x)
        se = y.std(ddof=1) / math.sqrt(y.size)
        assert abs(y.mean() - math.exp(-dt * laplace_exponent(spec, s))) < 4 * se + 1e-12


def test_stable_laplace_example(rng):
    x = sample_increment(SubordinatorSpec.stable(0.5), 0.1, rng, size=1_000_000)
    y = np.exp(-x)
    se = y.std(ddof=1) / 1000
    assert abs(y.mean() - math.exp(-0.1)) < 3 * se


def test_stable_self_similarity(rng):
    spec = SubordinatorSpec.stable(0.5)
    a = sample_increment(spec, 0.3, rng, size=10_000)
    b = sample_increment(spec, 1.0, rng, size=10_000) * 0.3**2
    assert ks_two_sample(a, b) > 0.01


def test_stable_unit_uses_two_uniforms(rng):
    x = stable_unit(rng, 0.7, 1000)
    assert x.shape == (1000,) and np.all(x > 0)


def test_tempered_stable_acceptance_counter(rng):
    spec = SubordinatorSpec.tempered_stable(0.5, 2.0)
    stats = SamplerStats()
    sample_increment(spec, 0.5, rng, size=100_000, stats=stats)
    assert stats.accepted == 100_000
    # acceptance rate estimates E[exp(-mu D_alpha(dt))] = exp(-dt mu^alpha)
    expected = math.exp(-0.5 * 2.0**0.5)
    se = math.sqrt(expected * (1 - expected) / stats.proposals)
    assert abs(stats.acceptance_rate - expected) < 5 * se


def test_moments_closed_forms():
    assert subordinator_moments(SubordinatorSpec.tempered_stable(0.5, 1.0), 2.0)[0] == pytest.approx(1.0)
    assert subordinator_moments(SubordinatorSpec.gamma_sub(1.0, 1.0), 1.0) == (1.0, 1.0)
    m, v = subordinator_moments(SubordinatorSpec.inverse_gaussian(2.0, 3.0), 1.5)
    assert m == pytest.approx(1.5 * 3 / 2) and v == pytest.approx(1.5 * 3 / 8)
    with pytest.raises(UnsupportedFamilyError):
        subordinator_moments(SubordinatorSpec.stable(0.5), 1.0)


@pytest.mark.parametrize("spec", FINITE)
def test_moments_against_simulation(spec, rng):
    x = sample_increment(spec, 2.0, rng, size=400_000)
    mean, var = subordinator_moments(spec, 2.0)
    assert abs(x.mean() - mean) < 4 * math.sqrt(var / x.size)
    assert x.var() == pytest.approx(var, rel=0.05)


def test_lt_derivative_moment_n0():
    for spec in FAMILIES:
        assert lt_derivative_moment(spec, 0.7, 0, 1.3) == pytest.approx(math.exp(-1.3 * laplace_exponent(spec, 0.7)))


def test_lt_derivative_moment_gamma_n1_closed_form():
    p, a, t, c = 2.0, 3.0, 1.5, 0.7
    want = p * t / (a + c) * (1 + c / a) ** (-p * t)
    g = SubordinatorSpec.gamma_sub(p, a)
    assert lt_derivative_moment(g, c, 1, t) == pytest.approx(want, rel=1e-14)
    assert lt_derivative_moment(g, c, 1, t, method="richardson") == pytest.approx(want, rel=1e-8)


def test_lt_derivative_moment_quadrature_oracles():
    # mpmath quadrature against the subordinator densities
    g = SubordinatorSpec.gamma_sub(2.0, 3.0)
    assert lt_derivative_moment(g, 0.7, 3, 1.5) == pytest.approx(0.63140013460414126, rel=1e-13)
    ig = SubordinatorSpec.inverse_gaussian(1.0, 2.0)
    assert lt_derivative_moment(ig, 0.5, 2, 1.0) == pytest.approx(1.1822901131053929, rel=1e-13)


@pytest.mark.parametrize("spec", FINITE)
@pytest.mark.parametrize("n", range(1, 7))
def test_richardson_agrees_or_reports_precision_loss(spec, n):
    exact = lt_derivative_moment(spec, 1.0, n, 1.0)
    if n <= 3:
        approx = lt_derivative_moment(spec, 1.0, n, 1.0, method="richardson")
        assert approx == pytest.approx(exact, rel=1e-5)
        return
    # round-off grows like eps / h^n; high orders must either hit the
    # target or say they cannot
    try:
        approx = lt_derivative_moment(spec, 1.0, n, 1.0, method="richardson")
    except PrecisionLossError:
        return
    assert approx == pytest.approx(exact, rel=1e-5)


@pytest.mark.parametrize("spec", FINITE)
def test_lt_derivative_moment_vs_monte_carlo(spec, rng):
    for n in range(5):
        mean, se = lt_derivative_moment_mc(spec, 0.5, n, 1.0, rng, 200_000)
        assert abs(lt_derivative_moment(spec, 0.5, n, 1.0) - mean) < 4 * se


def test_lt_derivative_moment_decreases_in_c():
    ts = SubordinatorSpec.tempered_stable(0.4, 1.0)
    vals = [lt_derivative_moment(ts, c, 0, 1.0) for c in (0.5, 1, 5, 50, 500)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-3


def test_lt_derivative_moment_errors():
    with pytest.raises(UnsupportedFamilyError):
        lt_derivative_moment(SubordinatorSpec.stable(0.5), 1.0, 2, 1.0)
    with pytest.raises(ValueError):
        lt_derivative_moment(SubordinatorSpec.gamma_sub(1, 1), 1.0, 41, 1.0)
    with pytest.raises(ValueError):
        lt_derivative_moment(SubordinatorSpec.gamma_sub(1, 1), 0.0, 1, 1.0)


@given(st.floats(0.1, 5), st.floats(0.1, 3), st.integers(0, 20))
def test_lt_coefficients_are_probability_weights(c, t, n):
    # c^n a_n are Poisson-mixture probabilities: non-negative, summing to <= 1
    spec = SubordinatorSpec.gamma_sub(1.5, 2.0)
    a = lt_moment_coefficients(spec, c, t, n)
    w = a * c ** np.arange(n + 1)
    assert np.all(w >= 0)
    assert w.sum() <= 1 + 1e-12
