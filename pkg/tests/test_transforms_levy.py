import cmath
import json
import math

import numpy as np
import pytest
from grids import GRID
from hypothesis import given
from hypothesis import strategies as st

from skellamk.analytic import (
    LEVY_FAMILIES,
    LevyMeasure,
    char_exponent,
    char_function,
    levy_khintchine_residual,
    levy_measure,
    lk_bound,
    mgf,
    pgf,
    pmf_table,
    spok_pmf_closedform,
    spok_pmf_conv,
)
from skellamk.processes import ProcessSpec
from skellamk.subordinators import SubordinatorSpec

THETAS = [0.1 * j for j in range(1, 31)]

LEVY_SPECS = {
    "skellam": ProcessSpec.skellam(1.0, 2.0),
    "ppok": ProcessSpec.ppok(3, 2.0),
    "spok": ProcessSpec.spok(3, 1.0, 0.5),
    "sfpp": ProcessSpec.sfpp(0.5, 1.0),
    "tsfpp": ProcessSpec.tsfpp(0.6, 1.0, 0.7),
    "sfsp": ProcessSpec.sfsp(0.8, 0.9, 1.0, 1.0),
    "tsfsp": ProcessSpec.tsfsp(0.6, 1.0, 0.7, 2.0, 1.0, 1.5),
    "tcspok": ProcessSpec.tcspok(2, 1.0, 0.5, SubordinatorSpec.gamma_sub(2.0, 3.0)),
}


def test_all_levy_families_covered():
    assert set(LEVY_SPECS) == set(LEVY_FAMILIES)


@pytest.mark.parametrize("fam", LEVY_FAMILIES)
def test_levy_khintchine_within_bound(fam):
    spec = LEVY_SPECS[fam]
    for th in THETAS:
        res, bound = levy_khintchine_residual(spec, th)
        assert res <= bound
        if fam in ("skellam", "ppok", "spok"):
            assert res < 1e-14


@pytest.mark.parametrize("fam", ["spok", "tcspok"])
def test_levy_khintchine_closed_variant(fam):
    for th in THETAS:
        res, bound = levy_khintchine_residual(LEVY_SPECS[fam], th, variant="closed")
        assert res <= bound


@pytest.mark.parametrize("fam", LEVY_FAMILIES)
def test_exponent_vanishes_at_zero(fam):
    assert abs(char_exponent(LEVY_SPECS[fam], 0.0)) < 1e-15
    res, _ = levy_khintchine_residual(LEVY_SPECS[fam], 0.0)
    assert res < 1e-15


def test_known_atoms():
    assert levy_measure(ProcessSpec.skellam(1.5, 0.5)).atoms == ((-1, 0.5), (1, 1.5))
    assert levy_measure(ProcessSpec.ppok(3, 2.0)).atoms == ((1, 2.0), (2, 2.0), (3, 2.0))
    nu = levy_measure(ProcessSpec.sfpp(0.5, 1.0), 200)
    assert [nu.mass(j) for j in (1, 2, 3)] == pytest.approx([0.5, 0.125, 0.0625], rel=1e-15)
    assert nu.truncation_bound > 0


def test_sfpp_theta_pi_over_three():
    spec = ProcessSpec.sfpp(0.5, 1.0)
    res, bound = levy_khintchine_residual(spec, math.pi / 3, 200)
    direct = cmath.exp(0.5 * cmath.log(1 - cmath.exp(1j * math.pi / 3)))
    assert abs(char_exponent(spec, math.pi / 3) - direct) < 1e-15
    assert res <= bound


def test_sfpp_bound_is_exact_tail():
    spec = ProcessSpec.sfpp(0.7, 1.0)
    short = levy_measure(spec, 50)
    long = levy_measure(spec, 5000)
    extra = math.fsum(w for x, w in long.atoms if x > 50)
    assert short.truncation_bound == pytest.approx(extra + long.truncation_bound, rel=1e-10)
    # the total Levy mass is lam^alpha
    assert short.total_mass + short.truncation_bound == pytest.approx(1.0, rel=1e-13)


def test_tsfpp_total_mass():
    a, mu, lam = 0.6, 1.0, 0.7
    nu = levy_measure(ProcessSpec.tsfpp(a, mu, lam), 400)
    assert nu.total_mass + nu.truncation_bound == pytest.approx((mu + lam) ** a - mu**a, rel=1e-12)
    assert all(w > 0 for _, w in nu.atoms)


def test_difference_families_have_two_sided_atoms():
    nu = levy_measure(LEVY_SPECS["tsfsp"], 100)
    assert nu.mass(-3) > 0 and nu.mass(3) > 0
    with pytest.raises(ValueError):
        levy_measure(ProcessSpec.ra_ppok(2, 1.0))


def test_levy_json_round_trip():
    nu = levy_measure(LEVY_SPECS["tcspok"], 60)
    assert LevyMeasure.from_dict(json.loads(json.dumps(nu.to_dict()))) == nu
    assert lk_bound(nu) >= 2 * nu.truncation_bound


def test_levy_measure_validation():
    with pytest.raises(ValueError):
        LevyMeasure(((0, 1.0),))
    with pytest.raises(ValueError):
        LevyMeasure(((1, -1.0),))
    with pytest.raises(ValueError):
        LevyMeasure(((1, 1.0), (1, 2.0)))


@pytest.mark.parametrize("fam", LEVY_FAMILIES)
def test_char_function_matches_table(fam):
    # E[e^{i theta X(t)}] from the table against the closed exponent
    spec, t = GRID[fam][0]
    tab = pmf_table(spec, t, 1e-13, n_max_cap=1 << 16)
    ms = np.arange(tab.m_lo, tab.m_hi + 1)
    for th in (0.3, 1.1, 2.5):
        emp = complex(np.sum(tab.probs * np.exp(1j * th * ms)))
        assert abs(emp - char_function(spec, th, t)) <= tab.truncation_bound + 1e-9


@pytest.mark.parametrize("s", [0.5, 0.9, 1.1])
def test_spok_pgf(s):
    k, l1, l2, t = 2, 1.0, 1.0, 1.0
    spec = ProcessSpec.spok(k, l1, l2)
    printed = math.exp(-t * (k * (l1 + l2) - l1 * sum(s**j for j in range(1, k + 1)) - l2 * sum(s**-j for j in range(1, k + 1))))
    assert pgf(spec, s, t) == pytest.approx(printed, rel=1e-13)
    ms = range(-80, 81)
    conv_sum = math.fsum(s**m * spok_pmf_conv(k, l1, l2, t, m) for m in ms)
    closed_sum = math.fsum(s**m * spok_pmf_closedform(k, l1, l2, t, m) for m in ms)
    # the convolution law has the printed PGF; the closed form has that of Skellam(k l1, k l2)
    assert conv_sum == pytest.approx(printed, rel=1e-10)
    assert closed_sum == pytest.approx(pgf(spec, s, t, variant="closed"), rel=1e-10)
    if s != 1:
        assert abs(closed_sum - printed) > 1e-3


def test_running_average_cf_removable_singularity():
    spec = ProcessSpec.ra_spok(2, 1.0, 0.5)
    assert char_function(spec, 0.0, 3.0) == 1
    near = char_function(spec, 1e-9, 3.0)
    assert abs(near - 1) < 1e-8


def test_sfsp_mgf_in_convergence_strip():
    spec = ProcessSpec.sfsp(0.8, 0.9, 1.0, 1.0)
    # for real theta the MGF is only finite at theta = 0
    assert mgf(spec, 0.0, 1.0) == 1
    assert abs(mgf(spec, 0.3, 1.0).imag) > 0


@given(st.floats(-3, 3), st.floats(0.05, 4), st.floats(0.05, 4))
def test_skellam_exponent_closed_form(th, l1, l2):
    got = char_exponent(ProcessSpec.skellam(l1, l2), th)
    want = l1 * (1 - cmath.exp(1j * th)) + l2 * (1 - cmath.exp(-1j * th))
    assert abs(got - want) < 1e-12
