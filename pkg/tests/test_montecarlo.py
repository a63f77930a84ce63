import math

import numpy as np
import pytest

from skellamk.analytic import pmf_table
from skellamk.montecarlo import (
    BLOCK,
    Comparison,
    CoverageError,
    EmpiricalDist,
    block_rng,
    compare,
    estimate_laplace,
    estimate_moments,
    estimate_pmf,
    estimate_transition,
    ks_uniform,
    run_blocks,
    worker_count,
)
from skellamk.processes import ProcessSpec
from skellamk.subordinators import SubordinatorSpec, bernstein

SKELLAM = ProcessSpec.skellam(1, 1)


def test_same_seed_same_result():
    a = estimate_pmf(SKELLAM, 1.0, 5000, seed=3)
    b = estimate_pmf(SKELLAM, 1.0, 5000, seed=3)
    assert a == b
    assert a != estimate_pmf(SKELLAM, 1.0, 5000, seed=4)


def test_worker_count_does_not_change_results():
    n = 3 * BLOCK + 17
    spec = ProcessSpec.tsfsp(0.6, 1, 0.7, 2, 1, 1.5)
    one = estimate_pmf(spec, 1.0, n, seed=9, threads=1)
    many = estimate_pmf(spec, 1.0, n, seed=9, threads=4)
    assert one == many


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("SKELLAMK_THREADS", "1")
    assert worker_count() == 1
    monkeypatch.setenv("SKELLAMK_THREADS", "many")
    with pytest.raises(ValueError):
        worker_count()


def test_block_streams_are_distinct():
    assert block_rng(1, 0).random() != block_rng(1, 1).random()
    assert block_rng(1, 0).random() == block_rng(1, 0).random()
    with pytest.raises(ValueError):
        run_blocks(lambda r, s: r.random(s), 0, 1)


def test_single_sample():
    emp = estimate_pmf(SKELLAM, 1.0, 1, seed=0)
    assert len(emp.counts) == 1 and emp.n_samples == 1


def test_empirical_json_round_trip():
    emp = estimate_pmf(ProcessSpec.spok(2, 1, 0.5), 0.5, 1000, seed=2)
    back = EmpiricalDist.from_json(emp.to_json())
    assert back == emp
    assert set(emp.to_dict()) == {"spec", "t", "seed", "n_samples", "counts"}
    with pytest.raises(ValueError):
        EmpiricalDist({0: 3}, 4, 0)


def test_continuous_families_have_no_pmf():
    with pytest.raises(ValueError):
        estimate_pmf(ProcessSpec.ra_ppok(2, 1.0), 1.0, 10, 0)


def test_standard_error_scaling():
    ses = [estimate_pmf(SKELLAM, 1.0, 1000 * 2**j, seed=j).se(0) for j in range(5)]
    assert ses[0] / ses[4] == pytest.approx(4.0, rel=0.2)
    m = [estimate_moments(SKELLAM, 1.0, 1000 * 4**j, seed=j).se_mean for j in range(3)]
    assert m[0] / m[2] == pytest.approx(4.0, rel=0.2)


def test_skellam_tv():
    emp = estimate_pmf(SKELLAM, 1.0, 100_000, seed=1)
    c = compare(emp, pmf_table(SKELLAM, 1.0))
    assert isinstance(c, Comparison)
    tv, stat, p = c
    assert tv < 0.01 and p > 0.01


def test_parametric_bootstrap_pvalues_are_uniform():
    tab = pmf_table(ProcessSpec.skellam(3, 2), 1.0)
    probs = tab.probs / tab.probs.sum()
    support = np.arange(tab.m_lo, tab.m_hi + 1)
    ps = []
    for i in range(200):
        rng = np.random.default_rng(1000 + i)
        x = rng.choice(support, size=4000, p=probs)
        ps.append(compare(EmpiricalDist.from_samples(x, i), tab).chi2_pvalue)
    assert ks_uniform(ps) > 0.01


def test_closed_form_rejected_for_spok():
    spec = ProcessSpec.spok(2, 1, 1)
    emp = estimate_pmf(spec, 0.5, 200_000, seed=1)
    assert compare(emp, pmf_table(spec, 0.5)).chi2_pvalue > 0.01
    assert compare(emp, pmf_table(spec, 0.5, variant="closed")).chi2_pvalue < 1e-6


def test_coverage_error():
    tab = pmf_table(SKELLAM, 1.0).restrict(-1, 1)
    emp = estimate_pmf(SKELLAM, 1.0, 100, seed=0)
    with pytest.raises(CoverageError):
        compare(emp, tab)


def test_outside_mass_gets_its_own_cell():
    spec = ProcessSpec.sfpp(0.6, 1.0)
    tab = pmf_table(spec, 0.5, tol=2e-4, n_max_cap=1 << 18)
    emp = estimate_pmf(spec, 0.5, 100_000, seed=4)
    c = compare(emp, tab)
    assert c.chi2_pvalue > 0.01 and c.tv_distance < 0.02


def test_skellam_transition_band():
    delta = 1e-3
    freq = estimate_transition(ProcessSpec.skellam(1, 2), 0.0, delta, 1_000_000, seed=5)
    f1, se1 = freq[1]
    assert abs(f1 - delta) <= 4 * se1 + 10 * delta**2
    big = sum(f for m, (f, _) in freq.items() if abs(m) >= 2)
    assert big <= 10 * delta**2 + 4 * math.sqrt(max(big, 1e-12) / 1_000_000)


def test_spok_transitions():
    delta, k, l1, l2, n = 1e-3, 3, 1.0, 0.5, 1_000_000
    freq = estimate_transition(ProcessSpec.spok(k, l1, l2), 2.0, delta, n, seed=6)
    for i in range(1, k + 1):
        f, se = freq[i]
        assert abs(f - l1 * delta) <= 4 * se + 10 * delta**2
    f0, se0 = freq[0]
    assert abs(f0 - (1 - k * (l1 + l2) * delta)) <= 4 * se0 + 10 * delta**2
    with pytest.raises(ValueError):
        estimate_transition(ProcessSpec.spok(k, l1, l2), 2.0, 0.0, 10, 0)


@pytest.mark.parametrize(
    "sub",
    [
        SubordinatorSpec.gamma_sub(2.0, 3.0),
        SubordinatorSpec.tempered_stable(0.6, 1.0),
        SubordinatorSpec.inverse_gaussian(1.0, 2.0),
        SubordinatorSpec.stable(0.7),
    ],
)
def test_laplace_transform(sub):
    dt = 0.7
    for s in (0.5, 2.0):
        mean, se = estimate_laplace(sub, dt, s, 100_000, seed=8)
        assert abs(mean - math.exp(-dt * float(bernstein(sub, s)))) < 4 * se + 1e-12
