import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from statsmodels.stats.proportion import proportions_ztest

from mittps.core import TrialDataset
from mittps.dgp import generate_population, simulate_trial
from mittps.diagnostics import (ALLOCATION_REASON, IDENTIFIABILITY_REASON, AppropriatenessInput, Verdict,
                                initiation_balance, mitt_appropriateness, strata_table, two_proportion_ztest)
from mittps.errors import CounterfactualUnavailableError, EmptyArmError
from mittps.fixtures import EXAMPLE_TRIALS, unbiased_config, violation_demo_config

from oracles import pooled_z


def arms(x1, n1, x0, n0):
    """Dataset with x1 of n1 intervention and x0 of n0 control records not initiating."""
    arm = [1] * n1 + [0] * n0
    init = [0] * x1 + [1] * (n1 - x1) + [0] * x0 + [1] * (n0 - x0)
    return TrialDataset(list(range(n1 + n0)), arm, init, np.zeros(n1 + n0))


def test_perfect_balance():
    b = initiation_balance(arms(10, 100, 10, 100))
    assert (b.prop_diff, b.z_stat, b.p_value, b.flagged) == (0.0, 0.0, 1.0, False)


def test_strong_imbalance():
    b = initiation_balance(arms(0, 100, 30, 100), alpha=0.05)
    z_ref, p_ref = proportions_ztest([0, 30], [100, 100])
    assert b.z_stat == pytest.approx(z_ref, rel=1e-12)
    assert b.z_stat == pytest.approx(-5.940885, abs=1e-6)
    assert b.p_value == pytest.approx(p_ref, rel=1e-9)
    assert b.p_value < 0.001 and b.flagged
    assert b.prop_diff == pytest.approx(-0.3)


def test_degenerate_pooled_zero_and_one():
    for x in (0, 50):
        b = initiation_balance(arms(x, 50, x, 50))
        assert (b.z_stat, b.p_value, b.flagged) == (0.0, 1.0, False)


def test_empty_arm():
    with pytest.raises(EmptyArmError):
        initiation_balance(arms(1, 10, 0, 0))


counts = st.integers(1, 300).flatmap(lambda n1: st.integers(1, 300).flatmap(
    lambda n0: st.tuples(st.integers(0, n1), st.just(n1), st.integers(0, n0), st.just(n0))))


@given(counts)
def test_matches_reference_formula(c):
    x1, n1, x0, n0 = c
    z, p = two_proportion_ztest(x1, n1, x0, n0)
    if 0 < x1 + x0 < n1 + n0:
        z_ref, p_ref = pooled_z(x1, n1, x0, n0)
        assert z == pytest.approx(z_ref, rel=1e-12, abs=1e-12)
        assert p == pytest.approx(p_ref, abs=1e-12)
    assert 0.0 <= p <= 1.0


@given(counts, st.floats(0.001, 0.5))
def test_label_swap_symmetry(c, alpha):
    x1, n1, x0, n0 = c
    a = initiation_balance(arms(x1, n1, x0, n0), alpha)
    b = initiation_balance(arms(x0, n0, x1, n1), alpha)
    assert a.z_stat == -b.z_stat
    assert a.p_value == b.p_value
    assert -1 <= a.prop_diff <= 1
    assert a.flagged == (a.p_value < alpha)


def test_strata_table_always_only():
    cfg = unbiased_config().with_(proportions=type(unbiased_config().proportions)(1, 0, 0, 0))
    rows = strata_table(cfg).rows()
    assert [r["empty"] for r in rows] == [False, True, True, True]
    assert rows[0]["analysed_control"] and rows[0]["analysed_intervention"]
    assert not any(r["analysed_control"] or r["analysed_intervention"] for r in rows[1:])
    text = strata_table(cfg).render()
    assert "Always initiators" in text and text.count("(empty)") == 3


def test_strata_table_shading_matches_initiation():
    rows = strata_table(violation_demo_config()).rows()
    assert [(r["analysed_intervention"], r["analysed_control"]) for r in rows] == [
        (True, True), (True, False), (False, True), (False, False)]


def test_strata_table_population_quarters():
    from mittps.dgp import StratumProportions

    n = 400_000
    cfg = unbiased_config(n=n).with_(proportions=StratumProportions(0.25, 0.25, 0.25, 0.25))
    table = strata_table(generate_population(cfg, 1))
    tol = 4 * np.sqrt(0.25 * 0.75 / n)
    assert all(abs(s - 0.25) < tol for s in table.shares)
    assert sum(table.counts) == n


def test_strata_table_refuses_observed_data():
    with pytest.raises(CounterfactualUnavailableError):
        strata_table(simulate_trial(unbiased_config(n=10)))


@pytest.mark.parametrize("identifiable, independent, expected", [
    (True, True, Verdict("appropriate")),
    (False, True, Verdict("not_appropriate", IDENTIFIABILITY_REASON)),
    (False, False, Verdict("not_appropriate", IDENTIFIABILITY_REASON)),
    (True, False, Verdict("not_appropriate", ALLOCATION_REASON)),
])
def test_appropriateness_rules(identifiable, independent, expected):
    assert mitt_appropriateness(AppropriatenessInput(identifiable, independent)) == expected


@pytest.mark.parametrize("trial, status, reason_start", [
    ("FLO-ELA", "appropriate", None),
    ("MIST2", "appropriate", None),
    ("COPERS", "not_appropriate", "identifiability"),
    ("SWAP", "not_appropriate", "allocation-dependence"),
])
def test_example_trial_verdicts(trial, status, reason_start):
    v = mitt_appropriateness(EXAMPLE_TRIALS[trial]["input"])
    assert v.status == status
    assert (v.reason or "").startswith(reason_start or "")
