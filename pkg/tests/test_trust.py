import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trustchain.trust import (
    BetaPrior,
    DecayParams,
    TrustState,
    ValidationRecord,
    apply_validation,
    beta_mean,
    decay_blend,
    decayed_counts,
    record_outcome,
    trust_from_history,
    trust_value,
)

JEFFREYS = BetaPrior(0.5, 0.5)


@pytest.mark.parametrize(
    "n, m, expected",
    [(0, 0, 0.5), (3, 1, 0.7), (10, 0, 10.5 / 11)],
)
def test_trust_value_examples(n, m, expected):
    assert trust_value(TrustState(n, m, JEFFREYS)) == pytest.approx(expected, abs=1e-12)


def test_default_prior_is_jeffreys():
    assert TrustState().prior == JEFFREYS


@pytest.mark.parametrize("a, b", [(0, 1), (1, 0), (-1, 1)])
def test_prior_must_be_positive(a, b):
    with pytest.raises(ValueError):
        BetaPrior(a, b)


def test_record_outcome_correct_full_confidence():
    s = record_outcome(TrustState(0, 0, JEFFREYS), ValidationRecord(0, True, 1.0))
    assert (s.n_correct, s.m_incorrect) == (1, 0)
    assert trust_value(s) == pytest.approx(0.75)


def test_record_outcome_zero_confidence_is_noop():
    s = TrustState(4, 2, BetaPrior(2, 1), 0.3)
    assert record_outcome(s, ValidationRecord(5, False, 0.0)) == s
    assert record_outcome(s, ValidationRecord(5, True, 0.0)) == s


def test_record_outcome_incorrect_half_confidence():
    s = record_outcome(TrustState(2, 0, JEFFREYS), ValidationRecord(3, False, 0.5))
    assert (s.n_correct, s.m_incorrect) == (2, 0.5)
    assert trust_value(s) == pytest.approx(2.5 / 3.5)


def test_validation_record_bounds():
    with pytest.raises(ValueError):
        ValidationRecord(0, True, 1.5)
    with pytest.raises(ValueError):
        ValidationRecord(-1, True)


def test_decay_blend_examples():
    assert decay_blend(0.5, 1.0, 0.9) == pytest.approx(0.55)
    assert decay_blend(0.37, 0.9, 1.0) == 0.37
    assert decay_blend(0.37, 0.9, 0.0) == 0.9


def test_decayed_counts_examples():
    assert decayed_counts([], 0.7, 5) == (0.0, 0.0)
    assert decayed_counts([ValidationRecord(4, True)], 0.3, 4) == (1.0, 0.0)
    hist = [ValidationRecord(9, True), ValidationRecord(10, False)]
    assert decayed_counts(hist, 0.5, 10) == pytest.approx((0.5, 1.0))


def test_decayed_counts_rejects_future_and_unsorted():
    with pytest.raises(ValueError):
        decayed_counts([ValidationRecord(3, True)], 0.5, 2)
    with pytest.raises(ValueError):
        decayed_counts([ValidationRecord(3, True), ValidationRecord(1, True)], 0.5, 4)


def test_decay_params_validation():
    with pytest.raises(ValueError):
        DecayParams(mode="both")
    with pytest.raises(ValueError):
        DecayParams(lam=1.2)
    with pytest.raises(ValueError):
        DecayParams(gamma=-0.1)


def test_smoothed_rule_is_jeffreys_case():
    for n in range(101):
        for m in range(101):
            assert abs(trust_value(TrustState(n, m, JEFFREYS)) - (n + 0.5) / (n + m + 1)) <= 1e-12


counts = st.floats(0, 1e6, allow_nan=False)
priors = st.builds(BetaPrior, st.floats(1e-3, 100), st.floats(1e-3, 100))


@given(counts, counts, priors)
def test_trust_interior(n, m, prior):
    t = trust_value(TrustState(n, m, prior))
    assert 0.0 < t < 1.0


@given(st.integers(0, 500), st.integers(0, 500), priors)
def test_monotone_in_counts(n, m, prior):
    t = trust_value(TrustState(n, m, prior))
    assert trust_value(TrustState(n + 1, m, prior)) > t
    assert trust_value(TrustState(n, m + 1, prior)) < t


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), priors)
def test_repeated_correct_outcomes(n, m, k, prior):
    s = TrustState(n, m, prior)
    for i in range(k):
        s = record_outcome(s, ValidationRecord(i, True))
    expected = (n + k + prior.a) / (n + k + m + prior.a + prior.b)
    assert trust_value(s) == pytest.approx(expected, abs=1e-12)


@given(st.floats(0, 1), st.sampled_from([0.0, 1.0]), st.floats(0, 1), st.integers(0, 300))
def test_iterated_blend_matches_closed_form(t0, behavior, lam, t):
    value = t0
    for _ in range(t):
        value = decay_blend(value, behavior, lam)
    assert value == pytest.approx(lam**t * t0 + (1 - lam**t) * behavior, abs=1e-12)


records = st.lists(
    st.tuples(st.integers(0, 5), st.booleans(), st.floats(0, 1)), max_size=40
).map(
    lambda rows: [
        ValidationRecord(r, c, w)
        for r, c, w in sorted(((sum(x[0] for x in rows[: i + 1]), x[1], x[2]) for i, x in enumerate(rows)))
    ]
)


@given(records)
def test_decayed_counts_lambda_one_is_plain_counting(history):
    now = history[-1].round if history else 0
    n_eff, m_eff = decayed_counts(history, 1.0, now)
    assert n_eff == pytest.approx(sum(r.confidence for r in history if r.correct))
    assert m_eff == pytest.approx(sum(r.confidence for r in history if not r.correct))


@given(records)
def test_decayed_counts_lambda_zero_keeps_only_now(history):
    now = history[-1].round if history else 0
    n_eff, m_eff = decayed_counts(history, 0.0, now)
    latest = [r for r in history if r.round == now]
    assert n_eff == pytest.approx(sum(r.confidence for r in latest if r.correct))
    assert m_eff == pytest.approx(sum(r.confidence for r in latest if not r.correct))


@given(
    st.integers(1, 60),
    st.lists(st.integers(0, 60), min_size=2, max_size=8),
    st.floats(0.01, 1.0),
    priors,
)
def test_common_confidence_scaling_preserves_ordering(length, n_correct, c, prior):
    # equal observation counts per node, same prior
    n_correct = [min(k, length) for k in n_correct]
    plain = [beta_mean(k, length - k, prior) for k in n_correct]
    scaled = [beta_mean(c * k, c * (length - k), prior) for k in n_correct]
    for i in range(len(plain)):
        for j in range(len(plain)):
            if plain[i] < plain[j]:
                assert scaled[i] < scaled[j]


def test_ema_behavior_mode():
    decay = DecayParams("ema", lam=0.9, ema_input="behavior")
    s = TrustState.fresh(JEFFREYS, decay)
    assert s.ema_value == 0.5
    s = apply_validation(s, ValidationRecord(0, True), decay)
    assert s.ema_value == pytest.approx(0.55)
    assert s.n_correct == 1


def test_ema_beta_mean_mode():
    decay = DecayParams("ema", gamma=0.8, ema_input="beta_mean")
    s = TrustState.fresh(JEFFREYS, decay)
    s = apply_validation(s, ValidationRecord(0, True), decay)
    assert s.ema_value == pytest.approx(0.8 * 0.5 + 0.2 * 0.75)


def test_trust_from_history():
    hist = [ValidationRecord(i, c) for i, c in enumerate([True, True, False, True])]
    assert trust_from_history(hist) == pytest.approx(0.7)
    assert trust_from_history([]) == 0.5
    decayed = trust_from_history(hist, lam=0.5)
    n, m = 0.125 + 0.25 + 1.0, 0.5
    assert decayed == pytest.approx((n + 0.5) / (n + m + 1))
    assert math.isclose(trust_from_history(hist, lam=1.0), 0.7)
