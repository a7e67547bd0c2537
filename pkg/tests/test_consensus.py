import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trustchain.consensus import (
    LotteryConfig,
    LotteryState,
    NodeDescriptor,
    SelectionWeights,
    combined_chance,
    creation_chance,
    draw_lottery_gap,
    low_power_mask,
    next_creator,
    sample_creators,
    select_creator,
    select_validators,
)


def test_creation_chance_examples():
    assert creation_chance([2, 3, 5]) == pytest.approx([0.2, 0.3, 0.5])
    assert creation_chance([7]) == pytest.approx([1.0])
    assert creation_chance([1, 1, 1, 1]) == pytest.approx([0.25] * 4)


@pytest.mark.parametrize("powers", [[], [1, 0], [1, -2]])
def test_creation_chance_errors(powers):
    with pytest.raises(ValueError):
        creation_chance(powers)


powers_st = st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=30)


@given(powers_st)
def test_creation_chance_sums_to_one_and_keeps_order(powers):
    c = creation_chance(powers)
    assert abs(c.sum() - 1) <= 1e-9
    assert np.array_equal(np.argsort(powers, kind="stable"), np.argsort(c, kind="stable"))


def test_combined_chance_examples():
    c = creation_chance([1, 3, 6])
    w = combined_chance(c, [0.9, 0.1, 0.4], 1.0)
    assert np.array_equal(w.distribution, c)
    w = combined_chance([0.5, 0.5], [0.5, 0.5], 0.0)
    assert w.distribution == pytest.approx([0.5, 0.5])
    w = combined_chance([0.2, 0.8], [0.9, 0.1], 0.5)
    assert w.combined_raw == pytest.approx([0.55, 0.45])
    assert w.distribution == pytest.approx([0.55, 0.45])


def test_combined_chance_general_normalisation():
    c = creation_chance([1, 2, 3, 4])
    t = [0.9, 0.2, 0.5, 0.7]
    w = combined_chance(c, t, 0.3)
    raw = [0.3 * ci + 0.7 * ti for ci, ti in zip(c, t)]
    assert w.combined_raw == pytest.approx(raw)
    assert w.distribution == pytest.approx([r / sum(raw) for r in raw])


def test_combined_chance_errors():
    with pytest.raises(ValueError):
        combined_chance([0.5, 0.5], [0.5], 0.5)
    with pytest.raises(ValueError):
        combined_chance([0.5, 0.5], [0.5, 0.5], 1.5)
    with pytest.raises(ValueError):
        combined_chance([1.0, 0.0], [0.0, 0.0], 0.0)
    with pytest.raises(ValueError):
        combined_chance([0.3, 0.3], [0.5, 0.5], 0.5)


@given(powers_st, st.floats(0, 1))
def test_combined_alpha_limits(powers, trust_level):
    c = creation_chance(powers)
    w1 = combined_chance(c, np.random.default_rng(0).uniform(0, 1, len(c)), 1.0)
    assert np.allclose(w1.distribution, c, rtol=0, atol=1e-12)
    if trust_level > 0:
        w0 = combined_chance(c, [trust_level] * len(c), 0.0)
        assert np.allclose(w0.distribution, 1 / len(c), atol=1e-12)


@given(
    st.lists(st.floats(0.01, 100), min_size=2, max_size=10),
    st.data(),
    st.floats(0.01, 1),
    st.floats(1.0, 50.0),
)
def test_more_power_never_lowers_own_chance(powers, data, alpha, factor):
    trust = data.draw(st.lists(st.floats(0.01, 0.99), min_size=len(powers), max_size=len(powers)))
    i = data.draw(st.integers(0, len(powers) - 1))
    before = combined_chance(creation_chance(powers), trust, alpha).distribution[i]
    bumped = list(powers)
    bumped[i] *= factor
    after = combined_chance(creation_chance(bumped), trust, alpha).distribution[i]
    assert after >= before - 1e-12


def test_select_creator_degenerate():
    w = SelectionWeights.from_distribution([1.0, 0.0, 0.0])
    rng = np.random.default_rng(0)
    assert all(select_creator(w, rng) == 0 for _ in range(1000))
    w = SelectionWeights.from_distribution([0.0, 0.0, 1.0])
    assert all(select_creator(w, rng) == 2 for _ in range(1000))


def test_select_creator_errors():
    with pytest.raises(ValueError):
        select_creator(SelectionWeights.from_distribution([]), np.random.default_rng(0))
    with pytest.raises(ValueError):
        select_creator(SelectionWeights.from_distribution([0.5, -0.5]), np.random.default_rng(0))


def test_select_creator_frequencies():
    w = SelectionWeights.from_distribution([0.2, 0.3, 0.5])
    draws = sample_creators(w, np.random.default_rng(42), 1_000_000)
    freq = np.bincount(draws, minlength=3) / len(draws)
    assert np.abs(freq - [0.2, 0.3, 0.5]).max() <= 0.005


def test_vectorised_draws_match_scalar_path():
    w = SelectionWeights.from_distribution([0.1, 0.0, 0.4, 0.25, 0.25])
    a = np.random.default_rng(9)
    b = np.random.default_rng(9)
    scalar = [select_creator(w, a) for _ in range(5000)]
    assert np.array_equal(sample_creators(w, b, 5000), scalar)
    assert 1 not in scalar


def _nodes(powers):
    return [NodeDescriptor(i, p) for i, p in enumerate(powers)]


def test_select_validators_clamped():
    rng = np.random.default_rng(0)
    assert select_validators(_nodes([1, 2]), 0, 3, rng) == [1]


def test_select_validators_excludes_creator_weighting():
    rng = np.random.default_rng(1)
    nodes = _nodes([1, 1, 1, 97])
    picks = [select_validators(nodes, 3, 1, rng)[0] for _ in range(100_000)]
    freq = np.bincount(picks, minlength=4) / len(picks)
    assert freq[3] == 0
    assert freq[:3] == pytest.approx([1 / 3] * 3, abs=0.01)


def test_select_validators_power_weighted_without_replacement():
    # brute-force probabilities of ordered pairs for a 4-node pool, creator excluded
    powers = [1.0, 2.0, 3.0, 4.0, 10.0]
    nodes = _nodes(powers)
    pool = [0, 1, 2, 3]
    total = sum(powers[i] for i in pool)
    expected_first = {i: powers[i] / total for i in pool}
    expected_in = {
        i: expected_first[i] + sum(expected_first[j] * powers[i] / (total - powers[j]) for j in pool if j != i)
        for i in pool
    }
    rng = np.random.default_rng(2)
    counts = np.zeros(5)
    trials = 60_000
    for _ in range(trials):
        comm = select_validators(nodes, 4, 2, rng)
        assert len(set(comm)) == 2
        counts[comm] += 1
    assert counts[4] == 0
    for i in pool:
        assert counts[i] / trials == pytest.approx(expected_in[i], abs=0.01)


def test_select_validators_errors():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        select_validators(_nodes([1, 2]), 0, 0, rng)
    with pytest.raises(ValueError):
        select_validators(_nodes([1]), 0, 1, rng)


@settings(max_examples=50)
@given(st.lists(st.floats(0.1, 10), min_size=2, max_size=12), st.integers(1, 15), st.integers(0, 2**32))
def test_committee_never_contains_creator_or_duplicates(powers, k, seed):
    nodes = _nodes(powers)
    rng = np.random.default_rng(seed)
    creator = seed % len(nodes)
    comm = select_validators(nodes, creator, k, rng)
    assert creator not in comm
    assert len(comm) == len(set(comm)) == min(k, len(nodes) - 1)


def test_lottery_gap_examples():
    rng = np.random.default_rng(0)
    certain = LotteryConfig(True, 0.5, 1, 1.0)
    assert all(draw_lottery_gap(certain, rng) == 0 for _ in range(100))
    for r, p, mean in [(1, 0.5, 1.0), (3, 0.25, 9.0)]:
        cfg = LotteryConfig(True, 0.5, r, p)
        draws = [draw_lottery_gap(cfg, rng) for _ in range(100_000)]
        assert np.mean(draws) == pytest.approx(mean, rel=0.02)
        assert cfg.expected_gap == pytest.approx(mean)


@pytest.mark.parametrize("kw", [{"nb_success_prob": 0}, {"nb_success_prob": 1.5}, {"nb_successes": 0}, {"low_power_quantile": 1.0}])
def test_lottery_config_errors(kw):
    with pytest.raises(ValueError):
        LotteryConfig(True, **kw)


def test_low_power_mask_includes_ties():
    assert low_power_mask([1, 1, 5, 9], 0.5).tolist() == [True, True, False, False]
    assert low_power_mask([3, 3, 3], 0.2).tolist() == [True, True, True]


def test_next_creator_disabled_passthrough():
    nodes = _nodes([1, 2, 3])
    w = combined_chance(creation_chance([1, 2, 3]), [0.5] * 3, 0.5)
    a, b = np.random.default_rng(4), np.random.default_rng(4)
    state = LotteryState(0)
    for _ in range(200):
        idx, is_lot, new_state = next_creator(w, nodes, LotteryConfig(), state, a)
        assert idx == select_creator(w, b)
        assert not is_lot and new_state is state


def test_next_creator_forced_lottery():
    nodes = _nodes([10, 10, 1, 10])
    w = combined_chance(creation_chance([10, 10, 1, 10]), [0.5] * 4, 0.5)
    lottery = LotteryConfig(True, 0.2, 1, 0.5)
    idx, is_lot, state = next_creator(w, nodes, lottery, LotteryState(0), np.random.default_rng(0))
    assert (idx, is_lot) == (2, True)
    assert state.failures_remaining >= 0


def test_next_creator_decrements():
    nodes = _nodes([1, 2])
    w = combined_chance(creation_chance([1, 2]), [0.5, 0.5], 1.0)
    _, is_lot, state = next_creator(w, nodes, LotteryConfig(True), LotteryState(3), np.random.default_rng(0))
    assert not is_lot and state.failures_remaining == 2


def test_next_creator_lottery_rate():
    nodes = _nodes(list(range(1, 11)))
    w = combined_chance(creation_chance([n.power for n in nodes]), [0.5] * 10, 0.5)
    lottery = LotteryConfig(True, 0.5, 1, 0.5)
    rng = np.random.default_rng(6)
    state = LotteryState(draw_lottery_gap(lottery, rng))
    hits = 0
    for _ in range(100_000):
        _, is_lot, state = next_creator(w, nodes, lottery, state, rng)
        hits += is_lot
    assert hits / 100_000 == pytest.approx(lottery.expected_share, rel=0.10)


def test_lottery_uses_trust_weights_unless_uniform():
    nodes = _nodes([1, 1, 50])
    w = combined_chance(creation_chance([1, 1, 50]), [0.9, 0.1, 0.5], 0.0)
    rng = np.random.default_rng(8)
    weighted = LotteryConfig(True, 0.5, 1, 1.0)
    picks = [next_creator(w, nodes, weighted, LotteryState(0), rng)[0] for _ in range(20_000)]
    assert np.mean(np.array(picks) == 0) == pytest.approx(0.9, abs=0.015)
    uniform = LotteryConfig(True, 0.5, 1, 1.0, uniform_within=True)
    picks = [next_creator(w, nodes, uniform, LotteryState(0), rng)[0] for _ in range(20_000)]
    assert np.mean(np.array(picks) == 0) == pytest.approx(0.5, abs=0.015)


@given(st.floats(0.1, 100), st.integers(2, 20), st.lists(st.floats(0.1, 100), min_size=1, max_size=8))
def test_sybil_split_creation_mass(power, k, others):
    before = creation_chance([power] + others)[0]
    after = creation_chance([power / k] * k + others)[:k].sum()
    assert after == pytest.approx(before, rel=1e-12)
    # with alpha < 1 and fresh trust 0.5 the coalition's raw mass grows with k
    raw_before = combined_chance(creation_chance([power] + others), [0.5] * (1 + len(others)), 0.5).combined_raw[0]
    raw_after = combined_chance(
        creation_chance([power / k] * k + others), [0.5] * (k + len(others)), 0.5
    ).combined_raw[:k].sum()
    assert raw_after > raw_before
    assert raw_after - raw_before == pytest.approx(0.5 * 0.5 * (k - 1), rel=1e-9)
