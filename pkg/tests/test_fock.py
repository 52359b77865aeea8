import json
import math

import pytest

from homfilter.fock import (
    NORM_TOL,
    MixedState,
    OutcomeDistribution,
    TwoModeState,
    from_sum_diff,
    inner_product,
    is_valid_sum_diff,
    make_uniform_fixed_sum,
    make_uniform_range,
    marginal_sum_diff,
    state_from_json,
    state_to_json,
    to_sum_diff,
    validate_sum_diff,
)


def test_labeling_round_trip():
    for n in range(6):
        for m in range(6):
            s, delta = to_sum_diff(n, m)
            assert (n, m) == from_sum_diff(s, delta)


def test_labeling_rejects_bad_pairs():
    with pytest.raises(ValueError):
        to_sum_diff(-1, 0)
    with pytest.raises(ValueError):
        from_sum_diff(2, 3)  # |Delta| > S
    with pytest.raises(ValueError):
        from_sum_diff(2, 1)  # parity
    with pytest.raises(ValueError):
        from_sum_diff(-2, 0)
    assert is_valid_sum_diff(4, -2)
    assert not is_valid_sum_diff(4, 3)
    validate_sum_diff(3, -1)


def test_fock_state_basics():
    state = TwoModeState.fock(2, 1)
    assert state.amplitude(2, 1) == 1.0
    assert state.amplitude(0, 0) == 0.0
    assert len(state) == 1
    assert state.shells() == [3]
    assert state.is_normalized()
    assert not state.is_empty


def test_state_requires_normalization():
    with pytest.raises(ValueError):
        TwoModeState({(0, 0): 0.5})
    # inside tolerance passes
    eps = NORM_TOL / 10.0
    TwoModeState({(0, 0): math.sqrt(1.0 - eps)})


def test_state_rejects_bad_keys_and_values():
    with pytest.raises(ValueError):
        TwoModeState({(-1, 0): 1.0})
    with pytest.raises(ValueError):
        TwoModeState({(0, 0): float("nan")})
    with pytest.raises(ValueError):
        TwoModeState({(0, 0): float("inf")})


def test_normalized_constructor_rescales():
    state = TwoModeState.normalized({(1, 0): 1.0, (0, 1): -1.0})
    root_half = math.sqrt(0.5)
    assert math.isclose(state.amplitude(1, 0), root_half, rel_tol=1e-15)
    assert math.isclose(state.amplitude(0, 1), -root_half, rel_tol=1e-15)
    with pytest.raises(ValueError):
        TwoModeState.normalized({(1, 0): 0.0})


def test_exact_zero_amplitudes_dropped():
    state = TwoModeState({(1, 0): 1.0, (5, 5): 0.0})
    assert len(state) == 1
    assert (5, 5) not in state.amplitudes


def test_empty_marker():
    empty = TwoModeState.empty()
    assert empty.is_empty
    assert len(empty) == 0
    assert empty.norm_squared() == 0.0


def test_state_equality_and_hash():
    a = TwoModeState.fock(1, 2)
    b = TwoModeState.fock(1, 2)
    assert a == b
    assert hash(a) == hash(b)
    assert a != TwoModeState.fock(2, 1)


def test_inner_product():
    plus = TwoModeState.normalized({(1, 0): 1.0, (0, 1): 1.0})
    minus = TwoModeState.normalized({(1, 0): 1.0, (0, 1): -1.0})
    assert math.isclose(inner_product(plus, plus), 1.0, rel_tol=1e-15)
    assert abs(inner_product(plus, minus)) < 1e-15
    assert math.isclose(inner_product(plus, TwoModeState.fock(1, 0)),
                        math.sqrt(0.5), rel_tol=1e-15)


def test_uniform_fixed_sum():
    state = make_uniform_fixed_sum(4)
    assert len(state) == 5
    amp = math.sqrt(1.0 / 5.0)
    for n in range(5):
        assert math.isclose(state.amplitude(n, 4 - n), amp, rel_tol=1e-15)
    assert state.is_normalized()
    # S_i = 0 degenerates to vacuum
    assert make_uniform_fixed_sum(0) == TwoModeState.fock(0, 0)


def test_uniform_range():
    state = make_uniform_range(1, 3)
    # shells 1..3 hold 2 + 3 + 4 basis states, equal shell weights
    assert state.shells() == [1, 2, 3]
    assert state.is_normalized()
    for s_i, count in [(1, 2), (2, 3), (3, 4)]:
        amp = math.sqrt(1.0 / (3 * count))
        for n in range(s_i + 1):
            assert math.isclose(state.amplitude(n, s_i - n), amp, rel_tol=1e-14)
    with pytest.raises(ValueError):
        make_uniform_range(3, 1)


def test_mixed_state_validation():
    pure = MixedState.pure(TwoModeState.fock(0, 0))
    assert len(pure) == 1
    assert not pure.is_empty
    with pytest.raises(ValueError):
        MixedState([(0.7, TwoModeState.fock(0, 0))])  # weights must sum to 1
    with pytest.raises(ValueError):
        MixedState([(-0.1, TwoModeState.fock(0, 0)),
                    (1.1, TwoModeState.fock(1, 0))])  # negative weight
    # exact-zero weights are dropped, like zero amplitudes in pure states
    dropped = MixedState([(0.0, TwoModeState.fock(0, 0)),
                          (1.0, TwoModeState.fock(1, 0))])
    assert len(dropped) == 1
    assert MixedState.empty().is_empty


def test_marginal_sum_diff_pure():
    state = TwoModeState.normalized({(2, 0): 1.0, (1, 1): 1.0, (0, 0): 1.0})
    dist = marginal_sum_diff(state)
    third = 1.0 / 3.0
    assert math.isclose(dist.get((2, 2)), third, rel_tol=1e-14)
    assert math.isclose(dist.get((2, 0)), third, rel_tol=1e-14)
    assert math.isclose(dist.get((0, 0)), third, rel_tol=1e-14)
    assert math.isclose(dist.total(), 1.0, rel_tol=1e-14)


def test_marginal_sum_diff_mixture():
    mixed = MixedState([
        (0.25, TwoModeState.fock(1, 0)),
        (0.75, TwoModeState.normalized({(1, 0): 1.0, (0, 1): 1.0})),
    ])
    dist = marginal_sum_diff(mixed)
    assert math.isclose(dist.get((1, 1)), 0.25 + 0.375, rel_tol=1e-14)
    assert math.isclose(dist.get((1, -1)), 0.375, rel_tol=1e-14)
    with pytest.raises(ValueError):
        marginal_sum_diff(MixedState.empty())


def test_outcome_distribution_api():
    dist = OutcomeDistribution({2: 0.5, -2: 0.5, 0: 0.0})
    assert dist.support() == [-2, 0, 2]
    assert dist.get(0) == 0.0
    assert dist.get(17) == 0.0
    assert math.isclose(dist.total(), 1.0, rel_tol=1e-15)
    assert not dist.impossible
    assert OutcomeDistribution({}, impossible=True).impossible
    assert list(dist.items()) == [(-2, 0.5), (0, 0.0), (2, 0.5)]


def test_state_json_round_trip():
    state = TwoModeState.normalized({(3, 1): 0.6, (2, 2): -0.8})
    text = state_to_json(state)
    again = state_from_json(text)
    assert again == state


def test_state_json_rejects_malformed():
    with pytest.raises(ValueError):
        state_from_json("{not json")
    with pytest.raises(ValueError):
        state_from_json(json.dumps({"terms": [{"n": 0, "m": 0, "amp": 0.5}]}))
    with pytest.raises(ValueError):
        state_from_json(json.dumps({"terms": [
            {"n": 0, "m": 0, "amp": 1.0},
            {"n": 0, "m": 0, "amp": 1.0},
        ]}))
    with pytest.raises(ValueError):
        state_from_json(json.dumps({"terms": [{"n": -1, "m": 0, "amp": 1.0}]}))
