"""Detector response models and the Bayes mixtures they induce."""

import math

import pytest

from homfilter import (
    DetectorModel,
    FilterSettings,
    MeasurementOutcome,
    MixedState,
    TwoModeState,
    conditional_state,
    joint_response,
    noisy_filtered_state,
    outcome_probability,
    purity,
    response,
    make_uniform_fixed_sum,
)
from homfilter.detectors import GAUSS_SPAN_SIGMAS


def total_variation(dist_a, dist_b):
    labels = set(dist_a.support()) | set(dist_b.support())
    return 0.5 * math.fsum(abs(dist_a.get(x) - dist_b.get(x)) for x in labels)


# ---------------------------------------------------------------- models


def test_model_constructors():
    assert DetectorModel.ideal().kind == "ideal"
    assert DetectorModel.binomial(0.8).eta == 0.8
    assert DetectorModel.gaussian(2.5).sigma == 2.5


def test_model_validation():
    with pytest.raises(ValueError):
        DetectorModel("ideal", eta=0.9)
    with pytest.raises(ValueError):
        DetectorModel("binomial")
    with pytest.raises(ValueError):
        DetectorModel.binomial(0.0)
    with pytest.raises(ValueError):
        DetectorModel.binomial(1.2)
    with pytest.raises(ValueError):
        DetectorModel.gaussian(0.0)
    with pytest.raises(ValueError):
        DetectorModel.gaussian(-1.0)
    with pytest.raises(ValueError):
        DetectorModel("poisson")
    # eta = 1 is a legal lossless detector, not a validation error
    DetectorModel.binomial(1.0)


# -------------------------------------------------------------- response


def test_ideal_response_is_point_mass():
    for true_k in (0, 1, 7, 40):
        dist = response(DetectorModel.ideal(), true_k)
        assert dist.support() == [true_k]
        assert dist.get(true_k) == 1.0


def test_response_rejects_negative_count():
    with pytest.raises(ValueError):
        response(DetectorModel.ideal(), -1)
    with pytest.raises(ValueError):
        response(DetectorModel.binomial(0.5), -3)


def test_binomial_response_half_eta_two_photons():
    dist = response(DetectorModel.binomial(0.5), 2)
    assert dist.get(0) == pytest.approx(0.25, abs=1e-15)
    assert dist.get(1) == pytest.approx(0.5, abs=1e-15)
    assert dist.get(2) == pytest.approx(0.25, abs=1e-15)


def test_binomial_response_matches_pmf():
    """Reported counts follow binomial thinning of the true count."""
    eta = 0.73
    true_k = 9
    dist = response(DetectorModel.binomial(eta), true_k)
    for reported in range(true_k + 1):
        expected = (
            math.comb(true_k, reported)
            * (1 - eta) ** (true_k - reported)
            * eta**reported
        )
        assert dist.get(reported) == pytest.approx(expected, rel=1e-12)


def test_binomial_is_loss_only():
    # a lossy counter never reports more photons than arrived
    for true_k in (0, 1, 5, 23):
        dist = response(DetectorModel.binomial(0.4), true_k)
        assert max(dist.support()) <= true_k
        assert min(dist.support()) >= 0


def test_binomial_unit_eta_reduces_to_ideal():
    for true_k in (0, 3, 7):
        dist = response(DetectorModel.binomial(1.0), true_k)
        assert dist.support() == [true_k]
        assert dist.get(true_k) == 1.0


def test_gaussian_can_overcount():
    dist = response(DetectorModel.gaussian(1.5), 4)
    assert max(dist.support()) > 4
    assert min(dist.support()) >= 0


def test_gaussian_window_and_symmetry():
    sigma, true_k = 1.2, 30
    dist = response(DetectorModel.gaussian(sigma), true_k)
    span = GAUSS_SPAN_SIGMAS * sigma
    for reported in dist.support():
        assert abs(reported - true_k) <= span
    # no clipping at zero here, so the blur is symmetric about the true count
    for j in range(1, 5):
        assert dist.get(true_k - j) == pytest.approx(dist.get(true_k + j), rel=1e-12)
    # renormalization preserves likelihood ratios of the continuous density
    ratio = dist.get(true_k + 1) / dist.get(true_k)
    assert ratio == pytest.approx(math.exp(-1.0 / (2.0 * sigma**2)), rel=1e-12)


def test_gaussian_clipped_at_zero_still_normalized():
    dist = response(DetectorModel.gaussian(2.0), 1)
    assert min(dist.support()) == 0
    assert dist.total() == pytest.approx(1.0, abs=1e-12)
    # clipping removes the negative tail, so the mode keeps more weight
    assert dist.get(1) > dist.get(0)


@pytest.mark.parametrize(
    "model",
    [
        DetectorModel.ideal(),
        DetectorModel.binomial(0.3),
        DetectorModel.binomial(0.95),
        DetectorModel.gaussian(0.5),
        DetectorModel.gaussian(5.0 / 3.0),
        DetectorModel.gaussian(20.0 / 3.0),
    ],
)
@pytest.mark.parametrize("true_k", [0, 1, 7, 50, 300])
def test_response_normalization(model, true_k):
    dist = response(model, true_k)
    assert abs(dist.total() - 1.0) <= 1e-10


def test_limit_reduction_to_ideal():
    """Small imperfections stay close to the ideal point mass.

    The total-variation gap must fall below 10*eps and shrink with eps.
    """
    true_k = 4
    ideal = response(DetectorModel.ideal(), true_k)
    for make in (
        lambda eps: DetectorModel.binomial(1.0 - eps),
        lambda eps: DetectorModel.gaussian(eps),
    ):
        gaps = []
        for eps in (1e-3, 1e-4, 1e-5):
            gap = total_variation(response(make(eps), true_k), ideal)
            assert gap < 10.0 * eps
            gaps.append(gap)
        assert gaps[0] >= gaps[1] >= gaps[2]


def test_limit_reduction_joint():
    reported = MeasurementOutcome(4, 2)
    ideal = joint_response(DetectorModel.ideal(), reported)
    previous = None
    for eps in (1e-3, 1e-4, 1e-5):
        gap = total_variation(
            joint_response(DetectorModel.binomial(1.0 - eps), reported), ideal
        )
        assert gap < 10.0 * eps
        if previous is not None:
            assert gap <= previous
        previous = gap


# -------------------------------------------------------- joint response


def test_joint_response_ideal():
    dist = joint_response(DetectorModel.ideal(), MeasurementOutcome(4, 2))
    assert dist.support() == [(4, 2)]
    assert dist.get((4, 2)) == 1.0


def test_joint_response_two_half_photons():
    # true (2, 0) means one photon per counter, each kept with p = 1/2
    dist = joint_response(DetectorModel.binomial(0.5), MeasurementOutcome(2, 0))
    assert dist.get((0, 0)) == pytest.approx(0.25, abs=1e-15)
    assert dist.get((1, -1)) == pytest.approx(0.25, abs=1e-15)
    assert dist.get((1, 1)) == pytest.approx(0.25, abs=1e-15)
    assert dist.get((2, 0)) == pytest.approx(0.25, abs=1e-15)
    assert dist.total() == pytest.approx(1.0, abs=1e-10)


def test_joint_response_factorizes():
    """The two counters degrade independently."""
    model = DetectorModel.gaussian(0.9)
    true = MeasurementOutcome(7, 3)
    k_resp = response(model, true.k)
    l_resp = response(model, true.l)
    joint = joint_response(model, true)
    assert joint.total() == pytest.approx(1.0, abs=1e-10)
    for (s_rep, d_rep), p in joint.items():
        k_rep = (s_rep - d_rep) // 2
        l_rep = (s_rep + d_rep) // 2
        assert p == pytest.approx(k_resp.get(k_rep) * l_resp.get(l_rep), rel=1e-12)


def test_joint_response_binomial_support_box():
    joint = joint_response(DetectorModel.binomial(0.6), MeasurementOutcome(6, 2))
    for s_rep, d_rep in joint.support():
        k_rep = (s_rep - d_rep) // 2
        l_rep = (s_rep + d_rep) // 2
        assert 0 <= k_rep <= 2
        assert 0 <= l_rep <= 4


# --------------------------------------------------- noisy filtered state


def test_ideal_model_reproduces_conditional_state():
    state = make_uniform_fixed_sum(8)
    settings = FilterSettings(reflectivity=0.3)
    outcome = MeasurementOutcome(4, 0)
    prob, mixed = noisy_filtered_state(state, settings, outcome, DetectorModel.ideal())
    ref_prob, ref_state = conditional_state(state, settings, outcome)
    assert prob == ref_prob
    assert len(mixed) == 1
    weight, term = mixed.terms[0]
    assert weight == 1.0
    assert term == ref_state


def test_ideal_model_impossible_report_is_empty():
    state = TwoModeState({(1, 0): 1.0})
    settings = FilterSettings(reflectivity=0.5)
    prob, mixed = noisy_filtered_state(
        state, settings, MeasurementOutcome(4, 0), DetectorModel.ideal()
    )
    assert prob == 0.0
    assert mixed.is_empty


def test_binomial_report_above_input_is_empty():
    # losses cannot add photons, so a report above the input shell is dead
    state = make_uniform_fixed_sum(4)
    settings = FilterSettings(reflectivity=0.5)
    prob, mixed = noisy_filtered_state(
        state, settings, MeasurementOutcome(6, 0), DetectorModel.binomial(0.9)
    )
    assert prob == 0.0
    assert mixed.is_empty


def test_noisy_mixture_weights_follow_bayes_rule():
    """Term weights are likelihood times prior, renormalized."""
    state = make_uniform_fixed_sum(6)
    settings = FilterSettings(reflectivity=0.4)
    model = DetectorModel.binomial(0.8)
    reported = MeasurementOutcome(2, 0)
    prob, mixed = noisy_filtered_state(state, settings, reported, model)
    assert not mixed.is_empty
    # rebuild the posterior directly from the definitions
    posterior = {}
    for true_s in range(7):
        for true_d in range(-true_s, true_s + 1, 2):
            true = MeasurementOutcome(true_s, true_d)
            like = joint_response(model, true).get((reported.s, reported.delta))
            if like == 0.0:
                continue
            prior = outcome_probability(state, settings, true)
            if prior > 0.0:
                posterior[(true_s, true_d)] = like * prior
    marginal = math.fsum(posterior.values())
    assert prob == pytest.approx(marginal, rel=1e-12)
    assert len(mixed) == len(posterior)
    for (weight, term), (label, raw) in zip(mixed.terms, sorted(posterior.items())):
        assert weight == pytest.approx(raw / marginal, rel=1e-11)
        ref = conditional_state(state, settings, MeasurementOutcome(*label))[1]
        assert term == ref


@pytest.mark.parametrize(
    "model",
    [DetectorModel.binomial(0.7), DetectorModel.gaussian(0.8)],
)
def test_report_marginals_sum_to_one(model):
    """Summing the report marginal over every reachable report returns
    the whole probability: the noise only relabels outcomes."""
    state = make_uniform_fixed_sum(5)
    settings = FilterSettings(reflectivity=0.35)
    reach = 5 if model.kind == "binomial" else 5 + math.ceil(
        GAUSS_SPAN_SIGMAS * model.sigma
    )
    total = 0.0
    for k_rep in range(reach + 1):
        for l_rep in range(reach + 1):
            reported = MeasurementOutcome(k_rep + l_rep, l_rep - k_rep)
            prob, _ = noisy_filtered_state(state, settings, reported, model)
            total += prob
    assert total == pytest.approx(1.0, abs=1e-10)


def test_perfect_binomial_matches_ideal_mixture():
    state = make_uniform_fixed_sum(6)
    settings = FilterSettings(reflectivity=0.25)
    outcome = MeasurementOutcome(4, 2)
    prob_noisy, mixed = noisy_filtered_state(
        state, settings, outcome, DetectorModel.binomial(1.0)
    )
    prob_ideal, pure = conditional_state(state, settings, outcome)
    assert prob_noisy == pytest.approx(prob_ideal, rel=1e-12)
    assert len(mixed) == 1
    assert mixed.terms[0][1] == pure


# ----------------------------------------------------------------- purity


def test_purity_single_term_is_exactly_one():
    mixed = MixedState.pure(TwoModeState({(2, 1): 1.0}))
    assert purity(mixed) == 1.0


def test_purity_orthogonal_pair():
    a = TwoModeState({(1, 0): 1.0})
    b = TwoModeState({(0, 1): 1.0})
    assert purity(MixedState([(0.5, a), (0.5, b)])) == pytest.approx(0.5, abs=1e-15)
    assert purity(MixedState([(0.9, a), (0.1, b)])) == pytest.approx(0.82, abs=1e-15)


def test_purity_equal_orthogonal_mixture_hits_lower_bound():
    n = 6
    terms = [(1.0 / n, TwoModeState({(k, 0): 1.0})) for k in range(n)]
    assert purity(MixedState(terms)) == pytest.approx(1.0 / n, rel=1e-12)


def test_purity_rank_one_despite_two_terms():
    psi = TwoModeState({(1, 0): math.sqrt(0.5), (0, 1): math.sqrt(0.5)})
    mixed = MixedState([(0.3, psi), (0.7, psi)])
    assert purity(mixed) == pytest.approx(1.0, abs=1e-12)


def test_purity_overlapping_pair():
    # gamma = w^2 + (1-w)^2 + 2 w (1-w) |<a|b>|^2 for a two-term mixture
    a = TwoModeState({(2, 0): 1.0})
    b = TwoModeState({(2, 0): math.sqrt(0.5), (0, 2): math.sqrt(0.5)})
    w = 0.35
    expected = w**2 + (1 - w) ** 2 + 2 * w * (1 - w) * 0.5
    assert purity(MixedState([(w, a), (1 - w, b)])) == pytest.approx(expected, rel=1e-12)


def test_purity_empty_mixture_rejected():
    with pytest.raises(ValueError):
        purity(MixedState.empty())


def test_unnormalized_mixture_rejected():
    a = TwoModeState({(1, 0): 1.0})
    with pytest.raises(ValueError):
        MixedState([(0.5, a), (0.2, a)])


def test_purity_of_noisy_filter_output_in_bounds():
    state = make_uniform_fixed_sum(8)
    settings = FilterSettings(reflectivity=0.1)
    prob, mixed = noisy_filtered_state(
        state, settings, MeasurementOutcome(2, 0), DetectorModel.binomial(0.9)
    )
    assert prob > 0.0
    gamma = purity(mixed)
    assert 1.0 / len(mixed) <= gamma + 1e-15
    assert gamma <= 1.0
