"""Imperfect photon counting and the mixed states it leaves behind.

Two noise families: per-photon loss with survival probability eta
(binomial thinning, reported count never exceeds the true count) and a
Gaussian count blur of deviation sigma evaluated on integer reports
(over- and under-counting), plus the ideal limit of both.  Conditioning
on a noisy report turns the heralded pure state into a Bayes mixture of
the candidate true outcomes; purity measures what survives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .filtering import FilterSettings, MeasurementOutcome, conditional_state
from .fock import MixedState, OutcomeDistribution, TwoModeState

GAUSS_SPAN_SIGMAS = 8.0
WEIGHT_CUT = 1e-14


@dataclass(frozen=True)
class DetectorModel:
    """ideal | binomial(eta) | gaussian(sigma), applied per detector."""

    kind: str
    eta: Optional[float] = None
    sigma: Optional[float] = None

    def __post_init__(self):
        if self.kind == "ideal":
            if self.eta is not None or self.sigma is not None:
                raise ValueError("ideal detectors take no parameters")
        elif self.kind == "binomial":
            if self.eta is None or not (0.0 < self.eta <= 1.0):
                raise ValueError(f"binomial model needs eta in (0, 1], got {self.eta!r}")
        elif self.kind == "gaussian":
            if self.sigma is None or not (self.sigma > 0.0):
                raise ValueError(f"gaussian model needs sigma > 0, got {self.sigma!r}")
        else:
            raise ValueError(f"unknown detector model {self.kind!r}")

    @classmethod
    def ideal(cls) -> "DetectorModel":
        return cls("ideal")

    @classmethod
    def binomial(cls, eta: float) -> "DetectorModel":
        return cls("binomial", eta=eta)

    @classmethod
    def gaussian(cls, sigma: float) -> "DetectorModel":
        return cls("gaussian", sigma=sigma)


@lru_cache(maxsize=65536)
def _gauss_response(sigma: float, true_k: int) -> dict[int, float]:
    # integer reports within GAUSS_SPAN_SIGMAS deviations, clipped at zero,
    # renormalized so the discretized blur is a proper distribution
    lo = max(0, math.ceil(true_k - GAUSS_SPAN_SIGMAS * sigma))
    hi = math.floor(true_k + GAUSS_SPAN_SIGMAS * sigma)
    reports = np.arange(lo, hi + 1)
    weights = np.exp(-((reports - true_k) ** 2) / (2.0 * sigma * sigma))
    weights /= weights.sum()
    return dict(zip(reports.tolist(), weights.tolist()))


def _binomial_pmf(true_k: int, reported_k: int, eta: float) -> float:
    if reported_k < 0 or reported_k > true_k:
        return 0.0
    return float(
        math.comb(true_k, reported_k)
        * (1.0 - eta) ** (true_k - reported_k)
        * eta ** reported_k
    )


def _response_at(model: DetectorModel, true_k: int, reported_k: int) -> float:
    """P(single counter reports reported_k | true count true_k)."""
    if model.kind == "ideal":
        return 1.0 if reported_k == true_k else 0.0
    if model.kind == "binomial":
        return _binomial_pmf(true_k, reported_k, model.eta)
    return _gauss_response(model.sigma, true_k).get(reported_k, 0.0)


def response(model: DetectorModel, true_k: int) -> OutcomeDistribution:
    """Distribution of the reported count for one counter seeing true_k."""
    if true_k < 0:
        raise ValueError(f"true count must be nonnegative, got {true_k}")
    if model.kind == "ideal":
        return OutcomeDistribution({true_k: 1.0})
    if model.kind == "binomial":
        # exact zeros (eta = 1, or underflow at tiny eta) are not reports
        return OutcomeDistribution({
            reported: pmf
            for reported in range(true_k + 1)
            if (pmf := _binomial_pmf(true_k, reported, model.eta)) > 0.0
        })
    return OutcomeDistribution(_gauss_response(model.sigma, true_k))


def joint_response(model: DetectorModel, outcome_true: MeasurementOutcome) -> OutcomeDistribution:
    """Reported (S', Delta') distribution for one true outcome.

    The two counters degrade independently, so this is the product of two
    single-counter responses re-indexed by sum and difference.
    """
    k_resp = response(model, outcome_true.k)
    l_resp = response(model, outcome_true.l)
    joint: dict[tuple[int, int], float] = {}
    for k_rep, pk in k_resp.items():
        for l_rep, pl in l_resp.items():
            joint[(k_rep + l_rep, l_rep - k_rep)] = pk * pl
    return OutcomeDistribution(joint)


def _candidate_true_outcomes(
    model: DetectorModel, reported: MeasurementOutcome, s_max: int
) -> list[tuple[int, int, float]]:
    """(K, L, likelihood) for true pairs that can yield the report."""
    if model.kind == "binomial":
        k_lo, l_lo = reported.k, reported.l
        k_hi = s_max - reported.l
        l_hi = s_max - reported.k
    else:
        span = math.ceil(GAUSS_SPAN_SIGMAS * model.sigma)
        k_lo = max(0, reported.k - span)
        l_lo = max(0, reported.l - span)
        k_hi = min(reported.k + span, s_max)
        l_hi = min(reported.l + span, s_max)
    candidates = []
    for true_k in range(k_lo, k_hi + 1):
        like_k = _response_at(model, true_k, reported.k)
        if like_k == 0.0:
            continue
        for true_l in range(l_lo, min(l_hi, s_max - true_k) + 1):
            like = like_k * _response_at(model, true_l, reported.l)
            if like > 0.0:
                candidates.append((true_k, true_l, like))
    return candidates


def noisy_filtered_state(
    input_state: TwoModeState,
    settings: FilterSettings,
    reported: MeasurementOutcome,
    model: DetectorModel,
) -> tuple[float, MixedState]:
    """Mixed heralded state given a noisy detector report.

    Candidate true outcomes (S', Delta') are weighted by
    P(report | true) * P(true | input); each carries its ideal
    conditional state.  Returns the marginal probability of the report
    and the weight-normalized mixture (empty marker when the report is
    unreachable).  Candidates whose conservative weight bound falls below
    ``WEIGHT_CUT`` of the running total are dropped.
    """
    if model.kind == "ideal":
        prob, state = conditional_state(input_state, settings, reported)
        if prob <= 0.0:
            return 0.0, MixedState.empty()
        return prob, MixedState.pure(state)
    shells = input_state.shells()
    if not shells:
        raise ValueError("filter input must be a normalized TwoModeState")
    candidates = _candidate_true_outcomes(model, reported, max(shells))
    # the likelihood alone bounds each weight (true-outcome probability <= 1),
    # so one descending pass with a suffix-bound cutoff is a safe truncation
    candidates.sort(key=lambda c: -c[2])
    suffix = np.cumsum([c[2] for c in reversed(candidates)])[::-1] if candidates else []
    total = 0.0
    terms: list[tuple[tuple[int, int], float, TwoModeState]] = []
    for index, (true_k, true_l, like) in enumerate(candidates):
        if total > 0.0 and suffix[index] < WEIGHT_CUT * total:
            break
        true = MeasurementOutcome(true_k + true_l, true_l - true_k)
        prob, state = conditional_state(input_state, settings, true)
        if prob <= 0.0:
            continue
        weight = like * prob
        total += weight
        terms.append(((true.s, true.delta), weight, state))
    if total <= 0.0:
        return 0.0, MixedState.empty()
    terms.sort(key=lambda t: t[0])
    return total, MixedState((w / total, s) for _, w, s in terms)


def purity(mixed: MixedState) -> float:
    """gamma = Tr(rho^2) = sum_ij w_i w_j |<psi_i|psi_j>|^2.

    A single-term mixture is pure by construction.  The Gram matrix is
    evaluated densely over the union of the sparse supports.
    """
    if mixed.is_empty:
        raise ValueError("purity of an empty mixture is undefined")
    if len(mixed) == 1:
        return 1.0
    index: dict[tuple[int, int], int] = {}
    for _, state in mixed.terms:
        for key in state.amplitudes:
            if key not in index:
                index[key] = len(index)
    matrix = np.zeros((len(mixed), len(index)))
    weights = np.empty(len(mixed))
    for row, (weight, state) in enumerate(mixed.terms):
        weights[row] = weight
        for key, amp in state.items():
            matrix[row, index[key]] = amp
    gram = matrix @ matrix.T
    gamma = float(weights @ (gram * gram) @ weights)
    return min(gamma, 1.0)
