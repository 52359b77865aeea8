"""Feed-forward photon-number filter.

A weakly reflecting tap (reflectivity r) splits a small sample off the
two-mode input; the sample's polarization modes interfere on a balanced
splitter whose output ports carry photon counters reading (K, L).  A
count pair heralds a conditional transmitted state, coherently projected
onto the lines S_t = S_i - S (S = K + L), and an analysis box evaluates
a condition C(S_t, |Delta_t|) on it to decide whether a shutter opens.

For a reflected pair (v, w) the detector-port amplitude is

    T(v, w, K) = sqrt(K! L! / (v! w! 2^S)) * sum_{p+q=K} C(v,p) C(w,q) (-1)^q

and the transmitted amplitude at (k, l), given input amplitudes xi, is

    psi(k, l) = sum_{v+w=S} xi[k+v, l+w]
                * sqrt(C(k+v, v) C(l+w, w) r^S t^(k+l)) * T(v, w, K).

The alternating sum is exact-integer (``numerics``); all factorial and
splitting factors combine in log space, so the engine stays accurate at
several hundred photons where every direct float formula fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Optional, Union

import numpy as np

from .condition import FilterCondition, evaluate
from .fock import (
    MixedState,
    OutcomeDistribution,
    TwoModeState,
    validate_sum_diff,
)
from .numerics import LN2, log_factorial_table, signed_binomial_column


@dataclass(frozen=True)
class FilterSettings:
    """Tapping reflectivity plus the (optional) shutter condition.

    ``condition=None`` leaves the shutter always open.  ``clamp_domain_errors``
    opts into treating numeric domain faults inside the condition as an
    unmet condition instead of raising (non-default; see ``condition``).
    """

    reflectivity: float
    condition: Optional[FilterCondition] = None
    condition_params: Mapping[str, float] = field(default_factory=dict)
    clamp_domain_errors: bool = False

    def __post_init__(self):
        r = self.reflectivity
        if not (0.0 < r < 1.0):
            raise ValueError(f"reflectivity must lie strictly in (0, 1), got {r!r}")

    @property
    def transmissivity(self) -> float:
        return 1.0 - self.reflectivity


@dataclass(frozen=True)
class MeasurementOutcome:
    """Detector reading: total S = K + L and difference Delta = L - K."""

    s: int
    delta: int

    def __post_init__(self):
        validate_sum_diff(self.s, self.delta)

    @property
    def k(self) -> int:
        return (self.s - self.delta) // 2

    @property
    def l(self) -> int:
        return (self.s + self.delta) // 2


@lru_cache(maxsize=8192)
def _bracket_column(s: int, k_count: int) -> tuple[np.ndarray, np.ndarray]:
    """Signs and log magnitudes of the detector bracket over v = 0..s."""
    values = signed_binomial_column(s, k_count)
    signs = np.array([math.copysign(1.0, x) if x else 0.0 for x in values])
    log_mag = np.array([math.log(abs(x)) if x else 0.0 for x in values])
    return signs, log_mag


def _line_amplitudes(
    xi_vec: np.ndarray, s_i: int, k_count: int, l_count: int, r: float
) -> np.ndarray:
    """Unnormalized transmitted amplitudes along the line S_t = s_i - S.

    ``xi_vec[n]`` holds the input amplitude at (n, s_i - n); entry i of
    the result sits at (k, l) = (i, S_t - i).  Every weight factor is
    bounded by one, so only harmless underflow can occur.
    """
    s = k_count + l_count
    s_t = s_i - s
    lf = log_factorial_table(s_i)
    vs = np.arange(s + 1)
    ws = s - vs
    signs, log_b = _bracket_column(s, k_count)
    ks = np.arange(s_t + 1)
    ls = s_t - ks
    n = ks[:, None] + vs[None, :]
    m = ls[:, None] + ws[None, :]
    log_mag = 0.5 * (
        lf[k_count] + lf[l_count] - s * LN2
        + lf[n] + lf[m]
        - 2.0 * lf[vs][None, :] - 2.0 * lf[ws][None, :]
        - lf[ks][:, None] - lf[ls][:, None]
        + s * math.log(r)
        + (s_t * math.log(1.0 - r) if s_t else 0.0)
    ) + log_b[None, :]
    return (signs[None, :] * xi_vec[n] * np.exp(log_mag)).sum(axis=1)


def _shell_vectors(state: TwoModeState) -> dict[int, np.ndarray]:
    shells: dict[int, np.ndarray] = {}
    for (n, m), amp in state.items():
        vec = shells.get(n + m)
        if vec is None:
            vec = shells[n + m] = np.zeros(n + m + 1)
        vec[n] = amp
    return shells


def _conditional_pieces(
    state: TwoModeState, r: float, outcome: MeasurementOutcome
) -> Optional[list[tuple[int, np.ndarray]]]:
    """Per-shell unnormalized line amplitudes, or None when the outcome is
    structurally impossible (every shell holds fewer than S photons)."""
    shells = _shell_vectors(state)
    pieces = [
        (s_i, _line_amplitudes(vec, s_i, outcome.k, outcome.l, r))
        for s_i, vec in sorted(shells.items())
        if s_i >= outcome.s
    ]
    return pieces or None


def _check_input(state: TwoModeState) -> None:
    if not state.is_normalized():
        raise ValueError("filter input must be a normalized TwoModeState")


def _phase_fixed(amps: dict[tuple[int, int], float]) -> dict[tuple[int, int], float]:
    # deterministic global sign: among amplitudes within a whisker of the
    # largest magnitude, the highest (n, m) key is made positive; the band
    # absorbs last-ulp noise so equivalent computation paths agree
    top = max(abs(amp) for amp in amps.values())
    anchor = max(key for key, amp in amps.items() if abs(amp) >= top * (1.0 - 1e-9))
    if amps[anchor] < 0.0:
        return {key: -amp for key, amp in amps.items()}
    return amps


def _collect_state(
    pieces: list[tuple[int, np.ndarray]], s: int, prob: float
) -> TwoModeState:
    scale = 1.0 / math.sqrt(prob)
    amps: dict[tuple[int, int], float] = {}
    for s_i, line in pieces:
        s_t = s_i - s
        for k, amp in enumerate(line):
            if amp != 0.0:
                amps[(k, s_t - k)] = amp * scale
    return TwoModeState.normalized(_phase_fixed(amps))


def _pieces_probability(pieces: list[tuple[int, np.ndarray]]) -> float:
    return math.fsum(float((line * line).sum()) for _, line in pieces)


def conditional_state(
    input_state: TwoModeState,
    settings: FilterSettings,
    outcome: MeasurementOutcome,
) -> tuple[float, TwoModeState]:
    """Heralded transmitted state for one detector outcome.

    Returns (P(outcome), normalized transmitted state).  Impossible and
    zero-probability outcomes both give (0.0, empty marker).  The
    settings' shutter condition plays no role here; conditioning on the
    detectors alone is the bare projection (see :func:`apply_kraus` for
    the condition-gated version).
    """
    _check_input(input_state)
    pieces = _conditional_pieces(input_state, settings.reflectivity, outcome)
    if pieces is None:
        return 0.0, TwoModeState.empty()
    prob = _pieces_probability(pieces)
    if prob <= 0.0:
        return 0.0, TwoModeState.empty()
    return prob, _collect_state(pieces, outcome.s, prob)


def conditional_distribution(
    input_state: TwoModeState,
    settings: FilterSettings,
    outcome: MeasurementOutcome,
) -> OutcomeDistribution:
    """Transmitted (S_t, Delta_t) probabilities for one detector outcome.

    The support covers every point of each contributing line, zeros
    included, so tables show the whole line.  A structurally impossible
    outcome yields the ``impossible`` marker; an outcome that merely has
    zero amplitude everywhere yields an ordinary empty distribution.
    """
    _check_input(input_state)
    pieces = _conditional_pieces(input_state, settings.reflectivity, outcome)
    if pieces is None:
        return OutcomeDistribution({}, impossible=True)
    prob = _pieces_probability(pieces)
    if prob <= 0.0:
        return OutcomeDistribution({})
    out: dict[tuple[int, int], float] = {}
    for s_i, line in pieces:
        s_t = s_i - outcome.s
        for k, amp in enumerate(line):
            out[(s_t, 2 * k - s_t)] = amp * amp / prob
    return OutcomeDistribution(out)


def outcome_probability(
    input_state: TwoModeState,
    settings: FilterSettings,
    outcome: MeasurementOutcome,
) -> float:
    """P(detectors read ``outcome``) without building the state."""
    _check_input(input_state)
    pieces = _conditional_pieces(input_state, settings.reflectivity, outcome)
    return 0.0 if pieces is None else _pieces_probability(pieces)


class FCoefficients:
    """Closed-form line coefficients for a Fock-state input.

    For input (S_i, Delta_i) and outcome (S, Delta) the transmitted state
    is sum over Delta_r of f(Delta_r) |S_i - S, Delta_i - Delta_r> before
    renormalization.  The support is the parity-respecting window
    Delta_r in [max(-S, Delta_i - S_t), min(S, Delta_i + S_t)]; values
    may vanish inside it and may be negative (the bracket alternates).
    Squared values sum to P(outcome); normalized squares sum to one.
    """

    __slots__ = ("s_i", "delta_i", "outcome", "reflectivity", "values")

    def __init__(self, s_i: int, delta_i: int, outcome: MeasurementOutcome,
                 reflectivity: float, values: dict[int, float]):
        self.s_i = s_i
        self.delta_i = delta_i
        self.outcome = outcome
        self.reflectivity = reflectivity
        self.values = values

    @property
    def delta_r_min(self) -> int:
        return min(self.values)

    @property
    def delta_r_max(self) -> int:
        return max(self.values)

    def probability(self) -> float:
        return math.fsum(f * f for f in self.values.values())

    def reconstruct(self) -> tuple[float, TwoModeState]:
        """(P(outcome), normalized transmitted state) rebuilt from f alone."""
        prob = self.probability()
        if prob <= 0.0:
            return 0.0, TwoModeState.empty()
        s_t = self.s_i - self.outcome.s
        amps: dict[tuple[int, int], float] = {}
        for delta_r, f in self.values.items():
            if f != 0.0:
                delta_t = self.delta_i - delta_r
                amps[((s_t + delta_t) // 2, (s_t - delta_t) // 2)] = f
        return prob, TwoModeState.normalized(_phase_fixed(amps))

    def __repr__(self) -> str:
        return (f"FCoefficients(S_i={self.s_i}, Delta_i={self.delta_i}, "
                f"outcome=({self.outcome.s}, {self.outcome.delta}), "
                f"Delta_r in [{self.delta_r_min}, {self.delta_r_max}])")


def f_coefficients(
    s_i: int,
    delta_i: int,
    settings: FilterSettings,
    outcome: MeasurementOutcome,
) -> FCoefficients:
    """Line coefficients f(Delta_r) for the Fock input (S_i, Delta_i)."""
    validate_sum_diff(s_i, delta_i)
    if outcome.s > s_i:
        raise ValueError(
            f"outcome needs S <= S_i, got S={outcome.s} on the shell S_i={s_i}"
        )
    s_t = s_i - outcome.s
    xi_vec = np.zeros(s_i + 1)
    xi_vec[(s_i + delta_i) // 2] = 1.0
    line = _line_amplitudes(xi_vec, s_i, outcome.k, outcome.l, settings.reflectivity)
    lo = max(-outcome.s, delta_i - s_t)
    hi = min(outcome.s, delta_i + s_t)
    values = {
        delta_r: float(line[(s_t + delta_i - delta_r) // 2])
        for delta_r in range(lo, hi + 1, 2)
    }
    return FCoefficients(s_i, delta_i, outcome, settings.reflectivity, values)


def _condition_mask(
    settings: FilterSettings, s_t: int, length: int
) -> Optional[np.ndarray]:
    """Boolean keep-mask over line indices, or None when always open."""
    if settings.condition is None:
        return None
    mode = "false" if settings.clamp_domain_errors else "raise"
    return np.array([
        evaluate(settings.condition, s_t, 2 * k - s_t,
                 settings.condition_params, domain_errors=mode)
        for k in range(length)
    ])


def _masked_conditional(
    state: TwoModeState,
    settings: FilterSettings,
    outcome: MeasurementOutcome,
) -> tuple[float, TwoModeState]:
    pieces = _conditional_pieces(state, settings.reflectivity, outcome)
    if pieces is None:
        return 0.0, TwoModeState.empty()
    masked = []
    for s_i, line in pieces:
        mask = _condition_mask(settings, s_i - outcome.s, line.size)
        masked.append((s_i, line if mask is None else np.where(mask, line, 0.0)))
    prob = _pieces_probability(masked)
    if prob <= 0.0:
        return 0.0, TwoModeState.empty()
    return prob, _collect_state(masked, outcome.s, prob)


def apply_kraus(
    input_state: Union[TwoModeState, MixedState],
    settings: FilterSettings,
    outcome: MeasurementOutcome,
) -> tuple[float, MixedState]:
    """Condition-gated filter as an operator on pure or mixed inputs.

    Amplitudes failing the shutter condition are removed before
    renormalization.  A pure input stays pure (single-term mixture); a
    mixed input is filtered term by term with weights re-balanced by each
    term's outcome probability.  Returns the total pass probability and
    the resulting mixture (empty marker when nothing passes).
    """
    if isinstance(input_state, TwoModeState):
        _check_input(input_state)
        prob, state = _masked_conditional(input_state, settings, outcome)
        if prob <= 0.0:
            return 0.0, MixedState.empty()
        return prob, MixedState.pure(state)
    filtered = []
    for weight, term in input_state.terms:
        prob, state = _masked_conditional(term, settings, outcome)
        if prob > 0.0:
            filtered.append((weight * prob, state))
    total = math.fsum(w for w, _ in filtered)
    if total <= 0.0:
        return 0.0, MixedState.empty()
    return total, MixedState((w / total, s) for w, s in filtered)


def condition_probability(
    state: Union[TwoModeState, MixedState],
    cond: Optional[FilterCondition],
    params: Optional[Mapping[str, float]] = None,
    domain_errors: str = "raise",
) -> float:
    """Probability mass of an existing state satisfying C(S_t, |Delta_t|)."""
    if cond is None:
        return 1.0
    if isinstance(state, MixedState):
        return math.fsum(
            w * condition_probability(term, cond, params, domain_errors)
            for w, term in state.terms
        )
    return math.fsum(
        amp * amp
        for (n, m), amp in state.items()
        if evaluate(cond, n + m, n - m, params, domain_errors=domain_errors)
    )


def shutter_probability(
    input_state: Union[TwoModeState, MixedState],
    settings: FilterSettings,
    outcome: MeasurementOutcome,
) -> float:
    """Probability that the heralded state satisfies the shutter condition.

    For mixed inputs the per-term pass probabilities combine with the
    Bayes-updated term weights.  Impossible or zero-probability outcomes
    give 0.0 (see :func:`conditional_distribution` to tell those apart).
    """
    if settings.condition is None:
        if isinstance(input_state, TwoModeState):
            return 0.0 if conditional_state(input_state, settings, outcome)[1].is_empty else 1.0
        opens = any(
            not conditional_state(term, settings, outcome)[1].is_empty
            for _, term in input_state.terms
        )
        return 1.0 if opens else 0.0
    if isinstance(input_state, TwoModeState):
        _check_input(input_state)
        terms = ((1.0, input_state),)
    else:
        terms = input_state.terms
    passed = 0.0
    total = 0.0
    for weight, term in terms:
        pieces = _conditional_pieces(term, settings.reflectivity, outcome)
        if pieces is None:
            continue
        prob = _pieces_probability(pieces)
        if prob <= 0.0:
            continue
        masked = []
        for s_i, line in pieces:
            mask = _condition_mask(settings, s_i - outcome.s, line.size)
            masked.append((s_i, line if mask is None else np.where(mask, line, 0.0)))
        passed += weight * _pieces_probability(masked)
        total += weight * prob
    return passed / total if total > 0.0 else 0.0
