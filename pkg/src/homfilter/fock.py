"""Two-mode photon-number states and their (S, Delta) relabeling.

States are sparse maps from occupation pairs (n, m) to real amplitudes.
Everything downstream indexes states either by counts (n, m) or by the
equivalent sum/difference pair S = n + m, Delta = n - m; the two labelings
are interchangeable through :func:`to_sum_diff` / :func:`from_sum_diff`.
"""

from __future__ import annotations

import json
import math
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

NORM_TOL = 1e-10


def to_sum_diff(n: int, m: int) -> tuple[int, int]:
    """Occupation pair (n, m) -> label (S, Delta) with S = n + m, Delta = n - m."""
    if n < 0 or m < 0:
        raise ValueError(f"occupations must be nonnegative, got ({n}, {m})")
    return n + m, n - m


def from_sum_diff(s: int, delta: int) -> tuple[int, int]:
    """Label (S, Delta) -> occupation pair ((S+Delta)/2, (S-Delta)/2)."""
    validate_sum_diff(s, delta)
    return (s + delta) // 2, (s - delta) // 2


def is_valid_sum_diff(s: int, delta: int) -> bool:
    return s >= 0 and abs(delta) <= s and (s + delta) % 2 == 0


def validate_sum_diff(s: int, delta: int) -> None:
    if s < 0:
        raise ValueError(f"total photon number must be nonnegative, got S={s}")
    if abs(delta) > s:
        raise ValueError(f"|Delta| <= S required, got S={s}, Delta={delta}")
    if (s + delta) % 2:
        raise ValueError(f"S and Delta must have equal parity, got S={s}, Delta={delta}")


class TwoModeState:
    """Sparse real-amplitude pure state over |n, m> occupation pairs.

    Instances are immutable and always either normalized (within
    ``NORM_TOL``) or the distinguished empty marker returned by
    :meth:`empty`, which signals an impossible conditional outcome.
    Exact-zero amplitudes are never stored.
    """

    __slots__ = ("_amps",)

    def __init__(self, amplitudes: Mapping[tuple[int, int], float]):
        cleaned: dict[tuple[int, int], float] = {}
        for key, amp in amplitudes.items():
            n, m = key
            if n < 0 or m < 0:
                raise ValueError(f"occupations must be nonnegative, got ({n}, {m})")
            amp = float(amp)
            if not math.isfinite(amp):
                raise ValueError(f"amplitude for ({n}, {m}) is not finite")
            if amp != 0.0:
                cleaned[(int(n), int(m))] = amp
        if cleaned:
            norm_sq = math.fsum(a * a for a in cleaned.values())
            if abs(norm_sq - 1.0) > NORM_TOL:
                raise ValueError(
                    f"state is not normalized: sum of squared amplitudes = {norm_sq!r}"
                )
        self._amps = cleaned

    @classmethod
    def fock(cls, n: int, m: int) -> "TwoModeState":
        return cls({(n, m): 1.0})

    @classmethod
    def normalized(cls, amplitudes: Mapping[tuple[int, int], float]) -> "TwoModeState":
        """Build a state from unnormalized amplitudes, rescaling to norm one."""
        norm_sq = math.fsum(float(a) * float(a) for a in amplitudes.values())
        if norm_sq <= 0.0:
            raise ValueError("cannot normalize a zero vector")
        scale = 1.0 / math.sqrt(norm_sq)
        return cls({k: float(a) * scale for k, a in amplitudes.items() if a != 0.0})

    @classmethod
    def empty(cls) -> "TwoModeState":
        """The empty-state marker used for impossible measurement outcomes."""
        return cls({})

    @property
    def amplitudes(self) -> Mapping[tuple[int, int], float]:
        return MappingProxyType(self._amps)

    @property
    def is_empty(self) -> bool:
        return not self._amps

    def amplitude(self, n: int, m: int) -> float:
        return self._amps.get((n, m), 0.0)

    def norm_squared(self) -> float:
        return math.fsum(a * a for a in self._amps.values())

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return bool(self._amps) and abs(self.norm_squared() - 1.0) <= tol

    def items(self) -> Iterator[tuple[tuple[int, int], float]]:
        return iter(self._amps.items())

    def shells(self) -> list[int]:
        """Sorted list of total photon numbers S with support."""
        return sorted({n + m for n, m in self._amps})

    def __len__(self) -> int:
        return len(self._amps)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TwoModeState):
            return NotImplemented
        return self._amps == other._amps

    def __hash__(self) -> int:
        return hash(frozenset(self._amps.items()))

    def __repr__(self) -> str:
        if self.is_empty:
            return "TwoModeState.empty()"
        return f"TwoModeState({len(self._amps)} terms, shells {self.shells()})"


def inner_product(a: TwoModeState, b: TwoModeState) -> float:
    """<a|b> over the shared sparse support (amplitudes are real)."""
    small, big = (a, b) if len(a) <= len(b) else (b, a)
    return math.fsum(amp * big.amplitude(*key) for key, amp in small.items())


class MixedState:
    """Statistical mixture of pure two-mode states.

    Weights are strictly positive and sum to one within ``NORM_TOL``;
    the empty mixture is the marker for a zero-probability result.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[tuple[float, TwoModeState]]):
        kept = tuple((float(w), s) for w, s in terms if w != 0.0)
        for w, _ in kept:
            if w < 0.0 or not math.isfinite(w):
                raise ValueError(f"mixture weights must be positive, got {w!r}")
        if kept:
            total = math.fsum(w for w, _ in kept)
            if abs(total - 1.0) > NORM_TOL:
                raise ValueError(f"mixture weights must sum to 1, got {total!r}")
        self._terms = kept

    @classmethod
    def pure(cls, state: TwoModeState) -> "MixedState":
        return cls(((1.0, state),))

    @classmethod
    def empty(cls) -> "MixedState":
        return cls(())

    @property
    def terms(self) -> tuple[tuple[float, TwoModeState], ...]:
        return self._terms

    @property
    def is_empty(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        return f"MixedState({len(self._terms)} terms)"


class OutcomeDistribution:
    """Probabilities over a discrete label set (Delta values, (S, Delta)
    pairs, or reported counts).

    ``impossible`` marks the structurally empty result of conditioning on
    an outcome no part of the input can produce; it is distinct from a
    distribution that merely has no support left.
    """

    __slots__ = ("_probs", "impossible")

    def __init__(
        self,
        probabilities: Mapping[object, float],
        impossible: bool = False,
    ):
        probs: dict[object, float] = {}
        for label in sorted(probabilities):
            p = float(probabilities[label])
            if p < 0.0 or not math.isfinite(p):
                raise ValueError(f"probability for {label!r} out of range: {p!r}")
            probs[label] = p
        self._probs = probs
        self.impossible = bool(impossible)

    @property
    def probabilities(self) -> Mapping[object, float]:
        return MappingProxyType(self._probs)

    def get(self, label: object) -> float:
        return self._probs.get(label, 0.0)

    def total(self) -> float:
        return math.fsum(self._probs.values())

    def support(self) -> list:
        return list(self._probs)

    def items(self) -> Iterator[tuple[object, float]]:
        return iter(self._probs.items())

    def __len__(self) -> int:
        return len(self._probs)

    def __repr__(self) -> str:
        if self.impossible:
            return "OutcomeDistribution(impossible)"
        return f"OutcomeDistribution({len(self._probs)} labels, total {self.total():.6g})"


def make_uniform_fixed_sum(s_i: int) -> TwoModeState:
    """Equal-amplitude state on the shell n + m = s_i.

    All S_i + 1 population differences carry amplitude (S_i + 1)^(-1/2).
    """
    if s_i < 0:
        raise ValueError(f"total photon number must be nonnegative, got {s_i}")
    amp = 1.0 / math.sqrt(s_i + 1)
    return TwoModeState({(s_i - n, n): amp for n in range(s_i + 1)})


def make_uniform_range(s_lo: int, s_hi: int) -> TwoModeState:
    """Uniform superposition over shells S_i in [s_lo, s_hi].

    Each shell carries total probability 1/(s_hi - s_lo + 1), spread
    evenly over its S_i + 1 population differences, so the amplitude on
    |S_i - N, N> is ((s_hi - s_lo + 1)(S_i + 1))^(-1/2).
    """
    if s_lo < 0:
        raise ValueError(f"shell range must be nonnegative, got s_lo={s_lo}")
    if s_lo > s_hi:
        raise ValueError(f"shell range is empty: [{s_lo}, {s_hi}]")
    shells = s_hi - s_lo + 1
    amps = {}
    for s_i in range(s_lo, s_hi + 1):
        amp = 1.0 / math.sqrt(shells * (s_i + 1))
        for n in range(s_i + 1):
            amps[(s_i - n, n)] = amp
    return TwoModeState(amps)


def marginal_sum_diff(state) -> OutcomeDistribution:
    """Squared amplitudes re-indexed by (S, Delta) = (n + m, n - m).

    Accepts a pure :class:`TwoModeState` or a :class:`MixedState`; a
    mixture contributes each term weighted by its mixing probability.
    """
    if isinstance(state, MixedState):
        if state.is_empty:
            raise ValueError("marginal_sum_diff requires a nonempty mixture")
        probs: dict[tuple[int, int], float] = {}
        for weight, term in state.terms:
            for label, p in marginal_sum_diff(term).items():
                probs[label] = probs.get(label, 0.0) + weight * p
        return OutcomeDistribution(probs)
    if not state.is_normalized():
        raise ValueError("marginal_sum_diff requires a normalized state")
    probs = {}
    for (n, m), amp in state.items():
        label = (n + m, n - m)
        probs[label] = probs.get(label, 0.0) + amp * amp
    return OutcomeDistribution(probs)


def state_to_json(state: TwoModeState) -> str:
    """Serialize to the {"terms": [{"n", "m", "amp"}]} document."""
    terms = [
        {"n": n, "m": m, "amp": state.amplitude(n, m)}
        for n, m in sorted(state.amplitudes)
    ]
    return json.dumps({"terms": terms})


def state_from_json(text: str) -> TwoModeState:
    """Inverse of :func:`state_to_json`; rejects malformed or unnormalized input."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid state document: {exc}") from None
    if not isinstance(doc, dict) or "terms" not in doc:
        raise ValueError('invalid state document: missing "terms"')
    amps: dict[tuple[int, int], float] = {}
    for term in doc["terms"]:
        try:
            key = (int(term["n"]), int(term["m"]))
            amp = float(term["amp"])
        except (TypeError, KeyError, ValueError) as exc:
            raise ValueError(f"invalid state term {term!r}") from None
        if key in amps:
            raise ValueError(f"duplicate state term for {key}")
        amps[key] = amp
    return TwoModeState(amps)
