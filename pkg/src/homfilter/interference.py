"""Balanced (50:50) beam-splitter action on Fock pairs and the resulting
multiphoton interference statistics.

An input |n, m> leaves the splitter as a superposition over output pairs
(K, L) with K + L = n + m.  The output amplitude is

    amp(K, L) = sqrt(K! L! / (n! m! 2^(n+m))) * sum_{p+q=K} C(n,p) C(m,q) (-1)^q

and the signed sum is evaluated in exact integers (see ``numerics``), so
the heavy cancellation at a few hundred photons costs no precision.
Probabilities are exact rationals until the final float conversion.
"""

from __future__ import annotations

import math
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

from .fock import OutcomeDistribution, validate_sum_diff
from .numerics import signed_binomial_coefficients


class BsAmplitudeTable:
    """Output amplitudes of the balanced splitter for one input pair."""

    __slots__ = ("input", "_amps", "_sbc")

    def __init__(self, input_pair: tuple[int, int], amps: dict[tuple[int, int], float],
                 sbc: list[int]):
        self.input = input_pair
        self._amps = amps
        self._sbc = sbc

    @property
    def amplitudes(self) -> Mapping[tuple[int, int], float]:
        return MappingProxyType(self._amps)

    def amplitude(self, k: int, l: int) -> float:
        return self._amps.get((k, l), 0.0)

    def exact_probability(self, k: int, l: int) -> Fraction:
        """|amp(k, l)|^2 as an exact rational; zero off the conserved shell."""
        n, m = self.input
        s = n + m
        if k < 0 or l < 0 or k + l != s:
            return Fraction(0)
        c = self._sbc[k]
        num = math.factorial(k) * math.factorial(l) * c * c
        den = math.factorial(n) * math.factorial(m) * (1 << s)
        return Fraction(num, den)

    def __repr__(self) -> str:
        return f"BsAmplitudeTable(input={self.input}, {len(self._amps)} outputs)"


def bs_transform(n: int, m: int) -> BsAmplitudeTable:
    """Amplitude table of the 50:50 splitter acting on |n, m>.

    Photon number is conserved: support lies on K + L = n + m and the
    table is exactly unitary in rational arithmetic.
    """
    if n < 0 or m < 0:
        raise ValueError(f"occupations must be nonnegative, got ({n}, {m})")
    s = n + m
    sbc = signed_binomial_coefficients(n, m)
    fn = math.factorial(n) * math.factorial(m) * (1 << s)
    amps: dict[tuple[int, int], float] = {}
    for k in range(s + 1):
        c = sbc[k]
        if c == 0:
            continue
        l = s - k
        prob = Fraction(math.factorial(k) * math.factorial(l) * c * c, fn)
        amps[(k, l)] = math.copysign(math.sqrt(float(prob)), c)
    return BsAmplitudeTable((n, m), amps, sbc)


def hom_distribution(s_i: int, delta_i: int) -> OutcomeDistribution:
    """Distribution of the output count difference Delta for input (S_i, Delta_i).

    Covers every valid-parity Delta in {-S_i, -S_i + 2, ..., S_i}; the
    probability at Delta is |amp(K, L)|^2 with K = (S_i - Delta)/2.
    """
    validate_sum_diff(s_i, delta_i)
    n = (s_i + delta_i) // 2
    m = (s_i - delta_i) // 2
    sbc = signed_binomial_coefficients(n, m)
    den = math.factorial(n) * math.factorial(m) * (1 << s_i)
    fact = [math.factorial(k) for k in range(s_i + 1)]
    probs: dict[int, float] = {}
    for k in range(s_i + 1):
        c = sbc[k]
        delta = s_i - 2 * k
        if c == 0:
            probs[delta] = 0.0
        else:
            probs[delta] = float(Fraction(fact[k] * fact[s_i - k] * c * c, den))
    return OutcomeDistribution(probs)


def threshold_probability(dist: OutcomeDistribution, threshold: int) -> float:
    """Total probability of |Delta| >= threshold under a Delta-distribution."""
    total = dist.total()
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"distribution is not normalized: total = {total!r}")
    return math.fsum(p for delta, p in dist.items() if abs(delta) >= threshold)
