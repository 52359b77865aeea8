"""Cancellation-safe arithmetic primitives.

Alternating binomial sums are evaluated in arbitrary-precision integers
(Python ints) and only converted to floating point at the very end,
through a log-magnitude representation.  Factorial ratios are taken as
differences of log-factorials, never as ratios of evaluated factorials:
400! overflows every fixed-width float while its log is a small number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LN2 = math.log(2.0)

# Log-factorial lookup table, grown on demand.  Entries come from
# math.lgamma (sub-ulp accurate), not from cumulative log sums whose
# rounding error grows linearly with n.  Replaced wholesale when grown,
# so concurrent readers always see a consistent array.
_LOG_FACTORIAL_TABLE = np.array([math.lgamma(n + 1.0) for n in range(128)])


def log_factorial_table(n_max: int) -> np.ndarray:
    """Array t with t[n] = ln(n!) for 0 <= n <= n_max."""
    global _LOG_FACTORIAL_TABLE
    table = _LOG_FACTORIAL_TABLE
    if n_max >= table.size:
        size = max(n_max + 1, 2 * table.size)
        table = np.array([math.lgamma(n + 1.0) for n in range(size)])
        _LOG_FACTORIAL_TABLE = table
    return table


def log_factorial(n: int) -> float:
    """ln(n!) to better than 1e-12 relative accuracy; exactly 0.0 for n in {0, 1}."""
    if n < 0:
        raise ValueError(f"log_factorial requires n >= 0, got {n}")
    return float(log_factorial_table(n)[n])


def signed_binomial_convolution(v: int, w: int, target: int) -> int:
    """Exact value of sum_{p+q=target} C(v,p) C(w,q) (-1)^q.

    Equivalently the coefficient of x^target in (1+x)^v (1-x)^w.  The sum
    alternates and cancels catastrophically in floating point once v+w
    reaches a couple hundred, so every term stays an exact integer.
    Out-of-range targets give exact zero.
    """
    if v < 0 or w < 0:
        raise ValueError("signed_binomial_convolution requires v, w >= 0")
    if target < 0 or target > v + w:
        return 0
    total = 0
    for p in range(max(0, target - w), min(v, target) + 1):
        q = target - p
        term = math.comb(v, p) * math.comb(w, q)
        total += -term if q & 1 else term
    return total


def signed_binomial_column(s: int, target: int) -> list[int]:
    """Exact sum_{p+q=target} C(v,p) C(s-v,q) (-1)^q for every v = 0..s.

    Writing c_v for the coefficients of (1+x)^v (1-x)^(s-v), the identity
    (1-x) * c_{v+1} = (1+x) * c_v gives the Pascal-style row recurrence

        c_{v+1}[t] = c_{v+1}[t-1] + c_v[t] + c_v[t-1],

    so the whole column costs s * target big-integer additions and no
    multiplications.  Targets beyond s/2 reduce through the reflection
    c_v[s - t] = (-1)^(s-v) c_v[t], halving the worst case.
    """
    if s < 0:
        raise ValueError("signed_binomial_column requires s >= 0")
    if target < 0 or target > s:
        return [0] * (s + 1)
    if target > s - target:
        mirrored = signed_binomial_column(s, s - target)
        return [val if (s - v) % 2 == 0 else -val for v, val in enumerate(mirrored)]
    row = [-math.comb(s, t) if t & 1 else math.comb(s, t) for t in range(target + 1)]
    values = [row[target]]
    for _ in range(s):
        prev_left = row[0]
        acc = 1
        row[0] = 1
        for t in range(1, target + 1):
            current = row[t]
            acc = acc + current + prev_left
            row[t] = acc
            prev_left = current
        values.append(row[target])
    return values


def signed_binomial_coefficients(v: int, w: int) -> list[int]:
    """All coefficients of (1+x)^v (1-x)^w at once, index = power of x.

    One integer convolution instead of v+w+1 separate constrained sums;
    used by the distribution routines that need every output value.
    """
    if v < 0 or w < 0:
        raise ValueError("signed_binomial_coefficients requires v, w >= 0")
    a = [math.comb(v, p) for p in range(v + 1)]
    b = [-math.comb(w, q) if q & 1 else math.comb(w, q) for q in range(w + 1)]
    out = [0] * (v + w + 1)
    for p, ap in enumerate(a):
        for q, bq in enumerate(b):
            out[p + q] += ap * bq
    return out


@dataclass(frozen=True)
class LogMagnitude:
    """A signed real carried as (sign, ln|x|) so that huge factorial
    products never leave the representable range.

    sign == 0 encodes exact zero; log_value is meaningless then.
    """

    log_value: float
    sign: int

    @classmethod
    def zero(cls) -> "LogMagnitude":
        return cls(0.0, 0)

    @classmethod
    def from_int(cls, value: int) -> "LogMagnitude":
        if value == 0:
            return cls.zero()
        # math.log accepts arbitrary-precision ints directly, so values
        # far beyond the float range convert without overflow.
        return cls(math.log(-value if value < 0 else value), 1 if value > 0 else -1)

    @classmethod
    def from_float(cls, value: float) -> "LogMagnitude":
        if value == 0.0:
            return cls.zero()
        return cls(math.log(abs(value)), 1 if value > 0 else -1)

    def __mul__(self, other: "LogMagnitude") -> "LogMagnitude":
        if self.sign == 0 or other.sign == 0:
            return LogMagnitude.zero()
        return LogMagnitude(self.log_value + other.log_value, self.sign * other.sign)

    def scaled_by_log(self, log_factor: float) -> "LogMagnitude":
        """Multiply by a positive factor given as its natural log."""
        if self.sign == 0:
            return self
        return LogMagnitude(self.log_value + log_factor, self.sign)

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_value)
