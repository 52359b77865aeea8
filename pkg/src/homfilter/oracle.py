"""Brute-force dense reference for small photon numbers.

Builds the full four-mode vector (transmitted H, transmitted V, counter
port c, counter port d) by applying single-photon creation operators one
at a time, so it shares no combinatorial formula with the fast engine it
cross-checks: no binomial splitting weights, no signed convolutions, just
ladder recursion on truncated dense arrays.
"""

from __future__ import annotations

import math

import numpy as np

from .filtering import _phase_fixed
from .fock import TwoModeState

S_MAX_LIMIT = 14
_NOISE_FLOOR = 1e-24


def _create(psi: np.ndarray, axis: int) -> np.ndarray:
    """Photon creation along one axis: out[k+1] += sqrt(k+1) * psi[k]."""
    out = np.zeros_like(psi)
    dim = psi.shape[axis]
    src = [slice(None)] * psi.ndim
    dst = [slice(None)] * psi.ndim
    src[axis] = slice(0, dim - 1)
    dst[axis] = slice(1, dim)
    shape = [1] * psi.ndim
    shape[axis] = dim - 1
    out[tuple(dst)] = psi[tuple(src)] * np.sqrt(np.arange(1, dim)).reshape(shape)
    return out


def oracle_filter(
    input_state: TwoModeState, r: float, s_max: int
) -> dict[tuple[int, int], tuple[float, TwoModeState]]:
    """Every detector outcome (K, L) with its probability and heralded state.

    The input mode operators route as

        H -> sqrt(t) H_t + sqrt(r) (c + d) / sqrt(2)
        V -> sqrt(t) V_t + sqrt(r) (d - c) / sqrt(2)

    and projecting the counter axes on (K, L) leaves the transmitted
    amplitudes.  Outcomes below the float noise floor are omitted.
    """
    if s_max > S_MAX_LIMIT:
        raise ValueError(f"oracle is limited to s_max <= {S_MAX_LIMIT}, got {s_max}")
    if not (0.0 < r < 1.0):
        raise ValueError(f"reflectivity must lie strictly in (0, 1), got {r!r}")
    if not input_state.is_normalized():
        raise ValueError("oracle input must be a normalized TwoModeState")
    shells = input_state.shells()
    if shells and max(shells) > s_max:
        raise ValueError(
            f"input holds up to {max(shells)} photons, beyond the s_max={s_max} truncation"
        )
    dim = s_max + 1
    sqrt_t = math.sqrt(1.0 - r)
    tap = math.sqrt(r) * math.sqrt(0.5)
    psi = np.zeros((dim, dim, dim, dim))
    for (n, m), xi in input_state.items():
        term = np.zeros((dim, dim, dim, dim))
        term[0, 0, 0, 0] = 1.0
        for _ in range(n):
            term = sqrt_t * _create(term, 0) + tap * (_create(term, 2) + _create(term, 3))
        for _ in range(m):
            term = sqrt_t * _create(term, 1) + tap * (_create(term, 3) - _create(term, 2))
        psi += (xi / math.sqrt(math.factorial(n) * math.factorial(m))) * term
    outcomes: dict[tuple[int, int], tuple[float, TwoModeState]] = {}
    for k_count in range(dim):
        for l_count in range(dim):
            block = psi[:, :, k_count, l_count]
            prob = float((block * block).sum())
            if prob <= _NOISE_FLOOR:
                continue
            amps = {
                (int(i), int(j)): float(block[i, j])
                for i, j in zip(*np.nonzero(block))
            }
            state = TwoModeState.normalized(_phase_fixed(amps))
            outcomes[(k_count, l_count)] = (prob, state)
    return outcomes
