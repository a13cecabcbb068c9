"""Entropy helpers, 2x2 stationary distributions and Boolean support-matrix tests."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, log

import numpy as np
from scipy.special import entr

LN2 = log(2.0)

# Boolean powers up to this exponent decide reachability and return times
# for a 2-state chain.
MAX_POWER = 4


class ReducibleChainError(ValueError):
    pass


def entropy_bits(p, axis=None) -> float | np.ndarray:
    """Shannon entropy in bits with the convention 0 log 0 = 0."""
    return np.sum(entr(np.asarray(p, dtype=float)), axis=axis) / LN2


def binary_entropy(p) -> float | np.ndarray:
    """Binary entropy function in bits.

    Accepts scalars or arrays; every value must lie in [0, 1].
    """
    arr = np.asarray(p, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0) or np.any(np.isnan(arr)):
        raise ValueError(f"binary_entropy needs p in [0, 1], got {p!r}")
    out = (entr(arr) + entr(1.0 - arr)) / LN2
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class StationaryDistribution:
    pi_U: float
    pi_B: float

    def as_array(self) -> np.ndarray:
        return np.array([self.pi_U, self.pi_B])


def stationary_distribution(kernel) -> StationaryDistribution:
    """Closed-form fixed point of a 2x2 row-stochastic kernel (rows/cols ordered U, B)."""
    k = np.asarray(kernel, dtype=float)
    up = k[0, 1]    # U -> B
    down = k[1, 0]  # B -> U
    if up == 0.0 and down == 0.0:
        raise ReducibleChainError("reducible chain, stationary distribution not unique")
    pi_u = down / (up + down)
    return StationaryDistribution(pi_U=pi_u, pi_B=1.0 - pi_u)


@dataclass(frozen=True)
class SupportMatrix:
    entries: tuple[tuple[int, int], tuple[int, int]]

    def __post_init__(self):
        for row in self.entries:
            for v in row:
                if v not in (0, 1):
                    raise ValueError("support matrix entries must be 0 or 1")

    @classmethod
    def from_array(cls, a) -> SupportMatrix:
        a = np.asarray(a, dtype=int)
        return cls(((int(a[0, 0]), int(a[0, 1])), (int(a[1, 0]), int(a[1, 1]))))

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=int)


def support_matrix(params) -> SupportMatrix:
    """Entry (i, j) is 1 iff the transition is positive under both input symbols."""
    from .channel import kernel_for_input, ConcentrationSymbol

    low = kernel_for_input(params, ConcentrationSymbol.L)
    high = kernel_for_input(params, ConcentrationSymbol.H)
    return SupportMatrix.from_array((np.minimum(low, high) > 0).astype(int))


def _bool_powers(m: SupportMatrix, upto: int = MAX_POWER) -> list[np.ndarray]:
    a = m.as_array().astype(bool)
    powers = [a]
    for _ in range(upto - 1):
        powers.append((powers[-1].astype(int) @ a.astype(int)) > 0)
    return powers


def strong_irreducibility(m: SupportMatrix) -> bool:
    reach = np.zeros((2, 2), dtype=bool)
    for p in _bool_powers(m):
        reach |= p
    return bool(reach.all())


def strong_aperiodicity(m: SupportMatrix) -> bool:
    """gcd of return lengths is 1 for every state; False unless strongly irreducible."""
    if not strong_irreducibility(m):
        return False
    powers = _bool_powers(m)
    for i in range(2):
        returns = [ell for ell, p in enumerate(powers, start=1) if p[i, i]]
        if not returns:
            return False
        g = 0
        for ell in returns:
            g = gcd(g, ell)
        if g != 1:
            return False
    return True
