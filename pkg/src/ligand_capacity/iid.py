"""Closed-form iid information rate and its maximisation over P(X = H)."""

from __future__ import annotations

import itertools
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams
from .markov import binary_entropy

PHI = (1.0 + math.sqrt(5.0)) / 2.0
GOLDEN_CAPACITY = math.log2(PHI)     # 0.694242...
GOLDEN_ARGMAX = 2.0 - PHI            # 0.381966...

COARSE_STEP = 1e-3
FLAT_TOL = 1e-15


class DegenerateChannelWarning(RuntimeWarning):
    pass


def _rate(params: ChannelParams, p_H: np.ndarray) -> np.ndarray:
    p_H = np.asarray(p_H, dtype=float)
    p_L = 1.0 - p_H
    a_bar = params.alpha_H * p_H + params.alpha_L * p_L
    num = binary_entropy(a_bar) - p_H * binary_entropy(params.alpha_H) - p_L * binary_entropy(params.alpha_L)
    num = np.maximum(num, 0.0)
    if params.beta == 0.0:
        return np.zeros_like(num)
    return num / (1.0 + a_bar / params.beta)


def iid_rate(params: ChannelParams, p_H: float) -> float:
    """Information rate in bits per step for iid inputs with P(X = H) = ``p_H``.

    With beta = 0 the receptor ends up stuck in B, the rate is 0 and a
    :class:`DegenerateChannelWarning` is issued.
    """
    if not (0.0 <= p_H <= 1.0):
        raise ValueError(f"p_H must lie in [0, 1], got {p_H!r}")
    if params.beta == 0.0:
        a_bar = params.alpha_H * p_H + params.alpha_L * (1.0 - p_H)
        if a_bar > 0.0:
            warnings.warn("degenerate: absorbing bound state", DegenerateChannelWarning, stacklevel=2)
        return 0.0
    return float(_rate(params, p_H))


@dataclass(frozen=True)
class CapacityResult:
    value_bits_per_step: float
    argmax_p_H: float
    optimizer_evals: int
    bracket_width: float
    diagnostic: str | None = None


def golden_section_max(f, a: float, b: float, tol: float):
    """Maximise a unimodal ``f`` on [a, b]; returns (x, f(x), evals, width)."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    evals = 2
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
        evals += 1
    x = c if fc >= fd else d
    return x, max(fc, fd), evals, b - a


def maximize_iid(params: ChannelParams, tol: float = 1e-9) -> CapacityResult:
    """Global maximum of :func:`iid_rate` over p_H in [0, 1].

    A 1e-3 grid locates the peak, then golden-section search narrows the
    bracket around the best grid cell to width ``tol``. An identically zero
    objective reports argmax 0.5.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    diagnostic = "degenerate: absorbing bound state" if params.beta == 0.0 else None
    grid = np.linspace(0.0, 1.0, int(round(1.0 / COARSE_STEP)) + 1)
    values = _rate(params, grid)
    evals = grid.size
    k = int(np.argmax(values))
    if values[k] <= FLAT_TOL:
        return CapacityResult(0.0, 0.5, evals, 0.0, diagnostic)

    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    f = lambda p: float(_rate(params, p))
    x, fx, n, width = golden_section_max(f, lo, hi, tol)
    evals += n
    if fx < values[k]:
        x, fx = float(grid[k]), float(values[k])
    return CapacityResult(float(fx), float(x), evals, float(width), diagnostic)


@dataclass(frozen=True)
class GoldenLimitRow:
    epsilon: float
    capacity: float
    argmax_p_H: float


def golden_limit_study(epsilon_schedule, tol: float = 1e-9, beta_follows: str = "one_minus_eps"):
    """Capacity at (eps, 1 - eps, 1 - eps) along a shrinking eps schedule.

    ``beta_follows="eps"`` evaluates (eps, 1 - eps, eps) instead, the path on
    which the rate collapses to zero.
    """
    rows = []
    for eps in epsilon_schedule:
        if not (0.0 < eps < 0.5):
            raise ValueError(f"epsilon must lie in (0, 0.5), got {eps!r}")
        beta = 1.0 - eps if beta_follows == "one_minus_eps" else eps
        res = maximize_iid(ChannelParams(eps, 1.0 - eps, beta), tol)
        rows.append(GoldenLimitRow(eps, res.value_bits_per_step, res.argmax_p_H))
    return rows


@dataclass(frozen=True)
class SweepRow:
    alpha_L: float
    alpha_H: float
    beta: float
    result: CapacityResult | None
    flag: str | None = None


def _sweep_point(job):
    a_l, a_h, beta, tol = job
    if a_l > a_h:
        return SweepRow(a_l, a_h, beta, None, "skipped: alpha_L > alpha_H")
    if not all(0.0 <= v <= 1.0 for v in (a_l, a_h, beta)):
        return SweepRow(a_l, a_h, beta, None, "skipped: value outside [0, 1]")
    res = maximize_iid(ChannelParams(a_l, a_h, beta), tol)
    return SweepRow(a_l, a_h, beta, res, res.diagnostic)


def capacity_sweep(alpha_L_values, alpha_H_values, beta_values, tol: float = 1e-9,
                   workers: int = 1) -> list[SweepRow]:
    """One row per grid point in lexicographic (alpha_L, alpha_H, beta) order."""
    jobs = [(float(a), float(b), float(c), tol) for a, b, c in
            itertools.product(sorted(alpha_L_values), sorted(alpha_H_values), sorted(beta_values))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point, jobs, chunksize=16))
    return [_sweep_point(j) for j in jobs]
