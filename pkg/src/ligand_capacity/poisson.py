"""Kabanov's Poisson-channel capacity and its discrete-time approximation.

The discrete route drives a fast-unbinding receptor (beta = 1) with a
two-state Markov input that switches L -> H with probability r and H -> L
with probability s per step. The information rate of that hidden-input
process has no closed form, so it is bracketed by the usual
conditional-entropy sandwich computed by exact forward filtering.

Units: Kabanov values are in nats per unit time; rates from the channel are
bits per step. Every function says which one it returns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams, channel_tensor
from .markov import LN2, binary_entropy

BOUNDS_CAP = 24
SERIES_BELOW = 1e-3


def _small_c_series(c: float) -> float:
    # (1 + 1/c) ln(1 + c) = 1 + t with t = sum_{m>=1} (-1)^{m+1} c^m / (m (m + 1)),
    # and the capacity is e^t - 1 - t.
    t = sum((-1) ** (m + 1) * c ** m / (m * (m + 1)) for m in range(1, 10))
    return sum(t ** k / math.factorial(k) for k in range(2, 10))


def kabanov_capacity(c: float) -> float:
    """Poisson-channel capacity in nats per unit time for intensities in [1, 1 + c]."""
    if not c > 0:
        raise ValueError(f"c must be positive, got {c!r}")
    if c < SERIES_BELOW:
        return _small_c_series(c)
    return (c + 1.0) ** (1.0 + 1.0 / c) / math.e - (1.0 + 1.0 / c) * math.log1p(c)


def kabanov_capacity_bits(c: float) -> float:
    return kabanov_capacity(c) / LN2


@dataclass(frozen=True)
class MarkovInputProcess:
    """Input switching L -> H with probability ``r`` and H -> L with ``s`` per step.

    ``initial`` is P(X_1 = L), P(X_1 = H); by default the stationary law.
    """

    r: float
    s: float
    initial: tuple[float, float] | None = None

    def __post_init__(self):
        for name in ("r", "s"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        if self.initial is None and self.r + self.s == 0.0:
            raise ValueError("r = s = 0 has no unique stationary law; pass initial explicitly")

    @property
    def transition(self) -> np.ndarray:
        return np.array([[1.0 - self.r, self.r], [self.s, 1.0 - self.s]])

    @property
    def initial_law(self) -> np.ndarray:
        if self.initial is not None:
            return np.asarray(self.initial, dtype=float)
        return np.array([self.s, self.r]) / (self.r + self.s)


@dataclass(frozen=True)
class PoissonDiscretization:
    c: float
    dt: float
    params: ChannelParams = field(init=False)

    def __post_init__(self):
        if self.c < 0 or self.dt <= 0:
            raise ValueError("need c >= 0 and dt > 0")
        if self.dt * (1.0 + self.c) > 1.0:
            raise ValueError(f"dt * (1 + c) = {self.dt * (1 + self.c)!r} exceeds 1")
        p = ChannelParams(min(1.0, self.dt), min(1.0, (1.0 + self.c) * self.dt), 1.0)
        object.__setattr__(self, "params", p)


def _pair_stationary(params: ChannelParams, inp: MarkovInputProcess) -> np.ndarray:
    """Law of (X_1, Y_1) that makes the pair process stationary, shape (x, y)."""
    k = channel_tensor(params)
    w = inp.initial_law
    if inp.r + inp.s == 0.0:
        out = np.zeros((2, 2))
        for x in (0, 1):
            a, b = k[0, x, 1], k[1, x, 0]
            out[x] = w[x] * np.array([b, a]) / (a + b)
        return out
    t = inp.transition
    # P[(x, y) -> (x', y')] = T[x, x'] K[y, x', y']
    p = np.einsum("ab,cbd->acbd", t, k).reshape(4, 4)
    vals, vecs = np.linalg.eig(p.T)
    v = np.real(vecs[:, np.argmin(np.abs(vals - 1.0))])
    v = np.abs(v) / np.abs(v).sum()
    return v.reshape(2, 2)


def _next_symbol_entropy(params, inp, a0: np.ndarray, ylast0: np.ndarray, steps: int) -> float:
    """H(Y_{steps+1} | prefix) where prefixes start as rows of ``a0``.

    ``a0[k, x]`` is P(prefix_k, X = x) for the current step and ``ylast0[k]``
    the last output of prefix k. Zero-probability prefixes are dropped, which
    keeps the count Fibonacci-sized when beta = 1.
    """
    k = channel_tensor(params)
    t = inp.transition
    a, ylast = a0, ylast0
    for _ in range(steps):
        pred = a @ t                                  # P(prefix, X_next = x')
        kk = k[ylast]                                 # (m, x', y')
        children = pred[:, :, None] * kk              # (m, x', y')
        child_a = np.concatenate([children[:, :, 0], children[:, :, 1]])
        child_y = np.concatenate([np.zeros(len(a), dtype=np.int8), np.ones(len(a), dtype=np.int8)])
        keep = child_a.sum(axis=1) > 0
        a, ylast = child_a[keep], child_y[keep]
    pred = a @ t
    p_next = np.einsum("mx,mxy->my", pred, k[ylast])
    p_prefix = p_next.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(p_next > 0, p_next / p_prefix, 1.0)
    return float(-np.sum(p_next * np.log(ratio)) / LN2)


@dataclass(frozen=True)
class RateBounds:
    lower_bits: float
    upper_bits: float
    conditional_bits: float

    @property
    def midpoint_bits(self) -> float:
        return 0.5 * (self.lower_bits + self.upper_bits)


def mi_rate_bounds(disc, inp: MarkovInputProcess, n: int) -> RateBounds:
    """Lower and upper bounds on the mutual-information rate in bits per step.

    upper = H(Y_n | Y^{n-1}) - H(Y_n | Y_{n-1}, X_n)
    lower = H(Y_n | Y^{n-1}, X_1) - H(Y_n | Y_{n-1}, X_n)

    The pair (X_i, Y_i) starts in its stationary law. ``disc`` is either a
    :class:`PoissonDiscretization` or plain :class:`ChannelParams`.
    """
    params = disc.params if isinstance(disc, PoissonDiscretization) else disc
    if n < 2:
        raise ValueError("n must be >= 2")
    if n > BOUNDS_CAP:
        from .directed import EnumerationBudgetError

        raise EnumerationBudgetError(f"enumeration budget exceeded: n={n} > cap {BOUNDS_CAP}")
    pi = _pair_stationary(params, inp)
    k = channel_tensor(params)

    # H(Y_n | Y_{n-1}, X_n) from the stationary law of (X_{n-1}, Y_{n-1}).
    p_y_x = np.einsum("xy,xz->yz", pi, inp.transition)          # (y_prev, x_n)
    h_rows = binary_entropy(k[:, :, 1])
    cond = float(np.sum(p_y_x * h_rows))

    a_up = pi.T.copy()                                           # prefix = y_1
    y_up = np.array([0, 1], dtype=np.int8)
    h_up = _next_symbol_entropy(params, inp, a_up, y_up, n - 2)

    a_lo = np.zeros((4, 2))
    y_lo = np.zeros(4, dtype=np.int8)
    for j, (x1, y1) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        a_lo[j, x1] = pi[x1, y1]
        y_lo[j] = y1
    keep = a_lo.sum(axis=1) > 0
    h_lo = _next_symbol_entropy(params, inp, a_lo[keep], y_lo[keep], n - 2)
    return RateBounds(h_lo - cond, h_up - cond, cond)


@dataclass(frozen=True)
class ConvergenceRow:
    dt: float
    best_r: float
    best_s: float
    rate_nats_per_time: float
    lower_nats_per_time: float
    upper_nats_per_time: float
    kabanov_nats_per_time: float

    @property
    def gap(self) -> float:
        """Signed Kabanov minus discrete rate; negative while the discrete rate overshoots."""
        return self.kabanov_nats_per_time - self.rate_nats_per_time

    @property
    def abs_gap(self) -> float:
        return abs(self.gap)


def best_markov_input(disc: PoissonDiscretization, n: int, grid: int = 50,
                      r_values=None, s_values=None):
    """Grid search of the bound midpoint over (r, s); returns (r, s, RateBounds)."""
    rs = np.arange(1, grid + 1) / grid if r_values is None else np.asarray(r_values, dtype=float)
    ss = np.arange(1, grid + 1) / grid if s_values is None else np.asarray(s_values, dtype=float)
    best = None
    for r in rs:
        for s in ss:
            if r + s == 0.0:
                inp = MarkovInputProcess(0.0, 0.0, initial=(1.0, 0.0))
            else:
                inp = MarkovInputProcess(float(r), float(s))
            b = mi_rate_bounds(disc, inp, n)
            if best is None or b.midpoint_bits > best[2].midpoint_bits + 1e-15:
                best = (float(r), float(s), b)
    return best


def kabanov_convergence(c: float, dt_schedule, n: int = 12, grid: int = 50,
                        r_values=None, s_values=None) -> list[ConvergenceRow]:
    """Best discrete rate per unit time against the Kabanov capacity, one row per dt."""
    target = kabanov_capacity(c)
    rows = []
    for dt in dt_schedule:
        disc = PoissonDiscretization(c, float(dt))
        r, s, b = best_markov_input(disc, n, grid, r_values, s_values)
        scale = LN2 / dt
        rows.append(ConvergenceRow(float(dt), r, s, b.midpoint_bits * scale,
                                   b.lower_bits * scale, b.upper_bits * scale, target))
    return rows
