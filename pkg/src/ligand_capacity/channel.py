"""The discrete-time two-state ligand-receptor channel.

States and inputs are ordered (U, B) and (L, H) everywhere; index 0 is U / L.
"""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .markov import entropy_bits

ROW_TOL = 1e-12


class ConcentrationSymbol(enum.IntEnum):
    L = 0
    H = 1


class ReceptorState(enum.IntEnum):
    U = 0
    B = 1


def _as_symbol(x) -> ConcentrationSymbol:
    if isinstance(x, str):
        return ConcentrationSymbol[x]
    return ConcentrationSymbol(x)


def _as_state(y) -> ReceptorState:
    if isinstance(y, str):
        return ReceptorState[y]
    return ReceptorState(y)


@dataclass(frozen=True)
class ChannelParams:
    """Binding probabilities alpha_L, alpha_H and unbinding probability beta.

    ``allow_unordered`` lifts the alpha_L <= alpha_H requirement; it exists for
    symmetry checks that swap the two binding rates.
    """

    alpha_L: float
    alpha_H: float
    beta: float
    allow_unordered: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        for name in ("alpha_L", "alpha_H", "beta"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        if not self.allow_unordered and self.alpha_L > self.alpha_H:
            raise ValueError(
                f"alpha_L <= alpha_H required, got alpha_L={self.alpha_L!r} > alpha_H={self.alpha_H!r}"
            )

    @property
    def strict(self) -> bool:
        """True when all three parameters lie strictly inside (0, 1)."""
        return all(0.0 < v < 1.0 for v in (self.alpha_L, self.alpha_H, self.beta))

    @property
    def alphas(self) -> np.ndarray:
        return np.array([self.alpha_L, self.alpha_H])

    def swapped(self) -> ChannelParams:
        return ChannelParams(self.alpha_H, self.alpha_L, self.beta, allow_unordered=True)


def check_kernel(k: np.ndarray) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if k.shape != (2, 2):
        raise ValueError(f"kernel must be 2x2, got shape {k.shape}")
    if np.any(k < 0.0) or np.any(k > 1.0):
        raise ValueError("kernel entries must lie in [0, 1]")
    if np.any(np.abs(k.sum(axis=1) - 1.0) > ROW_TOL):
        raise ValueError("kernel rows must sum to 1")
    return k


def binding_kernel(alpha: float, beta: float) -> np.ndarray:
    return np.array([[1.0 - alpha, alpha], [beta, 1.0 - beta]])


def kernel_for_input(params: ChannelParams, x) -> np.ndarray:
    """Transition matrix of the receptor state given the concentration symbol."""
    x = _as_symbol(x)
    alpha = params.alpha_L if x is ConcentrationSymbol.L else params.alpha_H
    return binding_kernel(alpha, params.beta)


def channel_tensor(params: ChannelParams) -> np.ndarray:
    """Array ``K[y_prev, x, y]`` of p(y | x, y_prev)."""
    k = np.empty((2, 2, 2))
    for x in ConcentrationSymbol:
        k[:, x, :] = kernel_for_input(params, x)
    return k


@dataclass(frozen=True)
class AggregatedKernel:
    alpha_bar: float
    kernel: np.ndarray


def aggregated_alpha(params: ChannelParams, p_L_given_U):
    return params.alpha_H * (1.0 - np.asarray(p_L_given_U)) + params.alpha_L * np.asarray(p_L_given_U)


def aggregated_kernel(params: ChannelParams, p_L_given_U: float) -> AggregatedKernel:
    """Output kernel once the input law in the unbound state is averaged out."""
    if not (0.0 <= p_L_given_U <= 1.0):
        raise ValueError(f"p_L_given_U must lie in [0, 1], got {p_L_given_U!r}")
    a = float(aggregated_alpha(params, p_L_given_U))
    return AggregatedKernel(alpha_bar=a, kernel=binding_kernel(a, params.beta))


def step_distribution(params: ChannelParams, x, y_prev) -> tuple[float, float]:
    row = kernel_for_input(params, x)[_as_state(y_prev)]
    return float(row[0]), float(row[1])


# -- simulation ---------------------------------------------------------------

def _generator(seed: int, stream: int) -> np.random.Generator:
    # Philox is counter based; one key per (seed, stream), steps index the counter.
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


def _propagate(alpha_per_step: np.ndarray, beta: float, u: np.ndarray, y0: int) -> np.ndarray:
    """Run the chain for uniforms ``u`` without a Python loop.

    Each step is one of four maps on {U, B}: constant U, constant B, identity,
    or swap. The state after step i is the value of the last constant map,
    flipped by the parity of swaps since then.
    """
    to_b_from_u = u < alpha_per_step
    stay_b = ~(u < beta)
    const = to_b_from_u == stay_b
    swap = to_b_from_u & ~stay_b
    idx = np.arange(u.size)
    last = np.maximum.accumulate(np.where(const, idx, -1))
    swaps = np.cumsum(swap)
    has_const = last >= 0
    safe_last = np.where(has_const, last, 0)
    base = np.where(has_const, to_b_from_u[safe_last], bool(y0))
    swaps_before = np.where(has_const, swaps[safe_last], 0)
    parity = (swaps - swaps_before) & 1
    return (base ^ parity.astype(bool)).astype(np.int8)


@dataclass(frozen=True)
class Trajectory:
    inputs: np.ndarray
    outputs: np.ndarray
    initial_state: ReceptorState
    seed: int


def sample_trajectory(params: ChannelParams, inputs, initial_state=ReceptorState.U,
                      seed: int = 0, stream: int = 0) -> Trajectory:
    """Forward-simulate receptor states for a given input sequence.

    ``inputs`` may be a string such as ``"HHLH"`` or a sequence of symbols.
    """
    if isinstance(inputs, str):
        inputs = [ConcentrationSymbol[c] for c in inputs]
    x = np.asarray([int(_as_symbol(v)) for v in inputs], dtype=np.int8)
    if x.size == 0:
        raise ValueError("inputs must be nonempty")
    y0 = _as_state(initial_state)
    u = _generator(seed, stream).random(x.size)
    y = _propagate(params.alphas[x], params.beta, u, int(y0))
    return Trajectory(inputs=x, outputs=y, initial_state=y0, seed=seed)


def _sample_iid(params: ChannelParams, p_H: float, horizon: int, seed: int,
                stream: int, initial_state: int) -> tuple[np.ndarray, np.ndarray]:
    rng = _generator(seed, stream)
    x = (rng.random(horizon) < p_H).astype(np.int8)
    y = _propagate(params.alphas[x], params.beta, rng.random(horizon), initial_state)
    return x, y


def transition_counts(y0: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Counts ``c[y_prev, x, y]`` of observed transitions."""
    y_prev = np.concatenate(([y0], y[:-1]))
    flat = y_prev.astype(np.int64) * 4 + x.astype(np.int64) * 2 + y
    return np.bincount(flat, minlength=8).reshape(2, 2, 2)


def plugin_rate(counts: np.ndarray) -> float:
    """Plug-in estimate of H(Y_i|Y_{i-1}) - H(Y_i|Y_{i-1}, X_i) in bits."""
    p = counts / counts.sum()
    h_yp_y = entropy_bits(p.sum(axis=1))
    h_yp = entropy_bits(p.sum(axis=(1, 2)))
    h_all = entropy_bits(p)
    h_yp_x = entropy_bits(p.sum(axis=2))
    return float((h_yp_y - h_yp) - (h_all - h_yp_x))


def _trial_block_counts(job) -> np.ndarray:
    params, p_H, horizon, seed, trial, y0, blocks = job
    x, y = _sample_iid(params, p_H, horizon, seed, trial, y0)
    y_prev = np.concatenate(([y0], y[:-1]))
    edges = np.linspace(0, horizon, blocks + 1).astype(int)
    out = np.empty((blocks, 2, 2, 2), dtype=np.int64)
    for b in range(blocks):
        sl = slice(edges[b], edges[b + 1])
        flat = y_prev[sl].astype(np.int64) * 4 + x[sl].astype(np.int64) * 2 + y[sl]
        out[b] = np.bincount(flat, minlength=8).reshape(2, 2, 2)
    return out


@dataclass(frozen=True)
class RateEstimate:
    rate_bits: float
    stderr: float
    transitions: int
    blocks: int
    diagnostics: tuple[str, ...]


TOTAL_BLOCKS = 32


def estimate_rate_mc(params: ChannelParams, p_H: float, horizon: int, trials: int = 1,
                     seed: int = 0, workers: int = 1,
                     initial_state=ReceptorState.U) -> RateEstimate:
    """Monte Carlo plug-in rate under iid inputs with batch-means standard error.

    Every trial draws from its own Philox stream keyed by (seed, trial), and
    counts are merged in trial order, so the result does not depend on
    ``workers``.
    """
    if horizon < 2:
        raise ValueError("horizon must be >= 2")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not (0.0 <= p_H <= 1.0):
        raise ValueError("p_H must lie in [0, 1]")
    y0 = int(_as_state(initial_state))
    blocks = max(1, -(-TOTAL_BLOCKS // trials))
    jobs = [(params, p_H, horizon, seed, t, y0, blocks) for t in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_trial = list(pool.map(_trial_block_counts, jobs))
    else:
        per_trial = [_trial_block_counts(j) for j in jobs]
    block_counts = np.concatenate(per_trial, axis=0)
    total = block_counts.sum(axis=0)

    diagnostics = []
    cond = total.sum(axis=2)
    for yp in ReceptorState:
        for x in ConcentrationSymbol:
            if cond[yp, x] == 0:
                diagnostics.append(f"conditioning event (Y_prev={yp.name}, X={x.name}) never observed")

    rate = plugin_rate(total)
    per_block = np.array([plugin_rate(c) for c in block_counts if c.sum() > 0])
    if per_block.size > 1:
        stderr = float(per_block.std(ddof=1) / np.sqrt(per_block.size))
    else:
        stderr = float("nan")
        diagnostics.append("single batch, standard error unavailable")
    return RateEstimate(rate_bits=rate, stderr=stderr, transitions=int(total.sum()),
                        blocks=int(per_block.size), diagnostics=tuple(diagnostics))
