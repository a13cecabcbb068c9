"""Continuous-time master equation and its link to the discrete channel."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np

from .channel import ChannelParams, binding_kernel

# Real-axis extent of the classical RK4 stability region.
RK4_STABILITY = 2.785


class StabilityError(ValueError):
    pass


@dataclass(frozen=True)
class RateMatrix:
    """Generator(s) of a continuous-time chain, one per input symbol."""

    rates: Mapping[Hashable, np.ndarray]

    def __post_init__(self):
        for key, q in self.rates.items():
            q = np.asarray(q, dtype=float)
            off = q - np.diag(np.diag(q))
            if np.any(off < 0):
                raise ValueError(f"negative off-diagonal rate for input {key!r}")
            if np.any(np.abs(q.sum(axis=1)) > 1e-12):
                raise ValueError(f"rows of the generator for input {key!r} must sum to 0")

    @property
    def n(self) -> int:
        return next(iter(self.rates.values())).shape[0]

    @classmethod
    def constant(cls, q) -> RateMatrix:
        return cls({None: np.asarray(q, dtype=float)})


@dataclass(frozen=True)
class BindingKinetics:
    """On-rate ``k_plus``, off-rate ``k_minus`` and a piecewise-constant concentration.

    ``concentration`` is a sequence of (duration, value) pieces.
    """

    k_plus: float
    k_minus: float
    concentration: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if self.k_plus < 0 or self.k_minus < 0:
            raise ValueError("rates must be nonnegative")
        pieces = tuple((float(d), float(c)) for d, c in self.concentration)
        if any(c < 0 or d < 0 for d, c in pieces):
            raise ValueError("durations and concentrations must be nonnegative")
        object.__setattr__(self, "concentration", pieces)

    def generator(self, c: float) -> np.ndarray:
        on = self.k_plus * c
        return np.array([[-on, on], [self.k_minus, -self.k_minus]])

    def equilibrium(self, c: float) -> float:
        on = self.k_plus * c
        return on / (on + self.k_minus)


@dataclass(frozen=True)
class Trace:
    times: np.ndarray
    probs: np.ndarray


def _rk4_step(p: np.ndarray, q: np.ndarray, h: float) -> np.ndarray:
    k1 = p @ q
    k2 = (p + 0.5 * h * k1) @ q
    k3 = (p + 0.5 * h * k2) @ q
    k4 = (p + h * k3) @ q
    return p + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_master(rates: RateMatrix, input_trace: Sequence[tuple[float, Hashable]],
                     p0, T: float, dt: float) -> Trace:
    """RK4 integration of dp/dt = p Q(x(t)) over [0, T].

    ``input_trace`` lists (duration, symbol) pieces; the last piece is
    extended if the trace is shorter than ``T``. Steps are shortened to land
    exactly on piece boundaries.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    p = np.asarray(p0, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError("p0 must be a probability vector")
    fastest = max(float(np.max(np.abs(np.diag(q)))) for q in rates.rates.values())
    # Gershgorin: every eigenvalue has modulus at most twice the largest exit rate.
    if 2.0 * fastest * dt > RK4_STABILITY:
        raise StabilityError(
            f"dt={dt!r} violates the RK4 stability bound dt <= {RK4_STABILITY / (2 * fastest):.6g}"
        )
    pieces = list(input_trace)
    if not pieces:
        raise ValueError("input_trace must be nonempty")
    times, probs = [0.0], [p.copy()]
    t = 0.0
    for idx, (dur, sym) in enumerate(pieces):
        end = T if idx == len(pieces) - 1 else min(T, t + dur)
        q = np.asarray(rates.rates[sym], dtype=float)
        while t < end - 1e-15:
            h = min(dt, end - t)
            p = _rk4_step(p, q, h)
            t = min(end, t + h)
            times.append(t)
            probs.append(p.copy())
        if t >= T - 1e-15:
            break
    return Trace(np.array(times), np.array(probs))


def integrate_two_state(kin: BindingKinetics, p0: float, T: float, dt: float) -> Trace:
    """Bound-state probability p(t) under dp/dt = k+ c(t) (1 - p) - k- p."""
    keys = {}
    trace = []
    for dur, c in kin.concentration:
        keys.setdefault(c, kin.generator(c))
        trace.append((dur, c))
    out = integrate_master(RateMatrix(keys), trace, [1.0 - p0, p0], T, dt)
    return Trace(out.times, out.probs[:, 1])


@dataclass(frozen=True)
class ConsistencyRow:
    dt: float
    params: ChannelParams
    max_deviation: float
    boundary: bool


def discretization_consistency(k_plus: float, k_minus: float, c_L: float, c_H: float,
                               dt_schedule, pattern: Sequence[tuple[float, str]] | None = None,
                               p0: float = 0.0, ode_dt: float = 1e-3) -> list[ConsistencyRow]:
    """Discrete chain with alpha = k+ c dt, beta = k- dt versus the ODE.

    ``pattern`` is a list of (duration, "L" | "H") pieces; every duration must
    be a whole number of steps for each dt. The bound-state probability is
    compared at every piece boundary and the largest gap is reported.
    """
    if pattern is None:
        pattern = [(0.5, "L"), (0.5, "H"), (0.5, "L"), (0.5, "H")]
    conc = {"L": c_L, "H": c_H}
    kin = BindingKinetics(k_plus, k_minus, tuple((d, conc[s]) for d, s in pattern))
    T = sum(d for d, _ in pattern)
    ode = integrate_two_state(kin, p0, T, min(ode_dt, min(d for d, _ in pattern)))
    checkpoints = np.cumsum([d for d, _ in pattern])
    reference = np.interp(checkpoints, ode.times, ode.probs)

    rows = []
    for dt in dt_schedule:
        a_l, a_h, beta = k_plus * c_L * dt, k_plus * c_H * dt, k_minus * dt
        if max(a_l, a_h, beta) > 1.0 + 1e-12:
            raise ValueError(f"dt={dt!r} gives a transition probability above 1")
        a_l, a_h, beta = min(a_l, 1.0), min(a_h, 1.0), min(beta, 1.0)
        params = ChannelParams(a_l, a_h, beta)
        kernels = {"L": binding_kernel(a_l, beta), "H": binding_kernel(a_h, beta)}
        dist = np.array([1.0 - p0, p0])
        devs = []
        for (dur, sym), ref in zip(pattern, reference):
            steps = dur / dt
            if abs(steps - round(steps)) > 1e-9:
                raise ValueError(f"piece duration {dur!r} is not a multiple of dt={dt!r}")
            dist = dist @ np.linalg.matrix_power(kernels[sym], int(round(steps)))
            devs.append(abs(dist[1] - ref))
        boundary = any(v >= 1.0 for v in (a_l, a_h, beta))
        rows.append(ConsistencyRow(float(dt), params, float(max(devs)), boundary))
    return rows


def loglog_slope(rows: Sequence[ConsistencyRow]) -> float:
    dts = np.log([r.dt for r in rows])
    devs = np.log([r.max_deviation for r in rows])
    return float(np.polyfit(dts, devs, 1)[0])
