"""Exact finite-horizon directed information over the receptor channel.

Two engines compute the same quantity:

* enumeration -- the full joint table over (y_0, x_1, y_1, ..., x_n, y_n),
  axes in that chronological order, valid for any causal policy;
* recursion -- the output chain is first-order Markov under policies that
  look at the previous output only, so each term reduces to
  H(Y_i | Y_{i-1}) - H(Y_i | Y_{i-1}, X_i) evaluated from the marginal of
  Y_{i-1}.

The initial receptor state y_0 may be random. It is visible to the policy at
step 1 but is not part of the conditioning in I(X^i; Y_i | Y^{i-1}), which
starts at Y_1.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams, ReceptorState, channel_tensor, aggregated_alpha
from .markov import LN2, stationary_distribution

GENERAL_CAUSAL_CAP = 10
MARKOV_CAP = 24
RATE_ESTIMATE_CAP = 10_000
OPTIMIZE_CAPS = {"general": 4, "prev-output": 10, "stationary": 24, "iid": 24}

TIE_TOL = 1e-12
EXHAUSTIVE_BUDGET = 5_000


class EnumerationBudgetError(ValueError):
    pass


class PolicyClass(str, enum.Enum):
    GENERAL_CAUSAL = "general"
    PREV_OUTPUT = "prev-output"
    STATIONARY = "stationary"
    IID = "iid"


# -- policies -------------------------------------------------------------------

def _prob(v: float, name: str) -> float:
    v = float(v)
    if not (0.0 <= v <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
    return v


class _MarkovPolicy:
    """Policies whose step-i input law depends on y_{i-1} only."""

    def pair(self, i: int) -> tuple[float, float]:
        raise NotImplementedError

    def step_table(self, i: int) -> np.ndarray:
        u, b = self.pair(i)
        return np.array([u, b]).reshape((1,) * (2 * i - 2) + (2,))


@dataclass(frozen=True)
class IidPolicy(_MarkovPolicy):
    p_L: float
    policy_class = PolicyClass.IID

    def __post_init__(self):
        _prob(self.p_L, "p_L")

    def pair(self, i):
        return self.p_L, self.p_L


@dataclass(frozen=True)
class StationaryPolicy(_MarkovPolicy):
    """Time-invariant p(X_i = L | y_{i-1}).

    The first symbol is drawn with the same pair evaluated at the initial
    receptor state, so ``p_L_given_B == p_L_given_U`` is exactly iid.
    """

    p_L_given_U: float
    p_L_given_B: float
    policy_class = PolicyClass.STATIONARY

    def __post_init__(self):
        _prob(self.p_L_given_U, "p_L_given_U")
        _prob(self.p_L_given_B, "p_L_given_B")

    def pair(self, i):
        return self.p_L_given_U, self.p_L_given_B


@dataclass(frozen=True)
class PrevOutputPolicy(_MarkovPolicy):
    """Per-step pairs p(X_i = L | y_{i-1}) for i = 1..n; step 1 reads y_0."""

    p_L_given_U: tuple[float, ...]
    p_L_given_B: tuple[float, ...]
    policy_class = PolicyClass.PREV_OUTPUT

    def __post_init__(self):
        object.__setattr__(self, "p_L_given_U", tuple(_prob(v, "p_L_given_U") for v in self.p_L_given_U))
        object.__setattr__(self, "p_L_given_B", tuple(_prob(v, "p_L_given_B") for v in self.p_L_given_B))
        if len(self.p_L_given_U) != len(self.p_L_given_B):
            raise ValueError("unbound and bound schedules must have equal length")

    @property
    def horizon(self) -> int:
        return len(self.p_L_given_U)

    def pair(self, i):
        if i > self.horizon:
            raise ValueError(f"policy defined for {self.horizon} steps, step {i} requested")
        return self.p_L_given_U[i - 1], self.p_L_given_B[i - 1]


@dataclass(frozen=True)
class GeneralCausalPolicy:
    """P(X_i = L | x^{i-1}, y_0^{i-1}) as one array per step.

    ``tables[i-1]`` has 2i - 1 axes ordered (y_0, x_1, y_1, ..., x_{i-1}, y_{i-1}).
    """

    tables: tuple[np.ndarray, ...] = field(compare=False)
    policy_class = PolicyClass.GENERAL_CAUSAL

    def __post_init__(self):
        tabs = []
        for i, t in enumerate(self.tables, start=1):
            t = np.broadcast_to(np.asarray(t, dtype=float), (2,) * (2 * i - 1)).copy()
            if np.any(t < 0.0) or np.any(t > 1.0):
                raise ValueError(f"step {i} table has entries outside [0, 1]")
            tabs.append(t)
        object.__setattr__(self, "tables", tuple(tabs))

    @property
    def horizon(self) -> int:
        return len(self.tables)

    def step_table(self, i: int) -> np.ndarray:
        if i > self.horizon:
            raise ValueError(f"policy defined for {self.horizon} steps, step {i} requested")
        return self.tables[i - 1]

    @classmethod
    def from_function(cls, f, n: int) -> GeneralCausalPolicy:
        """Tabulate ``f(i, xs, ys)`` where ``xs = x^{i-1}`` and ``ys = y_0^{i-1}``."""
        tables = []
        for i in range(1, n + 1):
            t = np.empty((2,) * (2 * i - 1))
            for idx in itertools.product((0, 1), repeat=2 * i - 1):
                ys, xs = idx[0::2], idx[1::2]
                t[idx] = f(i, xs, ys)
            tables.append(t)
        return cls(tuple(tables))

    @classmethod
    def from_markov(cls, policy: _MarkovPolicy, n: int) -> GeneralCausalPolicy:
        return cls(tuple(policy.step_table(i) for i in range(1, n + 1)))


def stationary_initial(params: ChannelParams, policy) -> np.ndarray:
    """Stationary law of the receptor under an iid or stationary policy."""
    u, _ = policy.pair(1)
    a = float(aggregated_alpha(params, u))
    k = np.array([[1.0 - a, a], [params.beta, 1.0 - params.beta]])
    return stationary_distribution(k).as_array()


def _initial_vector(initial) -> np.ndarray:
    if isinstance(initial, (ReceptorState, str, int)) and not isinstance(initial, bool):
        state = ReceptorState[initial] if isinstance(initial, str) else ReceptorState(initial)
        v = np.zeros(2)
        v[state] = 1.0
        return v
    v = np.asarray(initial, dtype=float)
    if v.shape != (2,) or np.any(v < 0) or abs(v.sum() - 1.0) > 1e-12:
        raise ValueError("initial must be a ReceptorState or a probability vector over (U, B)")
    return v


def _check_horizon(policy, n: int, cap_general=GENERAL_CAUSAL_CAP, cap_markov=MARKOV_CAP):
    if n < 1:
        raise ValueError("horizon n must be >= 1")
    cap = cap_general if policy.policy_class is PolicyClass.GENERAL_CAUSAL else cap_markov
    if n > cap:
        raise EnumerationBudgetError(
            f"enumeration budget exceeded: n={n} > cap {cap} for {policy.policy_class.value} policies"
        )


# -- joint distribution -----------------------------------------------------------

@dataclass(frozen=True)
class JointDistribution:
    """Exact law of one run of the channel under a policy.

    ``table`` has axes (y_0, x_1, y_1, ..., x_n, y_n); it is ``None`` for
    Markov-class policies beyond the enumeration cap, in which case only the
    per-step output marginals are available.
    """

    horizon: int
    initial: np.ndarray
    table: np.ndarray | None
    output_marginals: tuple[np.ndarray, ...]

    def xy_table(self) -> np.ndarray:
        """Table over (x_1, y_1, ..., x_n, y_n) with y_0 summed out."""
        if self.table is None:
            raise ValueError("no full table at this horizon")
        return self.table.sum(axis=0)

    def prob(self, xs, ys) -> float:
        from .channel import _as_state, _as_symbol

        if isinstance(xs, str):
            xs = list(xs)
        if isinstance(ys, str):
            ys = list(ys)
        idx = []
        for x, y in zip(xs, ys):
            idx += [int(_as_symbol(x)), int(_as_state(y))]
        return float(self.xy_table()[tuple(idx)])


def _enumerate(params: ChannelParams, policy, init: np.ndarray, n: int) -> np.ndarray:
    k = channel_tensor(params)  # [y_prev, x, y]
    joint = init.copy()
    for i in range(1, n + 1):
        q_l = policy.step_table(i)
        px = np.stack(np.broadcast_arrays(q_l, 1.0 - q_l), axis=-1)
        joint = joint[..., None] * px
        joint = joint[..., None] * k
    return joint


def _markov_marginals(params: ChannelParams, policy, init: np.ndarray, n: int) -> list[np.ndarray]:
    k = channel_tensor(params)
    d = init.copy()
    out = [d]
    for i in range(1, n + 1):
        u, b = policy.pair(i)
        q = np.array([[u, 1.0 - u], [b, 1.0 - b]])  # [y_prev, x]
        d = np.einsum("a,ax,axy->y", d, q, k)
        out.append(d)
    return out


def build_joint(params: ChannelParams, policy, initial=ReceptorState.U, n: int = 1) -> JointDistribution:
    """Joint law of (y_0, x^n, y^n) under the causal factorisation."""
    _check_horizon(policy, n)
    init = _initial_vector(initial)
    table = None
    if n <= GENERAL_CAUSAL_CAP:
        table = _enumerate(params, policy, init, n)
    if policy.policy_class is PolicyClass.GENERAL_CAUSAL:
        marg = [init]
        for i in range(1, n + 1):
            keep = 2 * i
            m = table.sum(axis=tuple(a for a in range(table.ndim) if a != keep))
            marg.append(m)
    else:
        marg = _markov_marginals(params, policy, init, n)
    return JointDistribution(n, init, table, tuple(marg))


# -- directed information ---------------------------------------------------------

@dataclass(frozen=True)
class DirectedInfoResult:
    total_bits: float
    per_term_bits: tuple[float, ...]
    per_symbol_bits: float


def _cond_entropy(p: np.ndarray, axis: int = -1) -> float:
    """H(V | rest) in bits for a joint table, V on ``axis``."""
    marg = p.sum(axis=axis, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(p > 0, p / marg, 1.0)
    return float(-np.sum(p * np.log(ratio)) / LN2)


def _terms_enumeration(table: np.ndarray, n: int) -> list[float]:
    xy = table.sum(axis=0)
    terms = []
    for i in range(1, n + 1):
        m = xy.sum(axis=tuple(range(2 * i, 2 * n))) if i < n else xy
        y_only = m.sum(axis=tuple(range(0, 2 * i, 2)))
        terms.append(_cond_entropy(y_only) - _cond_entropy(m))
    return terms


def _row_information(k_row: np.ndarray, q: np.ndarray) -> float:
    """I(X; Y) in bits for input law ``q`` over rows ``k_row[x, y]``."""
    mix = q @ k_row
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(k_row > 0, k_row / mix, 1.0)
    return float(np.sum(q[:, None] * k_row * np.log(ratio)) / LN2)


def _terms_recursion(params: ChannelParams, policy, init: np.ndarray, n: int) -> list[float]:
    k = channel_tensor(params)
    u, b = policy.pair(1)
    q = np.array([[u, 1.0 - u], [b, 1.0 - b]])
    first = init[:, None, None] * q[:, :, None] * k  # (y0, x1, y1)
    terms = [_cond_entropy(first.sum(axis=(0, 1))[None, :]) - _cond_entropy(first.sum(axis=0))]
    d = first.sum(axis=(0, 1))
    for i in range(2, n + 1):
        u, b = policy.pair(i)
        q = np.array([[u, 1.0 - u], [b, 1.0 - b]])
        terms.append(sum(d[y] * _row_information(k[y], q[y]) for y in (0, 1) if d[y] > 0))
        d = np.einsum("a,ax,axy->y", d, q, k)
    return terms


def _result(terms) -> DirectedInfoResult:
    total = float(np.sum(terms))
    return DirectedInfoResult(total, tuple(float(t) for t in terms), total / len(terms))


def directed_information(params: ChannelParams, policy, initial=ReceptorState.U, n: int = 1,
                         method: str = "auto") -> DirectedInfoResult:
    """I(X^n -> Y^n) as the sum of I(X^i; Y_i | Y^{i-1}) over i = 1..n.

    ``method`` is ``"enumeration"``, ``"recursion"`` (Markov-class policies
    only) or ``"auto"``, which picks the recursion whenever it applies.
    """
    _check_horizon(policy, n)
    init = _initial_vector(initial)
    markov = policy.policy_class is not PolicyClass.GENERAL_CAUSAL
    if method == "auto":
        method = "recursion" if markov else "enumeration"
    if method == "recursion":
        if not markov:
            raise ValueError("the recursion needs a policy that reads the previous output only")
        return _result(_terms_recursion(params, policy, init, n))
    if method != "enumeration":
        raise ValueError(f"unknown method {method!r}")
    if n > GENERAL_CAUSAL_CAP:
        raise EnumerationBudgetError(f"enumeration budget exceeded: n={n} > cap {GENERAL_CAUSAL_CAP}")
    return _result(_terms_enumeration(_enumerate(params, policy, init, n), n))


@dataclass(frozen=True)
class RateEstimate:
    cesaro_bits: float
    final_term_bits: float


def di_rate_estimate(params: ChannelParams, policy, initial=ReceptorState.U, n: int = 2) -> RateEstimate:
    """Per-symbol directed information and the last term for a stationary policy."""
    if policy.policy_class not in (PolicyClass.STATIONARY, PolicyClass.IID):
        raise ValueError("di_rate_estimate needs a stationary or iid policy")
    if n < 2:
        raise ValueError("n must be >= 2")
    if n > RATE_ESTIMATE_CAP:
        raise EnumerationBudgetError(f"enumeration budget exceeded: n={n} > cap {RATE_ESTIMATE_CAP}")
    terms = _terms_recursion(params, policy, _initial_vector(initial), n)
    return RateEstimate(float(np.sum(terms)) / n, float(terms[-1]))


def lemma2_flatness(params: ChannelParams, u_schedule, b_grid, initial=ReceptorState.U,
                    n: int | None = None, method: str = "enumeration") -> float:
    """Largest spread of total directed information across bound-state schedules.

    The unbound-state schedule is held fixed; each entry of ``b_grid`` is a
    full bound-state schedule of the same length.
    """
    u_schedule = tuple(u_schedule)
    n = len(u_schedule) if n is None else n
    if len(u_schedule) != n:
        raise ValueError("u_schedule length must equal n")
    if method == "enumeration" and n > GENERAL_CAUSAL_CAP:
        method = "recursion"
    values = []
    for b in b_grid:
        b = tuple(b)
        if len(b) != n:
            raise ValueError("every bound-state schedule must have length n")
        pol = PrevOutputPolicy(u_schedule, b)
        values.append(directed_information(params, pol, initial, n, method=method).total_bits)
    return float(max(values) - min(values))


# -- policy optimisation ----------------------------------------------------------

def _general_sizes(n: int) -> list[int]:
    return [2 ** (2 * i - 1) for i in range(1, n + 1)]


def _dimension(cls: PolicyClass, n: int) -> int:
    if cls is PolicyClass.IID:
        return 1
    if cls is PolicyClass.STATIONARY:
        return 2
    if cls is PolicyClass.PREV_OUTPUT:
        return 2 * n
    return sum(_general_sizes(n))


def policy_from_vector(cls: PolicyClass, theta, n: int):
    theta = np.clip(np.asarray(theta, dtype=float), 0.0, 1.0)
    if cls is PolicyClass.IID:
        return IidPolicy(theta[0])
    if cls is PolicyClass.STATIONARY:
        return StationaryPolicy(theta[0], theta[1])
    if cls is PolicyClass.PREV_OUTPUT:
        return PrevOutputPolicy(tuple(theta[0::2]), tuple(theta[1::2]))
    tables, pos = [], 0
    for i, size in enumerate(_general_sizes(n), start=1):
        tables.append(theta[pos:pos + size].reshape((2,) * (2 * i - 1)))
        pos += size
    return GeneralCausalPolicy(tuple(tables))


def _coordinate_order(cls: PolicyClass, n: int) -> list[int]:
    # Later steps first: with the future fixed, each earlier coordinate then
    # sees a concave stage problem, and one backward pass is dynamic programming.
    return list(reversed(range(_dimension(cls, n))))


@dataclass(frozen=True)
class PolicySearchResult:
    policy: object
    theta: tuple[float, ...]
    per_symbol_bits: float
    evaluations: int
    sweeps: int


def _golden_max(f, a, b, tol):
    from .iid import golden_section_max

    return golden_section_max(f, a, b, tol)


def max_feedback_di(params: ChannelParams, policy_class, initial=ReceptorState.U, n: int = 2,
                    grid_resolution: float = 0.25, refine: bool = True, tol: float = 1e-10,
                    max_sweeps: int = 60) -> PolicySearchResult:
    """Best per-symbol directed information within one policy class.

    Exhaustive grid search when the grid has at most ``EXHAUSTIVE_BUDGET``
    points, otherwise coordinate-wise grid scans from the grid point nearest
    0.5. With ``refine`` each coordinate is then polished by golden-section
    search between its neighbouring grid values until a full sweep gains
    less than 1e-13 bits. Ties go to the lexicographically smallest vector.
    """
    cls = PolicyClass(policy_class)
    if n > OPTIMIZE_CAPS[cls.value]:
        raise EnumerationBudgetError(
            f"enumeration budget exceeded: n={n} > cap {OPTIMIZE_CAPS[cls.value]} for {cls.value} search"
        )
    if not (0.0 < grid_resolution <= 1.0):
        raise ValueError("grid_resolution must lie in (0, 1]")
    init = _initial_vector(initial)
    grid = np.linspace(0.0, 1.0, int(round(1.0 / grid_resolution)) + 1)
    dim = _dimension(cls, n)
    evals = 0

    def objective(theta) -> float:
        nonlocal evals
        evals += 1
        pol = policy_from_vector(cls, theta, n)
        return directed_information(params, pol, init, n).per_symbol_bits

    if grid.size ** dim <= EXHAUSTIVE_BUDGET:
        best_theta, best = None, -np.inf
        for combo in itertools.product(grid, repeat=dim):
            v = objective(combo)
            if v > best + TIE_TOL:
                best_theta, best = np.array(combo), v
        theta = best_theta
    else:
        theta = np.full(dim, grid[np.argmin(np.abs(grid - 0.5))])
        best = objective(theta)
        for _ in range(max_sweeps):
            gained = 0.0
            for j in _coordinate_order(cls, n):
                trial = theta.copy()
                vals = []
                for g in grid:
                    trial[j] = g
                    vals.append(objective(trial))
                vals = np.array(vals)
                top = vals.max()
                if top > best + TIE_TOL:
                    k = int(np.flatnonzero(vals >= top - TIE_TOL)[0])
                    gained += top - best
                    theta[j], best = grid[k], vals[k]
            if gained < 1e-13:
                break

    sweeps = 0
    if refine:
        for sweeps in range(1, max_sweeps + 1):
            gained = 0.0
            for j in _coordinate_order(cls, n):
                trial = theta.copy()

                def f(v, trial=trial, j=j):
                    trial[j] = v
                    return objective(trial)

                vals = np.array([f(g) for g in grid])
                k = int(np.argmax(vals))
                if vals[k] > best + 1e-15:
                    centre, lo, hi = grid[k], grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
                    gained += vals[k] - best
                    theta[j], best = centre, vals[k]
                else:
                    cur = theta[j]
                    lo = grid[grid < cur].max(initial=0.0)
                    hi = grid[grid > cur].min(initial=1.0)
                x, fx, _, _ = _golden_max(f, lo, hi, tol)
                if fx > best + 1e-15:
                    gained += fx - best
                    theta[j], best = x, fx
            if gained < 1e-13:
                break

    # Coordinates the objective ignores (e.g. bound-state inputs) go to 0.
    for j in range(dim):
        if theta[j] != 0.0:
            trial = theta.copy()
            trial[j] = 0.0
            v = objective(trial)
            if v >= best - TIE_TOL:
                theta, best = trial, v

    pol = policy_from_vector(cls, theta, n)
    return PolicySearchResult(pol, tuple(float(t) for t in theta), float(best), evals, sweeps)

