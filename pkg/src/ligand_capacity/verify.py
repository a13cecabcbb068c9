"""Numerical checks of the no-feedback-gain result and of its technical conditions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams, ReceptorState
from .directed import (
    GENERAL_CAUSAL_CAP,
    OPTIMIZE_CAPS,
    PolicyClass,
    lemma2_flatness,
    max_feedback_di,
)
from .markov import strong_aperiodicity, strong_irreducibility, support_matrix

FLATNESS_TOL = 1e-10
CLASS_TOL = 1e-9
RANK_TOL = 1e-14


@dataclass(frozen=True)
class ConditionMatrix:
    """Next-state law from ``state``: rows (B, U), columns (L, H)."""

    state: ReceptorState
    entries: np.ndarray

    @property
    def columns_identical(self) -> bool:
        return bool(np.array_equal(self.entries[:, 0], self.entries[:, 1]))

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.entries))


def condition_matrix(params: ChannelParams, state) -> ConditionMatrix:
    state = ReceptorState[state] if isinstance(state, str) else ReceptorState(state)
    if state is ReceptorState.B:
        b = params.beta
        m = np.array([[1.0 - b, 1.0 - b], [b, b]])
    else:
        a_l, a_h = params.alpha_L, params.alpha_H
        m = np.array([[a_l, a_h], [1.0 - a_l, 1.0 - a_h]])
    return ConditionMatrix(state, m)


class UnboundCase(str, enum.Enum):
    IDENTICAL_COLUMNS = "IdenticalColumns"
    RANK2 = "Rank2"


@dataclass(frozen=True)
class ConditionReport:
    strictly_interior: bool
    strongly_irreducible: bool
    strongly_aperiodic: bool
    R_B_columns_identical: bool
    R_U_case: UnboundCase | None
    theorem1_applicable: bool
    details: str = ""


def check_conditions(params: ChannelParams) -> ConditionReport:
    """Support-graph conditions plus the R_B / R_U structure.

    ``theorem1_applicable`` also requires every parameter strictly inside
    (0, 1): at some boundary points (alpha_H = 1, beta = 1) the Boolean
    conditions still hold, but the hypothesis of the result does not.
    """
    sup = support_matrix(params)
    irr = strong_irreducibility(sup)
    aper = strong_aperiodicity(sup)
    r_b = condition_matrix(params, ReceptorState.B)
    r_u = condition_matrix(params, ReceptorState.U)
    if params.alpha_L == params.alpha_H:
        case = UnboundCase.IDENTICAL_COLUMNS
    elif abs(params.alpha_L - params.alpha_H) > RANK_TOL:
        case = UnboundCase.RANK2
    else:
        case = None
    notes = [f"support={sup.as_array().tolist()}", f"det(R_U)={params.alpha_L - params.alpha_H:.17g}"]
    if not params.strict:
        notes.append("parameters on the boundary of [0, 1]")
    if case is None:
        notes.append("R_U nearly singular, case unresolved")
    ok = params.strict and irr and aper and r_b.columns_identical and case is not None
    return ConditionReport(params.strict, irr, aper, r_b.columns_identical, case, ok, "; ".join(notes))


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: float
    tolerance: float | None = None
    detail: str = ""


@dataclass
class Theorem1Report:
    params: ChannelParams
    n: int
    grid_resolution: float
    seed: int
    checks: list[Check] = field(default_factory=list)
    optima: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)


def verify_theorem1(params: ChannelParams, n: int = 8, grid_resolution: float = 0.05,
                    seed: int = 0, flatness_trials: int = 4,
                    initial=ReceptorState.U) -> Theorem1Report:
    """Run the finite-horizon checks and collect measured deviations.

    * ``conditions`` -- :func:`check_conditions` reports the result applicable;
    * ``flatness`` -- total directed information does not move with the
      bound-state schedule;
    * ``iid_equals_stationary`` -- the best stationary feedback policy is no
      better than the best iid one;
    * ``class_order`` -- optima are ordered iid <= stationary <= prev-output;
    * ``general_le_prev_output`` -- full-history feedback gains nothing over
      previous-output feedback (only when n <= 4);
    * ``end_effect_shrinks`` -- the prev-output excess over stationary, which
      is a finite-horizon end effect, is smaller at n than at n // 2.
    """
    if not params.strict:
        raise ValueError("verify_theorem1 needs 0 < alpha_L, alpha_H, beta < 1")
    if n > OPTIMIZE_CAPS[PolicyClass.PREV_OUTPUT.value]:
        from .directed import EnumerationBudgetError

        raise EnumerationBudgetError(
            f"enumeration budget exceeded: n={n} > cap {OPTIMIZE_CAPS['prev-output']} for verification"
        )
    rng = np.random.default_rng(seed)
    report = Theorem1Report(params, n, grid_resolution, seed)

    cond = check_conditions(params)
    report.checks.append(Check("conditions", cond.theorem1_applicable, float(cond.theorem1_applicable),
                               None, cond.details))

    worst = 0.0
    for _ in range(flatness_trials):
        u = rng.random(n)
        b_grid = [np.zeros(n), np.ones(n), np.full(n, 0.5), rng.random(n)]
        worst = max(worst, lemma2_flatness(params, u, b_grid, initial, n))
    method = "enumeration" if n <= GENERAL_CAUSAL_CAP else "recursion"
    report.checks.append(Check("flatness", worst < FLATNESS_TOL, worst, FLATNESS_TOL, f"engine={method}"))

    opt = {}
    for cls in (PolicyClass.IID, PolicyClass.STATIONARY, PolicyClass.PREV_OUTPUT):
        opt[cls.value] = max_feedback_di(params, cls, initial, n, grid_resolution).per_symbol_bits
    gap = abs(opt["stationary"] - opt["iid"])
    report.checks.append(Check("iid_equals_stationary", gap < CLASS_TOL, gap, CLASS_TOL))

    worst_order = max(opt["iid"] - opt["stationary"], opt["stationary"] - opt["prev-output"])
    report.checks.append(Check("class_order", worst_order <= CLASS_TOL, worst_order, CLASS_TOL))

    if n <= OPTIMIZE_CAPS[PolicyClass.GENERAL_CAUSAL.value]:
        opt["general"] = max_feedback_di(params, PolicyClass.GENERAL_CAUSAL, initial, n,
                                         grid_resolution).per_symbol_bits
        excess = opt["general"] - opt["prev-output"]
        report.checks.append(Check("general_le_prev_output", excess <= CLASS_TOL, excess, CLASS_TOL))

    end_gap = opt["prev-output"] - opt["stationary"]
    if n >= 2:
        half = max(1, n // 2)
        half_gap = (max_feedback_di(params, PolicyClass.PREV_OUTPUT, initial, half, grid_resolution).per_symbol_bits
                    - max_feedback_di(params, PolicyClass.STATIONARY, initial, half, grid_resolution).per_symbol_bits)
        shrinks = end_gap <= half_gap + CLASS_TOL
        report.checks.append(Check("end_effect_shrinks", shrinks, end_gap, None,
                                   f"gap at n={n}: {end_gap:.3e}, at n={half}: {half_gap:.3e}"))
    report.optima = opt
    return report
