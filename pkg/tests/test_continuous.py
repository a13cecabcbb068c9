import math

import numpy as np
import pytest

from ligand_capacity.continuous import (
    BindingKinetics,
    RateMatrix,
    StabilityError,
    discretization_consistency,
    integrate_master,
    integrate_two_state,
    loglog_slope,
)


def test_rate_matrix_validation():
    with pytest.raises(ValueError):
        RateMatrix.constant([[-1.0, 0.5], [1.0, -1.0]])
    with pytest.raises(ValueError):
        RateMatrix.constant([[1.0, -1.0], [1.0, -1.0]])


def test_fixed_point_is_constant():
    q = np.array([[-2.0, 1.5, 0.5], [1.0, -1.0, 0.0], [0.3, 0.7, -1.0]])
    w, v = np.linalg.eig(q.T)
    pi = np.real(v[:, np.argmin(np.abs(w))])
    pi /= pi.sum()
    tr = integrate_master(RateMatrix.constant(q), [(5.0, None)], pi, 5.0, 0.01)
    assert np.max(np.abs(tr.probs - pi)) < 1e-9


def test_zero_rates_constant():
    tr = integrate_master(RateMatrix.constant(np.zeros((2, 2))), [(1.0, None)], [0.3, 0.7], 1.0, 0.1)
    np.testing.assert_array_equal(tr.probs, np.tile([0.3, 0.7], (len(tr.times), 1)))


@pytest.mark.parametrize("kp,km,c,p0", [(1.0, 1.0, 2.0, 0.0), (3.0, 0.5, 0.7, 0.9), (0.2, 4.0, 1.0, 0.5)])
def test_relaxation_closed_form(kp, km, c, p0):
    kin = BindingKinetics(kp, km, ((3.0, c),))
    tr = integrate_two_state(kin, p0, 3.0, 1e-3)
    p_star = kp * c / (kp * c + km)
    ref = p_star + (p0 - p_star) * np.exp(-(kp * c + km) * tr.times)
    assert np.max(np.abs(tr.probs - ref)) < 1e-8


def test_decay_and_equilibria():
    kin = BindingKinetics(1.0, 2.0, ((0.5, 0.0),))
    tr = integrate_two_state(kin, 0.8, 0.5, 1e-3)
    assert tr.probs[-1] == pytest.approx(0.8 * math.exp(-1.0), abs=1e-8)
    sym = BindingKinetics(1.0, 1.0, ((40.0, 1.0),))
    assert integrate_two_state(sym, 0.0, 40.0, 0.01).probs[-1] == pytest.approx(0.5, abs=1e-12)
    kin = BindingKinetics(2.0, 1.0, ((2.0, 1.5),))
    p_star = kin.equilibrium(1.5)
    tr = integrate_two_state(kin, p_star, 2.0, 0.01)
    assert np.max(np.abs(tr.probs - p_star)) < 1e-12


def test_piece_boundaries_hit_exactly():
    kin = BindingKinetics(1.0, 1.0, ((0.33, 0.5), (0.41, 2.0)))
    tr = integrate_two_state(kin, 0.0, 0.74, 0.1)
    assert any(abs(t - 0.33) < 1e-12 for t in tr.times)
    assert tr.times[-1] == pytest.approx(0.74)


def test_stability_error():
    with pytest.raises(StabilityError):
        integrate_master(RateMatrix.constant([[-100.0, 100.0], [0.0, 0.0]]), [(1.0, None)], [1, 0], 1.0, 0.1)


def test_first_order_consistency():
    rows = discretization_consistency(1.0, 1.0, 0.5, 2.0, [0.1, 0.01, 0.001])
    assert abs(loglog_slope(rows) - 1.0) < 0.15
    halving = discretization_consistency(1.0, 1.0, 0.5, 2.0, [0.05, 0.025, 0.0125])
    ratios = [a.max_deviation / b.max_deviation for a, b in zip(halving, halving[1:])]
    assert all(1.8 < r < 2.2 for r in ratios)


def test_equal_concentrations_converge():
    rows = discretization_consistency(1.0, 1.0, 1.0, 1.0, [0.1, 0.01, 0.001])
    devs = [r.max_deviation for r in rows]
    assert devs[0] > devs[1] > devs[2]


def test_boundary_flag():
    rows = discretization_consistency(1.0, 1.0, 0.5, 2.0, [0.5])
    assert rows[0].boundary and rows[0].params.alpha_H == 1.0
    with pytest.raises(ValueError):
        discretization_consistency(1.0, 1.0, 0.5, 2.0, [0.25 * 3])
