import numpy as np
import pytest

from ligand_capacity.channel import ChannelParams, ReceptorState
from ligand_capacity.verify import UnboundCase, check_conditions, condition_matrix, verify_theorem1


def test_condition_matrices():
    np.testing.assert_allclose(condition_matrix(ChannelParams(0.1, 0.9, 0.5), "B").entries, [[0.5, 0.5], [0.5, 0.5]])
    np.testing.assert_allclose(condition_matrix(ChannelParams(0.1, 0.9, 0.5), "U").entries, [[0.1, 0.9], [0.9, 0.1]])
    assert condition_matrix(ChannelParams(0.3, 0.3, 0.5), ReceptorState.U).columns_identical
    assert not condition_matrix(ChannelParams(0.1, 0.9, 0.5), ReceptorState.U).columns_identical


def test_check_conditions_examples():
    r = check_conditions(ChannelParams(0.1, 0.9, 0.5))
    assert r.strictly_interior and r.strongly_irreducible and r.strongly_aperiodic
    assert r.R_B_columns_identical and r.R_U_case is UnboundCase.RANK2 and r.theorem1_applicable
    r = check_conditions(ChannelParams(0.3, 0.3, 0.5))
    assert r.R_U_case is UnboundCase.IDENTICAL_COLUMNS and r.theorem1_applicable
    r = check_conditions(ChannelParams(0.0, 0.9, 0.5))
    assert not r.strongly_irreducible and not r.theorem1_applicable


@pytest.mark.parametrize("triple", [(0.1, 1.0, 0.5), (0.1, 0.9, 1.0), (1.0, 1.0, 1.0), (0.0, 0.0, 0.5), (0.2, 0.4, 0.0)])
def test_boundary_never_applicable(triple):
    assert not check_conditions(ChannelParams(*triple)).theorem1_applicable


def test_verify_reference_point():
    rep = verify_theorem1(ChannelParams(0.1, 0.9, 0.5), n=8, seed=7)
    assert rep.passed, [c for c in rep.checks if not c.passed]
    assert rep.check("flatness").measured < 1e-10
    assert rep.check("iid_equals_stationary").measured < 1e-9


def test_verify_uninformative():
    rep = verify_theorem1(ChannelParams(0.3, 0.3, 0.4), n=4)
    assert rep.passed
    assert all(abs(v) < 1e-12 for v in rep.optima.values())


def test_verify_general_causal_shared_grid():
    rep = verify_theorem1(ChannelParams(0.25, 0.75, 0.4), n=3, grid_resolution=0.25)
    assert rep.check("general_le_prev_output").passed
    assert rep.optima["general"] <= rep.optima["prev-output"] + 1e-9


def test_verify_rejects_boundary():
    with pytest.raises(ValueError):
        verify_theorem1(ChannelParams(0.1, 1.0, 0.5))
