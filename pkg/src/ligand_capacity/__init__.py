"""Information capacity of a two-state ligand receptor driven by a binary concentration."""

from .channel import ChannelParams, ReceptorState, ConcentrationSymbol, estimate_rate_mc, sample_trajectory
from .iid import iid_rate, maximize_iid, capacity_sweep, golden_limit_study, GOLDEN_CAPACITY
from .directed import (
    PolicyClass, IidPolicy, StationaryPolicy, PrevOutputPolicy, GeneralCausalPolicy,
    directed_information, di_rate_estimate, max_feedback_di, EnumerationBudgetError,
)
from .verify import check_conditions, verify_theorem1
from .poisson import kabanov_capacity, mi_rate_bounds, kabanov_convergence, MarkovInputProcess, PoissonDiscretization
from .continuous import integrate_master, integrate_two_state, discretization_consistency

__version__ = "0.1.0"
