"""Exact optimal equivalence couplings and their total-variation duals."""

from .chain import Chain, ChainTrace, mass_ledger, solve_chain
from .coupling import Coupling, complete_subcoupling
from .errors import InstanceError, InternalDefect, PreconditionError, TvdualError
from .flow import flow_oracle
from .measure import (
    GroundSpace,
    JordanDecomposition,
    Measure,
    jordan_decompose,
    meet,
    pushforward,
    tv_over,
)
from .relations import (
    EquivalenceRelation,
    SetFamily,
    dual_relation,
    dual_sigma,
    is_basic,
    is_measurable,
    relation_from_pairs,
)
from .solver import (
    DualityReport,
    Solution,
    couple_within_classes,
    solve_quotient,
    tv_dual,
    verify_strong_duality,
)

__all__ = [
    "Chain",
    "ChainTrace",
    "complete_subcoupling",
    "couple_within_classes",
    "Coupling",
    "dual_relation",
    "dual_sigma",
    "DualityReport",
    "EquivalenceRelation",
    "flow_oracle",
    "GroundSpace",
    "InstanceError",
    "InternalDefect",
    "is_basic",
    "is_measurable",
    "jordan_decompose",
    "JordanDecomposition",
    "mass_ledger",
    "Measure",
    "meet",
    "PreconditionError",
    "pushforward",
    "relation_from_pairs",
    "SetFamily",
    "Solution",
    "solve_chain",
    "solve_quotient",
    "tv_dual",
    "tv_over",
    "TvdualError",
    "verify_strong_duality",
]

__version__ = "0.1.0"
