"""Truthful allocation rules and their payments."""
from gbmech.mechanisms.cover import star_cover_allocate, star_cover_payments
from gbmech.mechanisms.hyperstar import (
    effective_root_costs,
    hybrid_hyperstar_allocate,
    hybrid_hyperstar_payments,
)
from gbmech.mechanisms.offsets import (
    DEFAULT_TIE,
    CustomG,
    GFunctionSpec,
    LpLeaf,
    MaxLeaf,
    SumLeaf,
    TieBreakPolicy,
)
from gbmech.mechanisms.registry import SHIPPED, Mechanism, get_mechanism, payments
from gbmech.mechanisms.star import (
    all_or_nothing_allocate,
    all_or_nothing_payments,
    combined_max_mechanism,
    critical_value,
    hybrid_lp_max_allocate,
    hybrid_star_allocate,
    hybrid_star_allocate_fast_max,
    hybrid_star_payments,
    leaf_threshold,
    select_root_set,
)
from gbmech.mechanisms.vcg import vcg_allocate, vcg_payments

__all__ = [
    "DEFAULT_TIE", "CustomG", "GFunctionSpec", "LpLeaf", "MaxLeaf", "SumLeaf", "TieBreakPolicy",
    "Mechanism", "SHIPPED", "get_mechanism", "payments",
    "all_or_nothing_allocate", "all_or_nothing_payments", "combined_max_mechanism", "critical_value",
    "hybrid_lp_max_allocate", "hybrid_star_allocate", "hybrid_star_allocate_fast_max",
    "hybrid_star_payments", "leaf_threshold", "select_root_set",
    "effective_root_costs", "hybrid_hyperstar_allocate", "hybrid_hyperstar_payments",
    "star_cover_allocate", "star_cover_payments", "vcg_allocate", "vcg_payments",
]
