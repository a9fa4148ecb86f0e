"""Cache-aided interference networks: DoF formulas, schedulers, exact oracle and certificates."""
from .model import (
    CachingRealization,
    DeliveryAccounting,
    DeliverySchedule,
    DemandVector,
    NetworkConfig,
    PacketId,
    delivery_time,
    validate_config,
    worst_case_demands,
)
from .centralized import (
    centralized_place,
    centralized_schedule,
    delivery_time_centralized,
    dof_centralized,
    splitting_ratio_centralized,
)
from .decentralized import (
    decentralized_place,
    decentralized_schedule,
    dof_decentralized,
    expected_blocks_decentralized,
    montecarlo_delivery,
    splitting_ratio_decentralized,
)
from .bounds import (
    DofReport,
    bruteforce_min_blocks,
    centralized_vs_decentralized_ratio,
    check_block_feasibility,
    dof_upper_bound,
    gap_centralized,
    gap_decentralized,
    verify_counting_bounds,
)
from .analysis import (
    check_j_dominance,
    j_function,
    poly_coefficients,
    quasiconcavity_certificate,
    tradeoff_curve,
    verify_pinelis_inequality,
    verify_poly_nonneg,
    weighted_sum_check,
)

__version__ = "0.1.0"

__all__ = [
    "CachingRealization",
    "DeliveryAccounting",
    "DeliverySchedule",
    "DemandVector",
    "NetworkConfig",
    "PacketId",
    "delivery_time",
    "validate_config",
    "worst_case_demands",
    "centralized_place",
    "centralized_schedule",
    "delivery_time_centralized",
    "dof_centralized",
    "splitting_ratio_centralized",
    "decentralized_place",
    "decentralized_schedule",
    "dof_decentralized",
    "expected_blocks_decentralized",
    "montecarlo_delivery",
    "splitting_ratio_decentralized",
    "DofReport",
    "bruteforce_min_blocks",
    "centralized_vs_decentralized_ratio",
    "check_block_feasibility",
    "dof_upper_bound",
    "gap_centralized",
    "gap_decentralized",
    "verify_counting_bounds",
    "check_j_dominance",
    "j_function",
    "poly_coefficients",
    "quasiconcavity_certificate",
    "tradeoff_curve",
    "verify_pinelis_inequality",
    "verify_poly_nonneg",
    "weighted_sum_check",
]
