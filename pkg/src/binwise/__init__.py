"""Space-partition models of offline password guessing."""

from .attack import (
    GuessCurve,
    HybridModel,
    budget_from_rate,
    build_bin_model,
    build_hybrid_model,
    build_mangling_model,
    effective_budget_after_salting,
    long_password_substring_share,
    simulate_attack,
    utilization_report,
)
from .bins import (
    ClassificationError,
    PatternSyntaxError,
    capacity,
    capacity_sum_check,
    classify,
    enumerate_constrained_bins,
    matches,
    parse_pattern,
    sample_bin,
    search_space_size,
)
from .corpus import Corpus, ingest
from .explorer import PolicyParams, make_assigner, min_length, strategy_comparison
from .partition import (
    AttackPlan,
    ExpectedSuccess,
    Partition,
    PartitionModel,
    compare_density,
    expected_success,
    oracle_best_by_budget,
    oracle_optimal_allocation,
    plan_density_order,
    plan_probability_order,
    uniform_expected_success,
)

__version__ = "0.1.0"
