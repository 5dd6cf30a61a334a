"""Solver and verifier for a two-player flow-security game.

A defender routes flow through a capacitated network for profit, an
attacker destroys edges for profit, and this package computes the flow
quantities that drive the game, builds the closed-form equilibria of each
parameter region (including budgeted and cut-partition variants), and
verifies arbitrary mixed strategies with exact best-response oracles and
Monte-Carlo simulation.
"""

__version__ = "0.1.0"

from .budget import (
    BudgetAnalysis,
    PartitionSolution,
    analyze_budget,
    attacker_budget_lower_bound,
    budget_to_dict,
    min_budget_partition_equilibrium,
    min_defender_budget,
    optimal_partition_size,
    partition_for_cut,
    solve_min_max_partition,
)
from .equilibria import (
    MU0,
    X0,
    EquilibriumProfile,
    Partition,
    Region,
    TheoremOneQuantities,
    check_partition,
    check_probability_bounds,
    classify_region,
    cut_edge_statistics,
    enumerate_partitions,
    partition_equilibrium,
    partition_from_dict,
    partition_to_dict,
    profile_to_dict,
    region1_equilibrium,
    region2_equilibrium,
    region3_equilibrium,
    region_to_dict,
    scaled_equilibrium,
    theorem1_quantities,
)
from .errors import (
    AmbiguousEdge,
    AssumptionViolated,
    BoundaryParameters,
    BudgetOutOfRange,
    FlowGameError,
    InputError,
    InvalidNetwork,
    InvalidPartition,
    InvalidStrategy,
    MissingNode,
    ModelError,
    NegativeCapacity,
    NegativeCost,
    NoPathSourceToSink,
    SelfLoop,
    TooManyEdges,
    TooManyNodes,
    TooManyPaths,
    WrongRegion,
)
from .flowopt import (
    Assumption1Check,
    Assumption2Check,
    CutSet,
    FlowAnalysis,
    alpha,
    analysis_to_dict,
    analyze,
    check_assumption1,
    check_assumption2,
    cut_to_dict,
    enumerate_min_cuts,
    enumerate_paths,
    max_flow,
    min_cost_max_flow,
    min_cut,
    path_cost,
)
from .mcsim import (
    SimResult,
    SimStat,
    monte_carlo,
    sample_play,
    sim_result_to_dict,
)
from .netmodel import (
    Attack,
    Edge,
    FlowAction,
    GameParams,
    MixedAttackStrategy,
    MixedFlowStrategy,
    Network,
    PathFlow,
    Rational,
    attack_cost,
    attack_strategy_from_dict,
    attack_strategy_to_dict,
    edge_flows,
    effective_flow,
    expected_payoffs,
    flow_actions_equal,
    flow_strategy_from_dict,
    flow_strategy_to_dict,
    flow_value,
    format_rational,
    is_feasible,
    load_attack_strategy,
    load_flow_strategy,
    load_network,
    loss,
    network_to_dict,
    payoff_u1,
    payoff_u2,
    pure_attack,
    pure_flow,
    rational,
    resolve_edge_pair,
    transport_cost,
    validate_network,
    zero_sum_payoff,
)
from .verify import (
    Lemma4Report,
    MinimaxChecks,
    SupportChecks,
    VerificationReport,
    ZeroSumCheck,
    best_response_attack,
    best_response_flow,
    check_lemma4,
    check_support_conditions,
    expected_quantities,
    minimax_checks,
    report_to_dict,
    verify_equilibrium,
    zero_sum_value_check,
)

__all__ = [name for name in dir() if not name.startswith("_")]
