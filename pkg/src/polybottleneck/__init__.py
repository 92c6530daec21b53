"""Polynomial bottleneck congestion games: construction, equilibria, price of
anarchy, equilibrium-preserving game transformation, and bound verification."""

from .equilibria import (
    EquilibriumReport,
    PoaReport,
    best_response,
    best_response_dynamics,
    enumerate_nash,
    enumerate_states,
    is_nash,
    optimal_profile,
    price_of_anarchy,
    rosenthal_potential,
)
from .expansion import (
    ExpansionDag,
    ResourceGraph,
    build_expansion_dag,
    build_resource_graph,
    build_resource_graph_from_game,
    check_expansion,
    descendant_count_check,
    poa_within_general_bound,
    upper_bound_general,
    upper_bound_singleton,
)
from .game_core import (
    Game,
    Profile,
    bottleneck,
    congestion_of,
    delay,
    game_from_dict,
    game_to_dict,
    load_game,
    player_cost,
    profile_length,
    save_game,
)
from .lower_bound import LowerBoundInstance, LowerBoundReport
from .transform import (
    DominationReport,
    PartitionPair,
    PhaseState,
    TwoStrategyGame,
    TwoStrategyPlayer,
    clean_game,
    greedy_cover_pairs,
    init_two_strategy,
    partition_pairs,
    split_player,
    transform_to_singletons,
    verify_domination,
)

__all__ = [
    "EquilibriumReport",
    "PoaReport",
    "best_response",
    "best_response_dynamics",
    "enumerate_nash",
    "enumerate_states",
    "is_nash",
    "optimal_profile",
    "price_of_anarchy",
    "rosenthal_potential",
    "ExpansionDag",
    "ResourceGraph",
    "build_expansion_dag",
    "build_resource_graph",
    "build_resource_graph_from_game",
    "check_expansion",
    "descendant_count_check",
    "poa_within_general_bound",
    "upper_bound_general",
    "upper_bound_singleton",
    "Game",
    "Profile",
    "bottleneck",
    "congestion_of",
    "delay",
    "game_from_dict",
    "game_to_dict",
    "load_game",
    "player_cost",
    "profile_length",
    "save_game",
    "LowerBoundInstance",
    "LowerBoundReport",
    "DominationReport",
    "PartitionPair",
    "PhaseState",
    "TwoStrategyGame",
    "TwoStrategyPlayer",
    "clean_game",
    "greedy_cover_pairs",
    "init_two_strategy",
    "partition_pairs",
    "split_player",
    "transform_to_singletons",
    "verify_domination",
]

__version__ = "0.1.0"
