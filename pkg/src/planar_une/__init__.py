"""Exact uniform Nash equilibria of bimatrix games via out-regular subgraphs.

Includes the 3-SAT reduction to weighted bipartite digraphs and the
crossing-gadget construction that makes the reduction planar.
"""

from .core_game import (
    BimatrixGame,
    MixedStrategy,
    SupportPair,
    WeightClassProfile,
    check_uniform_equilibrium,
    enumerate_uniform_equilibria,
    expected_payoffs,
    format_game,
    is_nash_equilibrium,
    parse_game,
    uniform_strategy,
    weight_class_profile,
)
from .errors import BudgetExhausted, DegenerateGame, InvalidArgument, ParseError, WitnessError
from .graph_model import (
    OutRegularWitness,
    WeightedBipartiteDigraph,
    check_out_regular,
    enumerate_undominated_out_regular,
    find_undominated_out_regular,
    format_graph,
    game_to_graph,
    graph_to_game,
    is_planar,
    is_strongly_connected,
    is_undominated_out_regular,
    parse_graph,
)
from .planarizer import PlanarReduction, insert_gadgets, lift_witness, planarize, project_witness
from .sat_reduction import (
    Assignment,
    CnfFormula,
    ReductionGraph,
    assignment_to_witness,
    brute_force_sat,
    build_reduction_graph,
    normalize,
    parse_dimacs,
    witness_to_assignment,
)

__version__ = "0.1.0"
