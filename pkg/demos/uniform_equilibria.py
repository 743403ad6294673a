"""Uniform equilibria of a small game, seen from both sides.

Builds a 3x3 win-lose game, lists every support pair whose uniform strategies
form a Nash equilibrium, and shows that the same vertex sets come out of the
out-regular subgraph search on the game's digraph.
"""

from planar_une import (
    BimatrixGame,
    enumerate_undominated_out_regular,
    enumerate_uniform_equilibria,
    find_undominated_out_regular,
    game_to_graph,
)
from planar_une.core_game import support_pair_mask

game = BimatrixGame.from_matrices(
    [[1, 0, 0], [0, 1, 0], [1, 1, 0]],
    [[0, 1, 0], [1, 0, 0], [0, 0, 1]],
)
graph = game_to_graph(game)

print("support pairs with a uniform equilibrium:")
for pair in enumerate_uniform_equilibria(game):
    rows, cols = pair.ordered(game)
    print(f"  rows {rows}  cols {cols}  mask {support_pair_mask(game, pair):#08b}")

print("undominated out-regular vertex sets:")
for subset in enumerate_undominated_out_regular(graph):
    print(f"  {sorted(subset, key=graph.index)}  mask {graph.mask(subset):#08b}")

best = find_undominated_out_regular(graph)
print(f"pruned search returns the least one: {sorted(best.vertices, key=graph.index)}"
      f" with (alpha, beta) = ({best.alpha}, {best.beta})")
