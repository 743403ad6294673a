"""From a 3-CNF formula to a two-payoff-level game, and back.

Compiles the four-variable, three-clause example, turns each satisfying
assignment into a uniform equilibrium of the compiled game, and reads the
assignment back off the equilibrium support.
"""

from planar_une import (
    CnfFormula,
    assignment_to_witness,
    build_reduction_graph,
    check_out_regular,
    graph_to_game,
    is_undominated_out_regular,
    normalize,
    witness_to_assignment,
)
from planar_une.sat_reduction import iter_satisfying

formula, report = normalize(CnfFormula.from_ints(4, [[1, -2, 3], [2, -3, 4], [-1, 3, -4]]))
print(report.to_text().strip())

rg = build_reduction_graph(formula)
g = rg.graph
print(f"{len(g.vertices)} vertices, {len(g.arcs)} arcs, heavy arcs weigh {rg.heavy_weight}")
game = graph_to_game(g)
print(f"compiled game is {game.shape[0]} x {game.shape[1]}")

for xi in iter_satisfying(formula):
    s = assignment_to_witness(rg, xi)
    alpha, beta = check_out_regular(g, s)
    assert is_undominated_out_regular(g, s)
    back = witness_to_assignment(rg, s)
    bits = "".join("1" if b else "0" for b in xi)
    print(f"  {bits}: |S|={len(s)} (alpha, beta)=({alpha}, {beta}) reads back as "
          f"{''.join('1' if b else '0' for b in back)}")
