"""Removing crossings from the compiled graph.

Routes the clause-to-literal arcs on a grid, counts the crossings, swaps each
for a gadget and checks that the result is planar. A witness for a satisfying
assignment is then lifted into the planar graph and projected back.
"""

from planar_une import (
    CnfFormula,
    assignment_to_witness,
    brute_force_sat,
    is_planar,
    is_undominated_out_regular,
    lift_witness,
    normalize,
    planarize,
    project_witness,
)

formula, _ = normalize(CnfFormula.from_ints(4, [[1, -2, 3], [2, -3, 4], [-1, 3, -4]]))
pr = planarize(formula)
g, h = pr.base.graph, pr.graph

print(f"grid {pr.embedding.grid_extent}, {len(pr.crossings)} crossings")
for c in pr.crossings[:3]:
    print(f"  #{c.index}: {c.vertical.source}->{c.vertical.target} crosses "
          f"{c.horizontal.source}->{c.horizontal.target} at {tuple(map(str, c.point))}")
print(f"G planar: {is_planar(g)}   H planar: {is_planar(h)}")
print(f"|V(G)| = {len(g.vertices)}, |V(H)| = {len(h.vertices)}, "
      f"each gadget adds {4 * pr.width + 7}")

xi = brute_force_sat(formula)
s = assignment_to_witness(pr.base, xi)
t = lift_witness(s, pr)
print(f"witness grows from {len(s)} to {len(t)} vertices; valid on H: {is_undominated_out_regular(h, t)}")
print(f"projection gives the original back: {project_witness(t, pr) == s}")
