"""Grid routing of the clause-to-literal arcs and crossing removal.

Layout: ``u<j>_<k>`` sits at ``(0, 3(j-1)+k)`` on the left edge. The literal
boxes ``x1, nx1, x2, nx2, ...`` sit left to right on the bottom row, box ``b``
owning connection points ``b*m + 1 .. b*m + m``. The arc ``u<j>_<k> -> lit``
runs right along its own row, then down onto connection point ``j`` of
``lit``. When one clause repeats a literal the later copies land a quarter
unit to the right of the earlier one, so no two arcs ever share a segment.

Every other arc of the compiled graph lives outside the grid (the clause
trees hang off the left edge, the variable gadgets below the bottom edge,
both meeting at ``a``) and is crossing-free there, so only routed arcs can
cross. Each crossing is replaced by a clause-variable gadget: a hub ``eps``
fed by an entry chain for each arc (``alpha`` for the vertical one, ``beta``
for the horizontal one) and fanning out through ``m+n`` two-vertex branches
into the exits ``gamma3`` (continuing the vertical arc) and ``delta3``
(continuing the horizontal arc).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Collection, Literal

from .core_game import format_fraction
from .errors import InvalidArgument, WitnessError
from .graph_model import WeightedBipartiteDigraph, diagnose, is_undominated_out_regular
from .sat_reduction import CnfFormula, ReductionGraph, build_reduction_graph, literal_name

Point = tuple[Fraction, Fraction]
Orientation = Literal["vertical", "horizontal"]


class EmbeddingError(RuntimeError):
    """Routed arcs overlap instead of crossing transversally."""


@dataclass(frozen=True)
class RoutedArc:
    source: str
    target: str
    clause: int
    position: int
    start: Point
    bend: Point
    end: Point

    @property
    def row(self) -> Fraction:
        return self.start[1]

    @property
    def column(self) -> Fraction:
        return self.bend[0]

    @property
    def polyline(self) -> tuple[Point, Point, Point]:
        return self.start, self.bend, self.end


@dataclass(frozen=True)
class GridEmbedding:
    grid_extent: tuple[int, int]
    placements: dict[str, Point]
    connection_points: dict[str, tuple[Point, ...]]
    routed_arcs: tuple[RoutedArc, ...]


@dataclass(frozen=True)
class Crossing:
    index: int
    vertical: RoutedArc
    horizontal: RoutedArc
    point: Point


GADGET_ROW_ROLES = ("alpha1", "beta1", "gamma3", "delta3")
GADGET_COL_ROLES = ("eps", "alpha2", "beta2")


@dataclass(frozen=True)
class GadgetInstance:
    crossing: Crossing
    width: int

    @property
    def prefix(self) -> str:
        return f"g{self.crossing.index}_"

    def v(self, role: str, k: int | None = None) -> str:
        return f"{self.prefix}{role}" if k is None else f"{self.prefix}{role}_{k}"

    @property
    def row_vertices(self) -> list[str]:
        out = [self.v("alpha1"), self.v("beta1")]
        out += [self.v("gamma1", k) for k in range(1, self.width + 1)]
        out.append(self.v("gamma3"))
        out += [self.v("delta1", k) for k in range(1, self.width + 1)]
        out.append(self.v("delta3"))
        return out

    @property
    def col_vertices(self) -> list[str]:
        out = [self.v("eps"), self.v("alpha2"), self.v("beta2")]
        out += [self.v("gamma2", k) for k in range(1, self.width + 1)]
        out += [self.v("delta2", k) for k in range(1, self.width + 1)]
        return out

    @property
    def vertices(self) -> list[str]:
        return self.row_vertices + self.col_vertices

    def internal_arcs(self) -> dict[tuple[str, str], Fraction]:
        one, heavy = Fraction(1), Fraction(self.width)
        v = self.v
        arcs = {
            (v("alpha2"), v("alpha1")): heavy,
            (v("alpha1"), v("eps")): one,
            (v("beta2"), v("beta1")): heavy,
            (v("beta1"), v("eps")): one,
            (v("beta2"), v("gamma1", 1)): one,
            (v("alpha2"), v("delta1", 1)): one,
        }
        for k in range(1, self.width + 1):
            arcs[(v("eps"), v("gamma1", k))] = one
            arcs[(v("gamma1", k), v("gamma2", k))] = one
            arcs[(v("gamma2", k), v("gamma3"))] = heavy
            arcs[(v("eps"), v("delta1", k))] = one
            arcs[(v("delta1", k), v("delta2", k))] = one
            arcs[(v("delta2", k), v("delta3"))] = heavy
        return arcs

    def entry(self, orientation: Orientation) -> str:
        return self.v("alpha2") if orientation == "vertical" else self.v("beta2")

    def exit(self, orientation: Orientation) -> str:
        return self.v("gamma3") if orientation == "vertical" else self.v("delta3")


@dataclass(frozen=True)
class PlanarReduction:
    """``H_phi`` together with what is needed to move witnesses between it and ``G_phi``."""

    base: ReductionGraph
    graph: WeightedBipartiteDigraph
    embedding: GridEmbedding
    crossings: tuple[Crossing, ...]
    gadgets: tuple[GadgetInstance, ...]
    paths: dict[str, tuple[tuple[int, Orientation], ...]]

    @property
    def width(self) -> int:
        return self.base.heavy_weight


# -- routing -----------------------------------------------------------------


def route_arcs(rg: ReductionGraph) -> GridEmbedding:
    n, m = rg.n, rg.m
    placements: dict[str, Point] = {}
    connection_points: dict[str, tuple[Point, ...]] = {}
    for i in range(1, n + 1):
        for offset, name in enumerate((f"x{i}", f"nx{i}")):
            box = 2 * (i - 1) + offset
            points = tuple((Fraction(box * m + j), Fraction(0)) for j in range(1, m + 1))
            connection_points[name] = points
            placements[name] = points[0]
    routed = []
    for j, clause in enumerate(rg.formula.clauses, 1):
        for k, lit in enumerate(clause, 1):
            source, target = f"u{j}_{k}", literal_name(lit)
            row = Fraction(3 * (j - 1) + k)
            lane = clause[: k - 1].count(lit)
            x = connection_points[target][j - 1][0] + Fraction(lane, 4)
            placements[source] = (Fraction(0), row)
            routed.append(RoutedArc(source, target, j, k, (Fraction(0), row), (x, row), (x, Fraction(0))))
    return GridEmbedding((3 * m, 2 * m * n), placements, connection_points, tuple(routed))


def detect_crossings(embedding: GridEmbedding) -> list[Crossing]:
    """Transversal crossings between one arc's vertical leg and another's horizontal leg.

    Ordered by vertical arc (in routing order), then top to bottom along it.
    """
    arcs = embedding.routed_arcs
    columns: dict[Fraction, RoutedArc] = {}
    rows: dict[Fraction, RoutedArc] = {}
    for arc in arcs:
        if arc.column in columns:
            raise EmbeddingError(f"{arc.source} and {columns[arc.column].source} share column {arc.column}")
        if arc.row in rows:
            raise EmbeddingError(f"{arc.source} and {rows[arc.row].source} share row {arc.row}")
        columns[arc.column] = rows[arc.row] = arc
    found = []
    for vert in arcs:
        hits = [hor for hor in arcs if hor is not vert and 0 < hor.row < vert.row and 0 < vert.column < hor.column]
        hits.sort(key=lambda hor: -hor.row)
        found.extend((vert, hor) for hor in hits)
    return [Crossing(i, vert, hor, (vert.column, hor.row)) for i, (vert, hor) in enumerate(found, 1)]


# -- gadget insertion --------------------------------------------------------


def insert_gadgets(
    rg: ReductionGraph,
    embedding: GridEmbedding | None = None,
    crossings: list[Crossing] | None = None,
) -> PlanarReduction:
    """Replace every crossing by a clause-variable gadget.

    Along each routed arc the crossings are met in travel order (rightward
    along the horizontal leg, then downward along the vertical one); the arc
    is cut into a chain through the successive gadgets, each gadget's exit
    standing in for the arc's source at the next one.
    """
    if embedding is None:
        embedding = route_arcs(rg)
    if crossings is None:
        crossings = detect_crossings(embedding)
    width = rg.heavy_weight
    by_source: dict[str, list[tuple[Fraction, int, Orientation]]] = {a.source: [] for a in embedding.routed_arcs}
    for c in crossings:
        v, h = c.vertical, c.horizontal
        if c.point != (v.column, h.row) or not (0 < h.row < v.row and 0 < v.column < h.column):
            raise RuntimeError(f"crossing {c.index} is inconsistent with the embedding")
        # travel distance from the source: horizontal leg first, then down the vertical one
        by_source[v.source].append((v.column + (v.row - h.row), c.index, "vertical"))
        by_source[h.source].append((v.column, c.index, "horizontal"))
    gadgets = tuple(GadgetInstance(c, width) for c in crossings)
    arcs = dict(rg.graph.arcs)
    paths = {}
    one = Fraction(1)
    for arc in embedding.routed_arcs:
        stops = sorted(by_source[arc.source])
        paths[arc.source] = tuple((idx, orient) for _, idx, orient in stops)
        if not stops:
            continue
        del arcs[(arc.source, arc.target)]
        tail = arc.source
        for _, idx, orient in stops:
            gadget = gadgets[idx - 1]
            arcs[(tail, gadget.entry(orient))] = one
            tail = gadget.exit(orient)
        arcs[(tail, arc.target)] = one
    rows = list(rg.graph.row_part)
    cols = list(rg.graph.col_part)
    for gadget in gadgets:
        arcs.update(gadget.internal_arcs())
        rows += gadget.row_vertices
        cols += gadget.col_vertices
    graph = WeightedBipartiteDigraph(tuple(rows), tuple(cols), arcs)
    return PlanarReduction(rg, graph, embedding, tuple(crossings), gadgets, paths)


def planarize(formula: CnfFormula) -> PlanarReduction:
    return insert_gadgets(build_reduction_graph(formula))


# -- witness translation -----------------------------------------------------


def lift_witness(subset: Collection[str], pr: PlanarReduction, verify: bool = True) -> frozenset[str]:
    """Extend an undominated out-regular set of ``G_phi`` to one of ``H_phi``.

    Each selected routed arc pulls in the gadget vertices on its route; then
    every selected hub ``eps`` is topped up, pair by pair from the highest
    branch index downward, until it sends ``m+n`` into the set.
    """
    _, problems = diagnose(pr.base.graph, subset)
    if problems:
        raise InvalidArgument("not an undominated out-regular set of G_phi: " + "; ".join(problems))
    members = set(subset)
    width = pr.width
    for arc in pr.embedding.routed_arcs:
        if arc.source not in members or arc.target not in members:
            continue
        for idx, orient in pr.paths[arc.source]:
            g = pr.gadgets[idx - 1]
            if orient == "horizontal":
                members |= {g.v("beta2"), g.v("beta1"), g.v("eps"),
                            g.v("delta1", width), g.v("delta2", width), g.v("delta3")}
            else:
                members |= {g.v("alpha2"), g.v("alpha1"), g.v("eps"),
                            g.v("gamma1", width), g.v("gamma2", width), g.v("gamma3")}
    graph = pr.graph
    for g in pr.gadgets:
        eps = g.v("eps")
        if eps not in members:
            continue

        def hub_weight():
            return sum(w for u, w in graph.out_arcs(eps) if u in members)

        kappa = 1
        while hub_weight() < width:
            if width - kappa < 1 or (g.v("beta1") not in members and g.v("alpha1") not in members):
                raise WitnessError(f"gadget {g.crossing.index}: hub cannot reach weight {width}")
            if g.v("beta1") in members:
                members |= {g.v("delta1", width - kappa), g.v("delta2", width - kappa)}
            if g.v("alpha1") in members and hub_weight() < width:
                members |= {g.v("gamma1", width - kappa), g.v("gamma2", width - kappa)}
            kappa += 1
    result = frozenset(members)
    if verify:
        _, problems = diagnose(graph, result)
        if problems:
            raise WitnessError("lifted set fails on H_phi: " + "; ".join(problems))
    return result


def project_witness(subset: Collection[str], pr: PlanarReduction, verify: bool = True) -> frozenset[str]:
    """Restrict an undominated out-regular set of ``H_phi`` to ``G_phi``.

    Keeps ``a`` and every clause vertex, the ``z`` vertices present in the
    set, ``x/y`` (and ``nx/ny``) pairs whose literal vertex is selected, and
    ``v/u`` pairs selected together.
    """
    _, problems = diagnose(pr.graph, subset)
    if problems:
        raise InvalidArgument("not an undominated out-regular set of H_phi: " + "; ".join(problems))
    t = set(subset)
    chosen = {"a"} | {f"Cl{j}" for j in range(1, pr.base.m + 1)}
    for i in range(1, pr.base.n + 1):
        chosen |= {z for z in (f"z{i}_1", f"z{i}_2") if z in t}
        if f"x{i}" in t:
            chosen |= {f"x{i}", f"y{i}"}
        if f"nx{i}" in t:
            chosen |= {f"nx{i}", f"ny{i}"}
    for j in range(1, pr.base.m + 1):
        for k in (1, 2, 3):
            if f"u{j}_{k}" in t and f"v{j}_{k}" in t:
                chosen |= {f"u{j}_{k}", f"v{j}_{k}"}
    result = frozenset(chosen)
    if verify and not is_undominated_out_regular(pr.base.graph, result):
        _, problems = diagnose(pr.base.graph, result)
        raise WitnessError("projected set fails on G_phi: " + "; ".join(problems))
    return result


# -- registry sidecar --------------------------------------------------------


def _pt(p: Point) -> list[str]:
    return [format_fraction(p[0]), format_fraction(p[1])]


def format_registry(pr: PlanarReduction) -> str:
    """JSON sidecar: the source formula, and per crossing its gadget vertices and the two arcs it splits."""
    data = {
        "n": pr.base.n,
        "m": pr.base.m,
        "clauses": pr.base.formula.as_ints(),
        "gadgets": [
            {
                "index": g.crossing.index,
                "point": _pt(g.crossing.point),
                "vertical": [g.crossing.vertical.source, g.crossing.vertical.target],
                "horizontal": [g.crossing.horizontal.source, g.crossing.horizontal.target],
                "vertices": g.vertices,
            }
            for g in pr.gadgets
        ],
        "paths": {src: [[idx, orient] for idx, orient in stops] for src, stops in pr.paths.items() if stops},
    }
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def load_registry(text: str, graph: WeightedBipartiteDigraph | None = None) -> PlanarReduction:
    """Rebuild the planar reduction described by a registry; optionally check it against a loaded ``H_phi``."""
    try:
        data = json.loads(text)
        formula = CnfFormula.from_ints(int(data["n"]), data["clauses"])
    except (ValueError, KeyError, TypeError) as exc:
        raise InvalidArgument(f"bad gadget registry: {exc}") from None
    pr = planarize(formula)
    listed = [(g["index"], g["vertical"], g["horizontal"]) for g in data.get("gadgets", [])]
    rebuilt = [(g.crossing.index, [g.crossing.vertical.source, g.crossing.vertical.target],
                [g.crossing.horizontal.source, g.crossing.horizontal.target]) for g in pr.gadgets]
    if listed != rebuilt:
        raise InvalidArgument("gadget registry does not match the formula it records")
    if graph is not None and graph != pr.graph:
        raise InvalidArgument("graph does not match the gadget registry")
    return pr


def format_role_map(rg: ReductionGraph) -> str:
    data = {"n": rg.n, "m": rg.m, "clauses": rg.formula.as_ints(), "roles": rg.roles}
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def load_role_map(text: str, graph: WeightedBipartiteDigraph | None = None) -> ReductionGraph:
    try:
        data = json.loads(text)
        formula = CnfFormula.from_ints(int(data["n"]), data["clauses"])
    except (ValueError, KeyError, TypeError) as exc:
        raise InvalidArgument(f"bad role map: {exc}") from None
    rg = build_reduction_graph(formula)
    if graph is not None and graph != rg.graph:
        raise InvalidArgument("graph does not match the role map")
    return rg
