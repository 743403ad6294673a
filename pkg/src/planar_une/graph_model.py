"""Edge-weighted bipartite digraphs and undominated out-regular subgraphs.

A bimatrix game and its digraph carry the same data: arc ``(r, c)`` holds the
row player's payoff ``M_R(r, c)`` and arc ``(c, r)`` holds ``M_C(r, c)``.
A support pair ``(S_R, S_C)`` is a uniform Nash equilibrium exactly when
``S = S_R | S_C`` induces an out-regular subgraph (all row members send the
same total weight ``alpha`` into ``S``, all column members the same ``beta``)
that no outside vertex dominates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Collection, Iterable, Mapping

import networkx as nx

from .core_game import BimatrixGame, format_fraction, to_fraction
from .errors import BudgetExhausted, DegenerateGame, InvalidArgument, ParseError

Arc = tuple[str, str]


@dataclass(frozen=True)
class WeightedBipartiteDigraph:
    row_part: tuple[str, ...]
    col_part: tuple[str, ...]
    arcs: Mapping[Arc, Fraction]
    _out: dict = field(init=False, repr=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "row_part", tuple(self.row_part))
        object.__setattr__(self, "col_part", tuple(self.col_part))
        object.__setattr__(self, "arcs", {k: to_fraction(w) for k, w in dict(self.arcs).items()})
        rows, cols = set(self.row_part), set(self.col_part)
        if len(rows) != len(self.row_part) or len(cols) != len(self.col_part):
            raise InvalidArgument("duplicate vertex id")
        if rows & cols:
            raise InvalidArgument(f"vertices in both parts: {sorted(rows & cols)}")
        out: dict[str, list[tuple[str, Fraction]]] = {v: [] for v in self.vertices}
        for (src, dst), w in self.arcs.items():
            if src not in out or dst not in out:
                raise InvalidArgument(f"arc ({src}, {dst}) uses an unknown vertex")
            if (src in rows) == (dst in rows):
                raise InvalidArgument(f"arc ({src}, {dst}) stays inside one part")
            if w <= 0:
                raise InvalidArgument(f"arc ({src}, {dst}) has non-positive weight {w}")
            out[src].append((dst, w))
        index = {v: i for i, v in enumerate(self.vertices)}
        for v in out:
            out[v].sort(key=lambda item: index[item[0]])
        object.__setattr__(self, "_out", out)
        object.__setattr__(self, "_index", index)

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.row_part + self.col_part

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise InvalidArgument(f"unknown vertex {v!r}") from None

    def is_row(self, v: str) -> bool:
        return self.index(v) < len(self.row_part)

    def out_arcs(self, v: str) -> list[tuple[str, Fraction]]:
        self.index(v)
        return self._out[v]

    def sorted_arcs(self) -> list[tuple[str, str, Fraction]]:
        idx = self._index
        return sorted(((s, d, w) for (s, d), w in self.arcs.items()), key=lambda a: (idx[a[0]], idx[a[1]]))

    def mask(self, subset: Iterable[str]) -> int:
        """Vertex-id bitmask: vertex ``i`` of :attr:`vertices` is bit ``i``."""
        m = 0
        for v in subset:
            m |= 1 << self.index(v)
        return m

    def from_mask(self, mask: int) -> frozenset[str]:
        return frozenset(v for i, v in enumerate(self.vertices) if mask >> i & 1)

    def induced(self, subset: Collection[str]) -> WeightedBipartiteDigraph:
        keep = set(subset)
        for v in keep:
            self.index(v)
        return WeightedBipartiteDigraph(
            tuple(v for v in self.row_part if v in keep),
            tuple(v for v in self.col_part if v in keep),
            {(s, d): w for (s, d), w in self.arcs.items() if s in keep and d in keep},
        )

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.row_part, part="row")
        g.add_nodes_from(self.col_part, part="col")
        for (s, d), w in self.arcs.items():
            g.add_edge(s, d, weight=w)
        return g


@dataclass(frozen=True)
class OutRegularWitness:
    subset_row: frozenset[str]
    subset_col: frozenset[str]
    alpha: Fraction
    beta: Fraction

    @property
    def vertices(self) -> frozenset[str]:
        return self.subset_row | self.subset_col


# -- the game <-> digraph correspondence -------------------------------------


def game_to_graph(game: BimatrixGame) -> WeightedBipartiteDigraph:
    mr, mc = game.payoff_row, game.payoff_col
    if not any(v > 0 for row in mr for v in row) or not any(v > 0 for row in mc for v in row):
        raise DegenerateGame("each payoff matrix needs at least one positive entry")
    arcs = {}
    for i, r in enumerate(game.row_strategies):
        for j, c in enumerate(game.col_strategies):
            if mr[i][j] > 0:
                arcs[(r, c)] = mr[i][j]
            if mc[i][j] > 0:
                arcs[(c, r)] = mc[i][j]
    return WeightedBipartiteDigraph(game.row_strategies, game.col_strategies, arcs)


def graph_to_game(graph: WeightedBipartiteDigraph) -> BimatrixGame:
    if not graph.row_part or not graph.col_part:
        raise InvalidArgument("both parts must be non-empty")
    zero = Fraction(0)
    arcs = graph.arcs
    mr = tuple(tuple(arcs.get((r, c), zero) for c in graph.col_part) for r in graph.row_part)
    mc = tuple(tuple(arcs.get((c, r), zero) for c in graph.col_part) for r in graph.row_part)
    return BimatrixGame(graph.row_part, graph.col_part, mr, mc)


# -- out-regularity and domination -------------------------------------------


def out_weight_into(graph: WeightedBipartiteDigraph, v: str, subset: Collection[str]) -> Fraction:
    members = subset if isinstance(subset, (set, frozenset)) else set(subset)
    return sum((w for u, w in graph.out_arcs(v) if u in members), Fraction(0))


def _split(graph: WeightedBipartiteDigraph, subset: Collection[str]) -> tuple[set[str], set[str]]:
    members = set(subset)
    for v in members:
        graph.index(v)
    s_row = {v for v in members if graph.is_row(v)}
    s_col = members - s_row
    if not s_row or not s_col:
        raise InvalidArgument("subset must meet both parts")
    return s_row, s_col


def check_out_regular(graph: WeightedBipartiteDigraph, subset: Collection[str]) -> tuple[Fraction, Fraction] | None:
    s_row, s_col = _split(graph, subset)
    members = s_row | s_col
    params = []
    for part in (s_row, s_col):
        weights = {out_weight_into(graph, v, members) for v in part}
        if len(weights) != 1:
            return None
        params.append(weights.pop())
    return params[0], params[1]


def find_dominators(graph: WeightedBipartiteDigraph, witness: OutRegularWitness) -> list[str]:
    members = set(witness.vertices)
    for v in members:
        graph.index(v)
    found = []
    for v in graph.vertices:
        if v in members:
            continue
        bound = witness.alpha if graph.is_row(v) else witness.beta
        if out_weight_into(graph, v, members) > bound:
            found.append(v)
    return sorted(found)


def witness_for(graph: WeightedBipartiteDigraph, subset: Collection[str]) -> OutRegularWitness | None:
    """The :class:`OutRegularWitness` for ``subset`` if it is out-regular, else ``None``."""
    params = check_out_regular(graph, subset)
    if params is None:
        return None
    s_row, s_col = _split(graph, subset)
    return OutRegularWitness(frozenset(s_row), frozenset(s_col), *params)


def is_undominated_out_regular(graph: WeightedBipartiteDigraph, subset: Collection[str]) -> bool:
    witness = witness_for(graph, subset)
    return witness is not None and not find_dominators(graph, witness)


def diagnose(graph: WeightedBipartiteDigraph, subset: Collection[str]) -> tuple[OutRegularWitness | None, list[str]]:
    """Run the checker and describe every violated condition.

    Returns the witness (when out-regular) and a list of human-readable
    problems; an empty list means ``subset`` is an undominated out-regular set.
    """
    s_row, s_col = _split(graph, subset)
    members = s_row | s_col
    problems = []
    for label, part in (("row", s_row), ("column", s_col)):
        weights: dict[Fraction, list[str]] = {}
        for v in sorted(part, key=graph.index):
            weights.setdefault(out_weight_into(graph, v, members), []).append(v)
        if len(weights) > 1:
            detail = "; ".join(f"{format_fraction(w)}: {' '.join(vs)}" for w, vs in sorted(weights.items()))
            problems.append(f"not out-regular on the {label} side ({detail})")
    if problems:
        return None, problems
    witness = witness_for(graph, subset)
    for v in find_dominators(graph, witness):
        bound = witness.alpha if graph.is_row(v) else witness.beta
        problems.append(
            f"dominated by {v} (out-weight {format_fraction(out_weight_into(graph, v, members))}"
            f" > {format_fraction(bound)})"
        )
    return witness, problems


def enumerate_undominated_out_regular(graph: WeightedBipartiteDigraph) -> list[frozenset[str]]:
    """Every undominated out-regular vertex set, by plain enumeration, in bitmask order.

    Exponential in ``|V|``; meant for cross-checking on small instances.
    """
    nr, nc = len(graph.row_part), len(graph.col_part)
    found = []
    for cmask in range(1, 1 << nc):
        for rmask in range(1, 1 << nr):
            subset = graph.from_mask(rmask | cmask << nr)
            if is_undominated_out_regular(graph, subset):
                found.append(subset)
    return found


# -- exact finder --------------------------------------------------------------

_UNK, _OUT, _IN = 0, 1, 2


def find_undominated_out_regular(
    graph: WeightedBipartiteDigraph, budget: int | None = None
) -> OutRegularWitness | None:
    """Exact search for the undominated out-regular set with the least bitmask.

    Branches on vertices from the highest index down, trying "out" before
    "in", so the first complete solution is the least one. Each node runs
    interval propagation on the shared parameters ``alpha``/``beta``; on a
    strongly connected graph every member must also send positive weight into
    the set, which is used as an extra bound. ``budget`` counts search nodes.
    """
    verts = graph.vertices
    n = len(verts)
    nr = len(graph.row_part)
    scale = math.lcm(*(w.denominator for w in graph.arcs.values())) if graph.arcs else 1
    out = [[(graph.index(u), int(w * scale)) for u, w in graph.out_arcs(v)] for v in verts]
    sides = (range(nr), range(nr, n))
    floor = 1 if is_strongly_connected(graph) else 0
    inf = float("inf")
    expansions = 0

    def propagate(st: list[int]) -> bool:
        changed = True
        while changed:
            changed = False
            lo = [0] * n
            hi = [0] * n
            for v in range(n):
                for u, w in out[v]:
                    if st[u] == _IN:
                        lo[v] += w
                        hi[v] += w
                    elif st[u] == _UNK:
                        hi[v] += w
            for side in sides:
                if all(st[v] == _OUT for v in side):
                    return False
                p_lo = max([floor] + [lo[v] for v in side if st[v] != _UNK])
                p_hi = min([hi[v] for v in side if st[v] == _IN], default=inf)
                if p_lo > p_hi:
                    return False
                for v in side:
                    if st[v] == _UNK:
                        if lo[v] > p_hi:
                            return False
                        if hi[v] < p_lo:
                            st[v] = _OUT
                            changed = True
                            continue
                    for u, w in out[v]:
                        if st[u] != _UNK:
                            continue
                        if lo[v] + w > p_hi:
                            st[u] = _OUT
                            changed = True
                        elif st[v] == _IN and hi[v] - w < p_lo:
                            st[u] = _IN
                            changed = True
        return True

    def dfs(st: list[int]) -> list[int] | None:
        nonlocal expansions
        expansions += 1
        if budget is not None and expansions > budget:
            raise BudgetExhausted(budget, "out-regular subgraph search")
        if not propagate(st):
            return None
        for v in range(n - 1, -1, -1):
            if st[v] == _UNK:
                break
        else:
            subset = [verts[i] for i in range(n) if st[i] == _IN]
            return st if is_undominated_out_regular(graph, subset) else None
        for value in (_OUT, _IN):
            child = st.copy()
            child[v] = value
            result = dfs(child)
            if result is not None:
                return result
        return None

    solution = dfs([_UNK] * n)
    if solution is None:
        return None
    return witness_for(graph, [verts[i] for i in range(n) if solution[i] == _IN])


# -- structural predicates ---------------------------------------------------


def is_strongly_connected(graph: WeightedBipartiteDigraph) -> bool:
    return nx.is_strongly_connected(graph.to_networkx())


def is_planar(graph: WeightedBipartiteDigraph) -> bool:
    """Planarity of the underlying simple undirected graph."""
    g = nx.Graph()
    g.add_nodes_from(graph.vertices)
    g.add_edges_from(graph.arcs)
    return nx.check_planarity(g)[0]


# -- text formats ------------------------------------------------------------


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def format_graph(graph: WeightedBipartiteDigraph) -> str:
    """Serialize as ``graph <|R|> <|C|>`` plus one ``src dst weight`` line per arc.

    ``rows``/``cols`` lines naming the parts are written only when the names
    differ from the default ``r1..``/``c1..``.
    """
    nr, nc = len(graph.row_part), len(graph.col_part)
    out = [f"graph {nr} {nc}"]
    default_rows = tuple(f"r{i + 1}" for i in range(nr))
    default_cols = tuple(f"c{j + 1}" for j in range(nc))
    if graph.row_part != default_rows or graph.col_part != default_cols:
        out.append("rows " + " ".join(graph.row_part))
        out.append("cols " + " ".join(graph.col_part))
    out.extend(f"{s} {d} {format_fraction(w)}" for s, d, w in graph.sorted_arcs())
    return "\n".join(out) + "\n"


def parse_graph(text: str) -> WeightedBipartiteDigraph:
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty graph file")
    lineno, header = lines[0]
    fields = header.split()
    if len(fields) != 3 or fields[0] != "graph":
        raise ParseError(f"expected 'graph <rows> <cols>' header, got {header!r}", lineno)
    try:
        nr, nc = int(fields[1]), int(fields[2])
    except ValueError:
        raise ParseError(f"non-integer part sizes in {header!r}", lineno) from None
    if nr < 1 or nc < 1:
        raise ParseError("part sizes must be positive", lineno)
    rows = [f"r{i + 1}" for i in range(nr)]
    cols = [f"c{j + 1}" for j in range(nc)]
    body = lines[1:]
    if body and body[0][1].split()[0] == "rows":
        if len(body) < 2 or body[1][1].split()[0] != "cols":
            raise ParseError("'rows' line must be followed by a 'cols' line", body[0][0])
        rows = body[0][1].split()[1:]
        cols = body[1][1].split()[1:]
        if len(rows) != nr or len(cols) != nc:
            raise ParseError("part declarations disagree with header sizes", body[0][0])
        body = body[2:]
    known = set(rows) | set(cols)
    if len(known) != nr + nc:
        raise ParseError("duplicate vertex name in part declarations", lineno)
    arcs: dict[Arc, Fraction] = {}
    for lineno, line in body:
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected 'src dst weight', got {line!r}", lineno)
        src, dst, raw = parts
        for v in (src, dst):
            if v not in known:
                raise ParseError(f"unknown vertex {v!r}", lineno)
        if (src, dst) in arcs:
            raise ParseError(f"duplicate arc {src} -> {dst}", lineno)
        try:
            w = Fraction(raw)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad weight {raw!r}", lineno) from None
        arcs[(src, dst)] = w
    try:
        return WeightedBipartiteDigraph(tuple(rows), tuple(cols), arcs)
    except InvalidArgument as exc:
        raise ParseError(str(exc)) from None


def format_witness(vertices: Iterable[str], graph: WeightedBipartiteDigraph | None = None, comment: str | None = None) -> str:
    vs = list(vertices)
    if graph is not None:
        vs.sort(key=graph.index)
    lines = [f"# {c}" for c in (comment.splitlines() if comment else [])]
    lines.extend(vs)
    return "\n".join(lines) + "\n"


def parse_witness(text: str) -> list[str]:
    vs = [line for _, line in _content_lines(text)]
    if not vs:
        raise ParseError("witness file lists no vertices")
    for lineno, line in _content_lines(text):
        if len(line.split()) != 1:
            raise ParseError(f"one vertex id per line expected, got {line!r}", lineno)
    return vs


def to_dot(
    graph: WeightedBipartiteDigraph,
    clusters: Mapping[str, Collection[str]] | None = None,
    name: str = "G",
) -> str:
    """DOT text: boxes for the row part, circles for the column part, weight labels on arcs."""

    def node(v: str, indent: str) -> str:
        shape = "box" if graph.is_row(v) else "circle"
        return f'{indent}"{v}" [shape={shape}];'

    lines = [f"digraph {name} {{"]
    clustered: set[str] = set()
    for label, members in (clusters or {}).items():
        lines.append(f'  subgraph "cluster_{label}" {{')
        lines.append(f'    label="{label}";')
        for v in sorted(members, key=graph.index):
            lines.append(node(v, "    "))
            clustered.add(v)
        lines.append("  }")
    for v in graph.vertices:
        if v not in clustered:
            lines.append(node(v, "  "))
    for s, d, w in graph.sorted_arcs():
        lines.append(f'  "{s}" -> "{d}" [label="{format_fraction(w)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
