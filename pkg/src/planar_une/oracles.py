"""Brute-force oracles kept independent of the code paths they check."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .graph_model import WeightedBipartiteDigraph

Point = tuple[Fraction, Fraction]


def naive_witness_masks(graph: WeightedBipartiteDigraph, chunk_bits: int = 16) -> list[int]:
    """Bitmasks of every undominated out-regular set, by testing all subsets.

    No pruning at all: each subset meeting both parts is scored with one
    integer matrix product (weights are scaled to integers, so the test is
    exact). Feasible up to roughly 24 vertices.
    """
    verts = graph.vertices
    n, nr = len(verts), len(graph.row_part)
    if n > 30:
        raise ValueError(f"{n} vertices is too many for the naive oracle")
    scale = math.lcm(*(w.denominator for w in graph.arcs.values())) if graph.arcs else 1
    weights = np.zeros((n, n), dtype=np.int64)
    for (s, d), w in graph.arcs.items():
        weights[graph.index(s), graph.index(d)] = int(w * scale)
    shifts = np.arange(n, dtype=np.int64)
    found: list[int] = []
    total = 1 << n
    step = 1 << min(chunk_bits, n)
    for start in range(0, total, step):
        masks = np.arange(start, min(start + step, total), dtype=np.int64)
        bits = (masks[:, None] >> shifts) & 1
        outw = bits @ weights.T
        member = bits.astype(bool)
        ok = np.ones(len(masks), dtype=bool)
        for part in (slice(0, nr), slice(nr, n)):
            mem, w = member[:, part], outw[:, part]
            ok &= mem.any(axis=1)
            top = np.where(mem, w, -1).max(axis=1)
            bottom = np.where(mem, w, np.iinfo(np.int64).max).min(axis=1)
            ok &= top == bottom
            ok &= ~(np.where(mem, -1, w) > top[:, None]).any(axis=1)
        found.extend(int(m) for m in masks[ok])
    return found


def _orient(p: Point, q: Point, r: Point) -> int:
    val = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (val > 0) - (val < 0)


def _on_segment(p: Point, q: Point, r: Point) -> bool:
    return min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])


def segment_relation(a: tuple[Point, Point], b: tuple[Point, Point]) -> str:
    """Classify two closed segments: ``"disjoint"``, ``"proper"`` (single point interior to both) or ``"touch"``."""
    p1, p2 = a
    q1, q2 = b
    o1, o2 = _orient(p1, p2, q1), _orient(p1, p2, q2)
    o3, o4 = _orient(q1, q2, p1), _orient(q1, q2, p2)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return "proper"
    if (o1 == 0 and _on_segment(p1, p2, q1)) or (o2 == 0 and _on_segment(p1, p2, q2)) \
            or (o3 == 0 and _on_segment(q1, q2, p1)) or (o4 == 0 and _on_segment(q1, q2, p2)):
        return "touch"
    return "disjoint"


def count_polyline_crossings(polylines: Sequence[Sequence[Point]]) -> tuple[int, int]:
    """Proper crossings and improper contacts among all pairs of distinct polylines.

    Two arcs into the same vertex may meet at their common final point and
    nowhere else; any other contact (touching, overlapping, ending on another
    arc) counts as improper.
    """
    proper = improper = 0
    segs = [list(zip(pl, pl[1:])) for pl in polylines]
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            common_end = polylines[i][-1] if polylines[i][-1] == polylines[j][-1] else None
            for sa in segs[i]:
                for sb in segs[j]:
                    rel = segment_relation(sa, sb)
                    if rel == "proper":
                        proper += 1
                    elif rel == "touch" and not _meet_only_at(sa, sb, common_end):
                        improper += 1
    return proper, improper


def _meet_only_at(a, b, point) -> bool:
    """Segments ``a`` and ``b`` both end at ``point`` and share nothing else."""
    if point is None or point not in a or point not in b:
        return False
    oa = a[0] if a[1] == point else a[1]
    ob = b[0] if b[1] == point else b[1]
    # collinear and pointing the same way means they overlap beyond the point
    return _orient(point, oa, ob) != 0 or (oa[0] - point[0]) * (ob[0] - point[0]) + (oa[1] - point[1]) * (ob[1] - point[1]) < 0
