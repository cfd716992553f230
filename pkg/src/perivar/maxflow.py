"""Exact integer max-flow/min-cut and the graph-cut energy minimizer.

The solver is Dinic's algorithm on arbitrary-precision integers: no
capacity is ever rounded, so thresholds like theta = 1 or w = 2 stay
exact.  The canonical minimum cut is the set of nodes reachable from the
source in the residual graph (the unique inclusion-minimal one), which
makes every result deterministic and reproducible.

``minimize`` reduces a submodular ``BinaryEnergy`` to a min cut after
clearing denominators; ``parametric_sweep`` traces the breakpoints of
``min_A E(A) + lam * |A|`` and the nested chain of minimizers.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .energy import (
    BinaryEnergy,
    SubmodularityReport,
    add_volume_term,
    check_submodular,
    evaluate,
)
from .grid import CellSet


class NonSubmodularError(ValueError):
    """Raised when an energy fails the per-face submodularity test."""

    def __init__(self, report: SubmodularityReport):
        self.report = report
        faces = [v.face for v in report.violations]
        super().__init__(f"energy is not submodular; violating faces: {faces}")


class MalformedNetworkError(ValueError):
    pass


class FlowNetwork:
    """Directed network with paired reverse arcs and big-int capacities.

    Node 0 is the source, node 1 the sink.  Arcs are stored flat; arc i
    and arc i^1 are reverses of each other.
    """

    def __init__(self):
        self.n_nodes = 2
        self.adj: List[List[int]] = [[], []]
        self.to: List[int] = []
        self.cap: List[int] = []

    @property
    def source(self) -> int:
        return 0

    @property
    def sink(self) -> int:
        return 1

    def add_node(self) -> int:
        self.adj.append([])
        self.n_nodes += 1
        return self.n_nodes - 1

    def add_arc(self, u: int, v: int, cap: int, rev_cap: int = 0) -> int:
        """Add arc u->v with capacity cap (plus a reverse arc); returns its index."""
        if u == v:
            raise MalformedNetworkError("self-loops are not allowed")
        if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
            raise MalformedNetworkError(f"arc ({u}, {v}) references unknown nodes")
        if cap < 0 or rev_cap < 0:
            raise MalformedNetworkError("capacities must be nonnegative")
        i = len(self.to)
        self.to.extend((v, u))
        self.cap.extend((cap, rev_cap))
        self.adj[u].append(i)
        self.adj[v].append(i + 1)
        return i

    def hard_capacity(self) -> int:
        """Sentinel capacity no finite cut ever uses: 1 + sum of all capacities."""
        return 1 + sum(self.cap)

    def snapshot(self) -> list:
        return list(self.cap)

    def restore(self, caps: list) -> None:
        # restoring to fewer arcs than currently present is a caller bug
        if len(caps) != len(self.cap):
            raise MalformedNetworkError("snapshot does not match network shape")
        self.cap = list(caps)


@dataclass(frozen=True)
class CutResult:
    """Max-flow value, canonical (inclusion-minimal) source side, arc flows."""

    value: int
    source_side: frozenset
    flows: tuple  # net flow per arc index, aligned with the network's arcs

    def flow_on(self, arc_index: int) -> int:
        return self.flows[arc_index]


def _bfs_levels(net: FlowNetwork, s: int, t: int) -> Optional[list]:
    level = [-1] * net.n_nodes
    level[s] = 0
    q = deque([s])
    while q:
        u = q.popleft()
        for i in net.adj[u]:
            v = net.to[i]
            if net.cap[i] > 0 and level[v] < 0:
                level[v] = level[u] + 1
                q.append(v)
    return level if level[t] >= 0 else None


def _dfs_push(net: FlowNetwork, level: list, it: list, u: int, t: int, limit: int) -> int:
    if u == t:
        return limit
    pushed_total = 0
    while it[u] < len(net.adj[u]):
        i = net.adj[u][it[u]]
        v = net.to[i]
        if net.cap[i] > 0 and level[v] == level[u] + 1:
            pushed = _dfs_push(net, level, it, v, t, min(limit, net.cap[i]))
            if pushed:
                net.cap[i] -= pushed
                net.cap[i ^ 1] += pushed
                pushed_total += pushed
                limit -= pushed
                if limit == 0:
                    return pushed_total
        it[u] += 1
    level[u] = -1
    return pushed_total


def augment(net: FlowNetwork) -> int:
    """Push additional flow until the residual graph has no s-t path.

    Safe to call repeatedly after adding arcs (incremental resolves).
    Returns the amount of flow added by this call.
    """
    s, t = net.source, net.sink
    inf = 1 + sum(net.cap)
    added = 0
    while True:
        level = _bfs_levels(net, s, t)
        if level is None:
            return added
        it = [0] * net.n_nodes
        added += _dfs_push(net, level, it, s, t, inf)


def max_flow(net: FlowNetwork, initial_caps: Optional[list] = None) -> CutResult:
    """Maximum flow with the canonical minimal min cut.

    ``initial_caps`` is the pristine capacity vector when the network has
    already been (partially) solved; by default the current capacities are
    taken as pristine.
    """
    base = list(net.cap) if initial_caps is None else list(initial_caps)
    augment(net)
    reach = _residual_reachable(net)
    flows = tuple(base[i] - net.cap[i] for i in range(len(net.cap)))
    # net outflow of the source: sum of net flows on its outgoing arc pairs
    value = 0
    for i in net.adj[net.source]:
        if i % 2 == 0:
            value += flows[i]
        else:
            value -= flows[i ^ 1]
    return CutResult(value=value, source_side=frozenset(reach), flows=flows)


def _residual_reachable(net: FlowNetwork) -> set:
    seen = {net.source}
    q = deque([net.source])
    while q:
        u = q.popleft()
        for i in net.adj[u]:
            v = net.to[i]
            if net.cap[i] > 0 and v not in seen:
                seen.add(v)
                q.append(v)
    return seen


def cut_capacity(net: FlowNetwork, source_side: frozenset, caps: list) -> int:
    """Capacity of the given cut under the pristine capacities ``caps``."""
    total = 0
    for u in source_side:
        for i in net.adj[u]:
            if i % 2 == 0 and net.to[i] not in source_side:
                total += caps[i]
    return total


def _common_denominator(energy: BinaryEnergy) -> int:
    den = 1
    for e0, e1 in energy.unary.values():
        den = math.lcm(den, e0.denominator, e1.denominator)
    for term in energy.face_terms.values():
        for row in term.table:
            for v in row:
                den = math.lcm(den, v.denominator)
    return den


def minimize(energy: BinaryEnergy) -> Tuple[CellSet, Fraction]:
    """Global minimizer of a submodular energy via graph cut.

    Returns the canonical inclusion-minimal minimizer (as a full CellSet,
    frozen cells included) together with its exact value.
    """
    report = check_submodular(energy)
    if not report.ok:
        raise NonSubmodularError(report)

    free = energy.free_cells
    if not free:
        sol = energy.full_set(frozenset())
        return sol, evaluate(energy, sol)

    den = _common_denominator(energy)
    node_of = {}
    net = FlowNetwork()
    for c in free:
        node_of[c] = net.add_node()

    # net unary gain of labeling 1, accumulated from unaries and table
    # decompositions: theta = e00 + (e10-e00) x_lo + (e11-e10) x_hi
    #                        + (e01+e10-e00-e11) (1-x_lo) x_hi
    gain = {c: (energy.unary[c][1] - energy.unary[c][0]) * den for c in free}
    pair_arcs = []
    for face in sorted(energy.face_terms):
        term = energy.face_terms[face]
        (e00, e01), (e10, e11) = term.table
        gain[term.lower] += (e10 - e00) * den
        gain[term.upper] += (e11 - e10) * den
        coeff = (e01 + e10 - e00 - e11) * den
        if coeff:
            pair_arcs.append((node_of[term.upper], node_of[term.lower], int(coeff)))

    for c in free:
        g = int(gain[c])
        if g > 0:
            net.add_arc(node_of[c], net.sink, g)
        elif g < 0:
            net.add_arc(net.source, node_of[c], -g)
    for u, v, cap in pair_arcs:
        net.add_arc(u, v, cap)

    result = max_flow(net)
    members = frozenset(c for c in free if node_of[c] in result.source_side)
    sol = energy.full_set(members)
    return sol, evaluate(energy, sol)


@dataclass(frozen=True)
class SweepPiece:
    """One linear piece of lam -> min_A [E(A) + lam |A|]."""

    lam_lo: Fraction
    lam_hi: Fraction
    minimizer: CellSet
    value: Fraction  # E(minimizer), without the volume term
    volume: int


def parametric_sweep(energy: BinaryEnergy, lam_lo, lam_hi) -> List[SweepPiece]:
    """All breakpoints of the value function over [lam_lo, lam_hi].

    The modular volume term preserves submodularity, and the canonical
    minimizers are nested: volumes shrink as lam grows (asserted).
    """
    lam_lo = Fraction(lam_lo)
    lam_hi = Fraction(lam_hi)
    if lam_lo > lam_hi:
        raise ValueError("empty lambda range")

    def solve(lam: Fraction):
        sol, _ = minimize(add_volume_term(energy, lam))
        return sol, evaluate(energy, sol)

    lo_sol, lo_val = solve(lam_lo)
    hi_sol, hi_val = solve(lam_hi)

    pieces: List[SweepPiece] = []

    def emit(lam_a, lam_b, sol, val):
        pieces.append(
            SweepPiece(lam_a, lam_b, sol, val, sol.volume)
        )

    def recurse(lam_a, sol_a, val_a, lam_b, sol_b, val_b):
        if sol_a.volume == sol_b.volume:
            # same line on both ends: one piece across the interval
            emit(lam_a, lam_b, sol_b, val_b)
            return
        lam_star = (val_b - val_a) / Fraction(sol_a.volume - sol_b.volume)
        sol_s, val_s = solve(lam_star)
        line_here = val_a + lam_star * sol_a.volume
        if val_s + lam_star * sol_s.volume < line_here:
            recurse(lam_a, sol_a, val_a, lam_star, sol_s, val_s)
            recurse(lam_star, sol_s, val_s, lam_b, sol_b, val_b)
        else:
            emit(lam_a, lam_star, sol_a, val_a)
            emit(lam_star, lam_b, sol_b, val_b)

    if lam_lo == lam_hi:
        emit(lam_lo, lam_hi, lo_sol, lo_val)
    else:
        recurse(lam_lo, lo_sol, lo_val, lam_hi, hi_sol, hi_val)

    # merge consecutive pieces that share the same minimizer
    merged: List[SweepPiece] = []
    for p in pieces:
        if merged and merged[-1].minimizer.cells == p.minimizer.cells:
            last = merged.pop()
            p = SweepPiece(last.lam_lo, p.lam_hi, p.minimizer, p.value, p.volume)
        merged.append(p)

    for a, b in zip(merged, merged[1:]):
        if not b.minimizer.issubset(a.minimizer):
            raise AssertionError("parametric minimizers failed to nest")
    return merged
