"""Classical flow computations on the game network.

Everything downstream hangs off five quantities of the network alone:

    f_max   the maximum s-t flow value
    alpha   the cost of the cheapest s-t path (per unit routed)
    t_min   the least transport cost of any maximum flow
    x_star  a canonical min-cost maximum flow, decomposed into path flows
    min_cut a canonical minimum cut (and optionally all minimum cuts)

plus two structural properties:

    assumption1   t_min == alpha * f_max, i.e. a maximum flow can be routed
                  entirely along cheapest paths
    assumption2   some minimum cut {e_1..e_n} is "cost aligned": every
                  x_star path through e_k costs exactly alpha_k, the
                  cheapest cost of any s-t path through e_k

All arithmetic is exact (fractions.Fraction).  Ties are broken by the
canonical edge index (the order edges appear in the network), so repeated
runs return identical objects.
"""

from __future__ import annotations

import heapq
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import TooManyNodes, TooManyPaths
from .netmodel import FlowAction, Network, PathFlow, path_edge_indices

DEFAULT_NODE_LIMIT = 20
DEFAULT_PATH_LIMIT = 10000


def default_path_limit() -> int:
    """Path enumeration cap; override with env FLOWGAME_PATH_LIMIT."""
    raw = os.environ.get("FLOWGAME_PATH_LIMIT")
    if raw is None:
        return DEFAULT_PATH_LIMIT
    try:
        return int(raw)
    except ValueError:
        return DEFAULT_PATH_LIMIT


# ---------------------------------------------------------------- residuals

def _arcs_by_node(net: Network) -> dict[str, list[tuple[int, bool]]]:
    """Residual arcs per node as (edge_index, is_forward), canonical order.

    Forward arcs move with an edge, backward arcs undo flow on it.  Listing
    both per tail/head in increasing edge index makes every traversal
    deterministic.
    """
    arcs: dict[str, list[tuple[int, bool]]] = {v: [] for v in net.nodes}
    for i, e in enumerate(net.edges):
        arcs[e.tail].append((i, True))
        arcs[e.head].append((i, False))
    return arcs


def _residual(net: Network, flow: list[Fraction], i: int, forward: bool) -> Fraction:
    return net.edges[i].capacity - flow[i] if forward else flow[i]


def _arc_head(net: Network, i: int, forward: bool) -> str:
    return net.edges[i].head if forward else net.edges[i].tail


# ----------------------------------------------------------------- max flow

def max_flow(net: Network) -> tuple[Fraction, dict[int, Fraction]]:
    """Maximum s-t flow via shortest augmenting paths (BFS).

    Returns (value, edge flows).  The BFS scans residual arcs in canonical
    order, so the resulting flow is deterministic.
    """
    arcs = _arcs_by_node(net)
    flow = [Fraction(0)] * len(net.edges)
    value = Fraction(0)
    while True:
        parent: dict[str, tuple[str, int, bool]] = {}
        seen = {net.source}
        queue = [net.source]
        qi = 0
        while qi < len(queue) and net.sink not in seen:
            v = queue[qi]
            qi += 1
            for i, fwd in arcs[v]:
                if _residual(net, flow, i, fwd) <= 0:
                    continue
                w = _arc_head(net, i, fwd)
                if w in seen:
                    continue
                seen.add(w)
                parent[w] = (v, i, fwd)
                queue.append(w)
        if net.sink not in seen:
            break
        path: list[tuple[int, bool]] = []
        v = net.sink
        while v != net.source:
            u, i, fwd = parent[v]
            path.append((i, fwd))
            v = u
        bottleneck = min(_residual(net, flow, i, fwd) for i, fwd in path)
        for i, fwd in path:
            flow[i] += bottleneck if fwd else -bottleneck
        value += bottleneck
    return value, {i: flow[i] for i in range(len(net.edges))}


# ------------------------------------------------------------------ min cut

@dataclass(frozen=True)
class CutSet:
    """An s-t cut: the source-side node set and the edges leaving it."""
    source_side: tuple[str, ...]
    edges: tuple[int, ...]
    capacity: Fraction


def _cut_from_side(net: Network, side: set[str]) -> CutSet:
    edges = tuple(i for i, e in enumerate(net.edges)
                  if e.tail in side and e.head not in side)
    cap = sum((net.edges[i].capacity for i in edges), Fraction(0))
    ordered = tuple(v for v in net.nodes if v in side)
    return CutSet(source_side=ordered, edges=edges, capacity=cap)


def min_cut(net: Network) -> CutSet:
    """The canonical minimum cut: residual-reachable side of a max flow.

    This is the unique minimum cut with the smallest source side.
    """
    _, flows = max_flow(net)
    flow = [flows[i] for i in range(len(net.edges))]
    arcs = _arcs_by_node(net)
    side = {net.source}
    stack = [net.source]
    while stack:
        v = stack.pop()
        for i, fwd in arcs[v]:
            if _residual(net, flow, i, fwd) <= 0:
                continue
            w = _arc_head(net, i, fwd)
            if w not in side:
                side.add(w)
                stack.append(w)
    return _cut_from_side(net, side)


def enumerate_min_cuts(net: Network,
                       node_limit: int = DEFAULT_NODE_LIMIT) -> tuple[CutSet, ...]:
    """All minimum cuts, by checking every source-side subset.

    Distinct source sides inducing the same edge set count once (the side
    kept is the first in subset order).  Cuts come back sorted by their
    edge index tuples.  Exponential in the interior node count, hence the
    node_limit guard.
    """
    if len(net.nodes) > node_limit:
        raise TooManyNodes(
            f"{len(net.nodes)} nodes exceeds node_limit={node_limit} "
            "for exhaustive cut enumeration"
        )
    value, _ = max_flow(net)
    middle = [v for v in net.nodes if v not in (net.source, net.sink)]
    best: dict[tuple[int, ...], CutSet] = {}
    for mask in range(1 << len(middle)):
        side = {net.source}
        for b, v in enumerate(middle):
            if mask >> b & 1:
                side.add(v)
        cut = _cut_from_side(net, side)
        if cut.capacity == value and cut.edges not in best:
            best[cut.edges] = cut
    return tuple(best[k] for k in sorted(best))


# ------------------------------------------------------------ cheapest path

def _dijkstra_cost(net: Network, source: str) -> dict[str, Fraction]:
    """Cheapest path cost from source to every node (edge costs, not caps)."""
    order = {v: k for k, v in enumerate(net.nodes)}
    out: dict[str, list[int]] = {v: [] for v in net.nodes}
    for i, e in enumerate(net.edges):
        out[e.tail].append(i)
    dist: dict[str, Fraction] = {source: Fraction(0)}
    heap: list[tuple[Fraction, int, str]] = [(Fraction(0), order[source], source)]
    done: set[str] = set()
    while heap:
        d, _, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        for i in out[v]:
            w = net.edges[i].head
            nd = d + net.edges[i].cost
            if w not in dist or nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, order[w], w))
    return dist


def alpha(net: Network) -> Fraction:
    """Cost of the cheapest s-t path."""
    dist = _dijkstra_cost(net, net.source)
    return dist[net.sink]


def path_cost(net: Network, nodes: tuple[str, ...]) -> Fraction:
    return sum((net.edges[i].cost for i in path_edge_indices(net, nodes)),
               Fraction(0))


# --------------------------------------------------------- min cost max flow

def min_cost_max_flow(net: Network) -> FlowAction:
    """A maximum flow of least transport cost, as canonical path flows.

    Successive shortest paths with potentials keep every Dijkstra run on
    nonnegative reduced costs.  The heap breaks ties by node order and
    parent pointers only move on strict improvement, so the augmenting
    path sequence, and hence the decomposition, is reproducible.
    """
    arcs = _arcs_by_node(net)
    order = {v: k for k, v in enumerate(net.nodes)}
    m = len(net.edges)
    flow = [Fraction(0)] * m
    pi = {v: Fraction(0) for v in net.nodes}

    def arc_cost(i: int, fwd: bool) -> Fraction:
        return net.edges[i].cost if fwd else -net.edges[i].cost

    while True:
        dist: dict[str, Fraction] = {net.source: Fraction(0)}
        parent: dict[str, tuple[str, int, bool]] = {}
        heap: list[tuple[Fraction, int, str]] = [
            (Fraction(0), order[net.source], net.source)
        ]
        done: set[str] = set()
        while heap:
            d, _, v = heapq.heappop(heap)
            if v in done:
                continue
            done.add(v)
            for i, fwd in arcs[v]:
                if _residual(net, flow, i, fwd) <= 0:
                    continue
                w = _arc_head(net, i, fwd)
                nd = d + arc_cost(i, fwd) + pi[v] - pi[w]
                if w not in dist or nd < dist[w]:
                    dist[w] = nd
                    parent[w] = (v, i, fwd)
                    heapq.heappush(heap, (nd, order[w], w))
        if net.sink not in done:
            break
        spread = max(dist[v] for v in done)
        for v in net.nodes:
            pi[v] += dist[v] if v in done else spread
        path: list[tuple[int, bool]] = []
        v = net.sink
        while v != net.source:
            u, i, fwd = parent[v]
            path.append((i, fwd))
            v = u
        bottleneck = min(_residual(net, flow, i, fwd) for i, fwd in path)
        for i, fwd in path:
            flow[i] += bottleneck if fwd else -bottleneck

    return _decompose(net, flow)


def _decompose(net: Network, flow: list[Fraction]) -> FlowAction:
    """Split edge flows into simple path flows, lowest edge index first.

    Walks greedily from the source along positive-flow edges; a revisited
    node exposes a flow cycle, which is cancelled (a min-cost flow only
    carries zero-cost cycles, so removal never raises cost).
    """
    remaining = list(flow)
    out: dict[str, list[int]] = {v: [] for v in net.nodes}
    for i, e in enumerate(net.edges):
        out[e.tail].append(i)

    def next_edge(v: str) -> Optional[int]:
        for i in out[v]:
            if remaining[i] > 0:
                return i
        return None

    paths: list[PathFlow] = []
    while True:
        i0 = next_edge(net.source)
        if i0 is None:
            break
        walk_nodes = [net.source]
        walk_edges: list[int] = []
        at = {net.source: 0}
        v = net.source
        cancelled = False
        while v != net.sink:
            i = next_edge(v)
            assert i is not None, f"flow conservation broken at {v!r}"
            w = net.edges[i].head
            walk_edges.append(i)
            if w in at:
                cyc = walk_edges[at[w]:]
                amt = min(remaining[j] for j in cyc)
                for j in cyc:
                    remaining[j] -= amt
                cancelled = True
                break
            walk_nodes.append(w)
            at[w] = len(walk_edges)
            v = w
        if cancelled:
            continue
        amt = min(remaining[j] for j in walk_edges)
        for j in walk_edges:
            remaining[j] -= amt
        paths.append(PathFlow(nodes=tuple(walk_nodes), amount=amt))
    return FlowAction(paths=tuple(paths))


# ----------------------------------------------------------------- by paths

def enumerate_paths(net: Network, limit: Optional[int] = None
                    ) -> tuple[tuple[str, ...], ...]:
    """All simple s-t paths as node tuples, in canonical DFS order.

    Parallel edges give one entry (hops resolve to the lowest edge index).
    Raises once more than `limit` paths exist; the default comes from
    FLOWGAME_PATH_LIMIT or 10000.
    """
    cap = default_path_limit() if limit is None else limit
    out: dict[str, list[int]] = {v: [] for v in net.nodes}
    for i, e in enumerate(net.edges):
        out[e.tail].append(i)
    found: list[tuple[str, ...]] = []
    stack_nodes: list[str] = [net.source]
    on_path = {net.source}

    def dfs(v: str) -> None:
        if v == net.sink:
            found.append(tuple(stack_nodes))
            if len(found) > cap:
                raise TooManyPaths(
                    f"more than {cap} simple paths from "
                    f"{net.source!r} to {net.sink!r}"
                )
            return
        tried: set[str] = set()
        for i in out[v]:
            w = net.edges[i].head
            if w in on_path or w in tried:
                continue
            tried.add(w)
            stack_nodes.append(w)
            on_path.add(w)
            dfs(w)
            stack_nodes.pop()
            on_path.remove(w)

    dfs(net.source)
    return tuple(found)


# -------------------------------------------------------------- assumptions

@dataclass(frozen=True)
class Assumption1Check:
    """Whether the least-cost maximum flow uses only cheapest paths:
    t_min == alpha * f_max."""
    holds: bool
    f_max: Fraction
    t_min: Fraction
    alpha: Fraction


@dataclass(frozen=True)
class Assumption2Check:
    """Whether some minimum cut is cost aligned with x_star.

    For the witness cut, alphas[k] is the cheapest s-t path cost among
    paths through cut edge k; the check demands every x_star path through
    that edge cost exactly alphas[k].  `violations` describes the failures
    of the canonical cut when no witness exists.
    """
    holds: bool
    cut: CutSet
    alphas: tuple[Fraction, ...]
    violations: tuple[str, ...] = ()


def check_assumption1(net: Network, x_star: Optional[FlowAction] = None
                      ) -> Assumption1Check:
    from .netmodel import flow_value, transport_cost
    if x_star is None:
        x_star = min_cost_max_flow(net)
    f = flow_value(x_star)
    t = transport_cost(net, x_star)
    a = alpha(net)
    return Assumption1Check(holds=(t == a * f), f_max=f, t_min=t, alpha=a)


def _cheapest_through_edge(net: Network, paths: tuple[tuple[str, ...], ...],
                           edge: int) -> Optional[Fraction]:
    best: Optional[Fraction] = None
    for nodes in paths:
        if edge in path_edge_indices(net, nodes):
            c = path_cost(net, nodes)
            if best is None or c < best:
                best = c
    return best


def _cut_alignment(net: Network, x_star: FlowAction, cut: CutSet,
                   all_paths: tuple[tuple[str, ...], ...]
                   ) -> tuple[bool, tuple[Fraction, ...], tuple[str, ...]]:
    alphas: list[Fraction] = []
    violations: list[str] = []
    for k in cut.edges:
        a_k = _cheapest_through_edge(net, all_paths, k)
        if a_k is None:
            alphas.append(Fraction(0))
            continue
        alphas.append(a_k)
        for pf in x_star.paths:
            if k in path_edge_indices(net, pf.nodes):
                c = path_cost(net, pf.nodes)
                if c != a_k:
                    violations.append(
                        f"path {list(pf.nodes)} through edge {k} costs {c}, "
                        f"cheapest through that edge is {a_k}"
                    )
    return (not violations), tuple(alphas), tuple(violations)


def check_assumption2(net: Network, x_star: Optional[FlowAction] = None,
                      node_limit: int = DEFAULT_NODE_LIMIT,
                      path_limit: Optional[int] = None) -> Assumption2Check:
    """Search minimum cuts for one that is cost aligned with x_star.

    The canonical cut is tried first, then every enumerated cut in order;
    the first aligned cut is the witness.  If enumeration is infeasible
    (too many nodes) only the canonical cut is examined.
    """
    if x_star is None:
        x_star = min_cost_max_flow(net)
    all_paths = enumerate_paths(net, limit=path_limit)
    canonical = min_cut(net)
    ok, alphas, violations = _cut_alignment(net, x_star, canonical, all_paths)
    if ok:
        return Assumption2Check(holds=True, cut=canonical, alphas=alphas)
    first_failure = Assumption2Check(holds=False, cut=canonical,
                                     alphas=alphas, violations=violations)
    try:
        cuts = enumerate_min_cuts(net, node_limit=node_limit)
    except TooManyNodes:
        return first_failure
    for cut in cuts:
        if cut.edges == canonical.edges:
            continue
        ok, alphas, _ = _cut_alignment(net, x_star, cut, all_paths)
        if ok:
            return Assumption2Check(holds=True, cut=cut, alphas=alphas)
    return first_failure


# ------------------------------------------------------------------ summary

@dataclass(frozen=True)
class FlowAnalysis:
    f_max: Fraction
    t_min: Fraction
    alpha: Fraction
    x_star: FlowAction
    min_cut: CutSet
    all_min_cuts: Optional[tuple[CutSet, ...]]
    assumption1: Assumption1Check
    assumption2: Assumption2Check


def analyze(net: Network, node_limit: int = DEFAULT_NODE_LIMIT,
            path_limit: Optional[int] = None) -> FlowAnalysis:
    """One-stop computation of every flow quantity the game needs.

    Cut enumeration degrades gracefully on large node counts
    (all_min_cuts=None); everything else is always computed.
    """
    from .netmodel import flow_value, transport_cost
    x_star = min_cost_max_flow(net)
    cut = min_cut(net)
    try:
        cuts: Optional[tuple[CutSet, ...]] = enumerate_min_cuts(
            net, node_limit=node_limit)
    except TooManyNodes:
        cuts = None
    return FlowAnalysis(
        f_max=flow_value(x_star),
        t_min=transport_cost(net, x_star),
        alpha=alpha(net),
        x_star=x_star,
        min_cut=cut,
        all_min_cuts=cuts,
        assumption1=check_assumption1(net, x_star),
        assumption2=check_assumption2(net, x_star, node_limit=node_limit,
                                      path_limit=path_limit),
    )


def cut_to_dict(net: Network, cut: CutSet) -> dict:
    return {
        "source_side": list(cut.source_side),
        "edges": [[net.edges[i].tail, net.edges[i].head] for i in cut.edges],
        "edge_index": list(cut.edges),
        "capacity": str(cut.capacity),
    }


def analysis_to_dict(net: Network, an: FlowAnalysis) -> dict:
    from .netmodel import flow_strategy_to_dict, pure_flow
    return {
        "f_max": str(an.f_max),
        "t_min": str(an.t_min),
        "alpha": str(an.alpha),
        "x_star": flow_strategy_to_dict(pure_flow(an.x_star))["atoms"][0]["paths"],
        "min_cut": cut_to_dict(net, an.min_cut),
        "all_min_cuts": (None if an.all_min_cuts is None
                         else [cut_to_dict(net, c) for c in an.all_min_cuts]),
        "assumption1": {
            "holds": an.assumption1.holds,
            "t_min": str(an.assumption1.t_min),
            "alpha_times_f_max": str(an.assumption1.alpha * an.assumption1.f_max),
        },
        "assumption2": {
            "holds": an.assumption2.holds,
            "cut": cut_to_dict(net, an.assumption2.cut),
            "alphas": [str(a) for a in an.assumption2.alphas],
            "violations": list(an.assumption2.violations),
        },
    }
