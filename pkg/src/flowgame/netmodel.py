"""Domain types and payoffs for the two-player flow-security game.

The model: a defender (player 1) routes flow from a source s to a sink t
through a capacitated directed network, paying a per-unit transport cost on
every edge used.  An attacker (player 2) removes a subset of edges, paying
the capacity of each removed edge.  Flow on a path that contains a removed
edge is lost entirely; there is no rerouting.  With F(x) the routed amount,
T(x) the transport cost, C(mu) the attack cost and x^mu the surviving part
of the flow:

    u1(x, mu) = p1 * F(x^mu) - T(x)
    u2(x, mu) = p2 * (F(x) - F(x^mu)) - C(mu)

where p1 and p2 are the players' per-unit valuations.  The auxiliary payoff

    zs(x, mu) = F(x^mu) - T(x)/p1 + C(mu)/p2

turns the game into an equivalent zero-sum one: p1*zs - (p1/p2)*C(mu) = u1
identically, and -p2*zs + p2*F(x) - (p2/p1)*T(x) = u2.

All quantities are exact rationals (fractions.Fraction).  Defender pure
actions are lists of simple s-t path flows; flows containing loops are
strictly dominated (the loop only adds cost), so the representation excludes
them.  Everything here is immutable and side-effect free.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import (
    AmbiguousEdge,
    InvalidNetwork,
    InvalidStrategy,
    MissingNode,
    NegativeCapacity,
    NegativeCost,
    NoPathSourceToSink,
    SelfLoop,
)

Rational = Fraction
RationalLike = Union[Fraction, int, str]


def rational(value: RationalLike) -> Fraction:
    """Parse a rational from an int, a Fraction, or a string.

    Strings may be integers ("3"), decimals ("0.25") or ratios ("9/2");
    the result is always in lowest terms with a positive denominator.
    Floats are rejected on purpose: they would smuggle binary rounding
    into an otherwise exact pipeline.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidNetwork(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidNetwork(f"cannot parse rational from {value!r}") from exc
    raise InvalidNetwork(
        f"cannot parse rational from {type(value).__name__}; pass a string like '9/2'"
    )


def format_rational(value: Fraction) -> str:
    """Serialize a rational the way inputs are written: '3', '9/2', '-1/3'."""
    return str(value)


# --------------------------------------------------------------------- types

@dataclass(frozen=True)
class Edge:
    tail: str
    head: str
    capacity: Fraction
    cost: Fraction


@dataclass(frozen=True)
class Network:
    """A capacitated directed graph with one source and one sink.

    The edge tuple order is the canonical edge index: every deterministic
    tie-break in the package keys off it.  Parallel edges are allowed and
    distinguished by index.
    """
    name: str
    nodes: tuple[str, ...]
    source: str
    sink: str
    edges: tuple[Edge, ...]

    def node_order(self, node: str) -> int:
        return self.nodes.index(node)


@dataclass(frozen=True)
class PathFlow:
    """A simple s-t path (node sequence) carrying a nonnegative amount."""
    nodes: tuple[str, ...]
    amount: Fraction


@dataclass(frozen=True)
class FlowAction:
    """A defender pure action: a list of simple path flows.

    The empty action (no paths) is the idle action x0.
    """
    paths: tuple[PathFlow, ...] = ()


@dataclass(frozen=True)
class Attack:
    """An attacker pure action: a set of canonical edge indices.

    The empty attack is mu0.
    """
    edges: frozenset[int] = frozenset()


@dataclass(frozen=True)
class GameParams:
    p1: Fraction
    p2: Fraction

    def __post_init__(self) -> None:
        if self.p1 <= 0 or self.p2 <= 0:
            raise InvalidStrategy("p1 and p2 must be positive rationals")


@dataclass(frozen=True)
class MixedFlowStrategy:
    """Finite probability mass over FlowActions; atom list is the support."""
    atoms: tuple[tuple[FlowAction, Fraction], ...]

    def __post_init__(self) -> None:
        _check_atom_probs(self.atoms)


@dataclass(frozen=True)
class MixedAttackStrategy:
    atoms: tuple[tuple[Attack, Fraction], ...]

    def __post_init__(self) -> None:
        _check_atom_probs(self.atoms)


def _check_atom_probs(atoms: Sequence[tuple[object, Fraction]]) -> None:
    if not atoms:
        raise InvalidStrategy("a mixed strategy needs at least one atom")
    total = Fraction(0)
    for _, prob in atoms:
        if not isinstance(prob, Fraction) or prob <= 0:
            raise InvalidStrategy(
                f"atom probabilities must be positive rationals, got {prob!r}"
            )
        total += prob
    if total != 1:
        raise InvalidStrategy(f"atom probabilities sum to {total}, expected 1")


def pure_flow(action: FlowAction) -> MixedFlowStrategy:
    return MixedFlowStrategy(atoms=((action, Fraction(1)),))


def pure_attack(action: Attack) -> MixedAttackStrategy:
    return MixedAttackStrategy(atoms=((action, Fraction(1)),))


# ------------------------------------------------------------------ adjacency

def adjacency(net: Network) -> dict[str, list[int]]:
    """Outgoing edge indices per node, in canonical order."""
    out: dict[str, list[int]] = {v: [] for v in net.nodes}
    for i, e in enumerate(net.edges):
        out[e.tail].append(i)
    return out


def edges_between(net: Network, tail: str, head: str) -> list[int]:
    return [i for i, e in enumerate(net.edges) if e.tail == tail and e.head == head]


def resolve_edge_pair(net: Network, tail: str, head: str) -> int:
    """Map a (tail, head) pair to its canonical edge index.

    With parallel edges the pair is ambiguous and the caller must address
    the edge by index instead.
    """
    matches = edges_between(net, tail, head)
    if not matches:
        raise InvalidStrategy(f"no edge ({tail}, {head}) in network {net.name!r}")
    if len(matches) > 1:
        raise AmbiguousEdge(
            f"({tail}, {head}) matches edges {matches}; address it by edge_index"
        )
    return matches[0]


def path_edge_indices(net: Network, nodes: Sequence[str]) -> tuple[int, ...]:
    """Resolve a node sequence to edge indices, hop by hop.

    Each hop takes the first edge matching (tail, head); with parallel
    edges the later copies are therefore not addressable through paths,
    only through attacks given by index.
    """
    out = adjacency(net)
    idx: list[int] = []
    for a, b in zip(nodes, nodes[1:]):
        if a not in out:
            raise InvalidStrategy(f"unknown node {a!r} in path {list(nodes)}")
        for i in out[a]:
            if net.edges[i].head == b:
                idx.append(i)
                break
        else:
            raise InvalidStrategy(f"no edge ({a}, {b}) in path {list(nodes)}")
    return tuple(idx)


def check_flow_action(net: Network, x: FlowAction) -> None:
    """Raise InvalidStrategy unless x is a well-formed action for net.

    Paths must be simple s-t node sequences over existing edges with
    nonnegative amounts, and the derived edge flows must respect every
    capacity.
    """
    for pf in x.paths:
        if len(pf.nodes) < 2:
            raise InvalidStrategy(f"path too short: {list(pf.nodes)}")
        if pf.nodes[0] != net.source or pf.nodes[-1] != net.sink:
            raise InvalidStrategy(
                f"path {list(pf.nodes)} must run from {net.source!r} to {net.sink!r}"
            )
        if len(set(pf.nodes)) != len(pf.nodes):
            raise InvalidStrategy(f"path {list(pf.nodes)} repeats a node")
        if pf.amount < 0:
            raise InvalidStrategy(f"negative path amount {pf.amount}")
        path_edge_indices(net, pf.nodes)
    if not is_feasible(net, x):
        raise InvalidStrategy("derived edge flows exceed a capacity")


# ------------------------------------------------------------------- payoffs

def edge_flows(net: Network, x: FlowAction) -> dict[int, Fraction]:
    """Edge flows induced by a path-flow action: x_e = sum over paths using e."""
    flows = {i: Fraction(0) for i in range(len(net.edges))}
    for pf in x.paths:
        for i in path_edge_indices(net, pf.nodes):
            flows[i] += pf.amount
    return flows


def is_feasible(net: Network, x: FlowAction) -> bool:
    flows = edge_flows(net, x)
    return all(flows[i] <= net.edges[i].capacity for i in flows)


def flow_value(x: FlowAction) -> Fraction:
    """F(x): total amount arriving at the sink."""
    return sum((pf.amount for pf in x.paths), Fraction(0))


def transport_cost(net: Network, x: FlowAction) -> Fraction:
    """T(x): sum of per-edge cost times flow."""
    total = Fraction(0)
    for pf in x.paths:
        path_cost = sum(
            (net.edges[i].cost for i in path_edge_indices(net, pf.nodes)), Fraction(0)
        )
        total += path_cost * pf.amount
    return total


def attack_cost(net: Network, mu: Attack) -> Fraction:
    """C(mu): the attacker pays the capacity of every removed edge."""
    return sum((net.edges[i].capacity for i in mu.edges), Fraction(0))


def effective_flow(net: Network, x: FlowAction, mu: Attack) -> FlowAction:
    """x^mu: the path flows whose paths avoid every attacked edge."""
    kept = tuple(
        pf for pf in x.paths
        if not (set(path_edge_indices(net, pf.nodes)) & mu.edges)
    )
    return FlowAction(paths=kept)


def loss(net: Network, x: FlowAction, mu: Attack) -> Fraction:
    """F(x) - F(x^mu): the amount of flow the attack destroys."""
    return flow_value(x) - flow_value(effective_flow(net, x, mu))


def payoff_u1(net: Network, x: FlowAction, mu: Attack, params: GameParams) -> Fraction:
    return params.p1 * flow_value(effective_flow(net, x, mu)) - transport_cost(net, x)


def payoff_u2(net: Network, x: FlowAction, mu: Attack, params: GameParams) -> Fraction:
    return params.p2 * loss(net, x, mu) - attack_cost(net, mu)


def zero_sum_payoff(net: Network, x: FlowAction, mu: Attack,
                    params: GameParams) -> Fraction:
    """The equivalent zero-sum payoff F(x^mu) - T(x)/p1 + C(mu)/p2."""
    return (flow_value(effective_flow(net, x, mu))
            - transport_cost(net, x) / params.p1
            + attack_cost(net, mu) / params.p2)


def expected_payoffs(net: Network, sigma1: MixedFlowStrategy,
                     sigma2: MixedAttackStrategy,
                     params: GameParams) -> tuple[Fraction, Fraction]:
    """Exact bilinear expectations (U1, U2) over the finite supports."""
    u1 = Fraction(0)
    u2 = Fraction(0)
    for x, p in sigma1.atoms:
        for mu, q in sigma2.atoms:
            w = p * q
            u1 += w * payoff_u1(net, x, mu, params)
            u2 += w * payoff_u2(net, x, mu, params)
    return u1, u2


def flow_actions_equal(a: FlowAction, b: FlowAction) -> bool:
    """Action identity up to path order, ignoring zero-amount paths."""
    def key(x: FlowAction) -> tuple:
        return tuple(sorted((pf.nodes, pf.amount) for pf in x.paths if pf.amount > 0))
    return key(a) == key(b)


# ------------------------------------------------------------------ JSON I/O

_SUPER_NODE_HINT = (
    "networks with several sources or sinks are not accepted directly; "
    "add one extra source node with an uncapacitated zero-cost edge to each "
    "original source (and likewise an extra sink node receiving an "
    "uncapacitated zero-cost edge from each original sink), then submit the "
    "single-source single-sink network"
)


def validate_network(raw: Mapping) -> Network:
    """Build a Network from a parsed description, checking every invariant.

    Expected keys: "source", "sink", "edges" (list of {tail, head,
    capacity, cost}); optional "name" and explicit "nodes" order.
    Parallel edges are allowed.  Numeric fields are rational strings.
    """
    if not isinstance(raw, Mapping):
        raise InvalidNetwork("network description must be a JSON object")
    if "sources" in raw or "sinks" in raw:
        raise InvalidNetwork(_SUPER_NODE_HINT)
    try:
        source = raw["source"]
        sink = raw["sink"]
        edges_raw = raw["edges"]
    except KeyError as exc:
        raise InvalidNetwork(f"network description lacks key {exc.args[0]!r}") from exc
    name = str(raw.get("name", ""))
    if not isinstance(source, str) or not isinstance(sink, str):
        raise InvalidNetwork("source and sink must be node id strings")
    if source == sink:
        raise InvalidNetwork("source and sink must be distinct nodes")

    edges: list[Edge] = []
    for k, e in enumerate(edges_raw):
        try:
            tail, head = e["tail"], e["head"]
            cap = rational(e["capacity"])
            cost = rational(e["cost"])
        except KeyError as exc:
            raise InvalidNetwork(f"edge {k} lacks key {exc.args[0]!r}") from exc
        if tail == head:
            raise SelfLoop(f"edge {k} is a self-loop at {tail!r}")
        if cap < 0:
            raise NegativeCapacity(f"edge {k} ({tail}, {head}) has capacity {cap}")
        if cost < 0:
            raise NegativeCost(f"edge {k} ({tail}, {head}) has cost {cost}")
        edges.append(Edge(tail=tail, head=head, capacity=cap, cost=cost))

    seen: set[str] = set()
    appearing: list[str] = []
    for e in edges:
        for v in (e.tail, e.head):
            if v not in seen:
                seen.add(v)
                appearing.append(v)

    if "nodes" in raw:
        nodes = tuple(raw["nodes"])
        declared = set(nodes)
        if len(declared) != len(nodes):
            raise InvalidNetwork("duplicate node ids in node list")
        for v in (source, sink, *appearing):
            if v not in declared:
                raise MissingNode(f"node {v!r} is not declared")
    else:
        middle = sorted(v for v in appearing if v not in (source, sink))
        nodes = (source, *middle, sink)

    net = Network(name=name, nodes=nodes, source=source, sink=sink,
                  edges=tuple(edges))
    if not _sink_reachable(net):
        raise NoPathSourceToSink(
            f"no path from {source!r} to {sink!r} in network {name!r}"
        )
    return net


def _sink_reachable(net: Network) -> bool:
    out = adjacency(net)
    stack = [net.source]
    seen = {net.source}
    while stack:
        v = stack.pop()
        if v == net.sink:
            return True
        for i in out[v]:
            w = net.edges[i].head
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def network_to_dict(net: Network) -> dict:
    return {
        "name": net.name,
        "nodes": list(net.nodes),
        "source": net.source,
        "sink": net.sink,
        "edges": [
            {"tail": e.tail, "head": e.head,
             "capacity": format_rational(e.capacity),
             "cost": format_rational(e.cost)}
            for e in net.edges
        ],
    }


def load_network(path: str) -> Network:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidNetwork(f"{path}: not valid JSON ({exc})") from exc
    return validate_network(raw)


def flow_strategy_from_dict(net: Network, raw: Mapping) -> MixedFlowStrategy:
    """Parse {"atoms": [{"prob": "1/2", "paths": [{"nodes": [...],
    "amount": "1"}, ...]}, ...]} and validate every atom against net."""
    atoms = []
    for k, atom in enumerate(_atom_list(raw)):
        prob = rational(_require(atom, "prob", k))
        paths = tuple(
            PathFlow(nodes=tuple(p["nodes"]), amount=rational(p["amount"]))
            for p in atom.get("paths", ())
        )
        action = FlowAction(paths=paths)
        check_flow_action(net, action)
        atoms.append((action, prob))
    return MixedFlowStrategy(atoms=tuple(atoms))


def attack_strategy_from_dict(net: Network, raw: Mapping) -> MixedAttackStrategy:
    """Parse {"atoms": [{"prob": "1/2", "edges": [[tail, head], ...]}, ...]}.

    An atom may give "edge_index": [ints] instead of "edges"; that form is
    required when parallel edges make a pair ambiguous.
    """
    atoms = []
    for k, atom in enumerate(_atom_list(raw)):
        prob = rational(_require(atom, "prob", k))
        if "edge_index" in atom:
            idx = []
            for i in atom["edge_index"]:
                if not isinstance(i, int) or not 0 <= i < len(net.edges):
                    raise InvalidStrategy(f"atom {k}: bad edge index {i!r}")
                idx.append(i)
        elif "edges" in atom:
            idx = [resolve_edge_pair(net, t, h) for t, h in atom["edges"]]
        else:
            raise InvalidStrategy(f"atom {k} needs an 'edges' or 'edge_index' list")
        atoms.append((Attack(edges=frozenset(idx)), prob))
    return MixedAttackStrategy(atoms=tuple(atoms))


def _atom_list(raw: Mapping) -> list:
    if not isinstance(raw, Mapping) or "atoms" not in raw:
        raise InvalidStrategy("strategy description must be {'atoms': [...]}")
    return list(raw["atoms"])


def _require(atom: Mapping, key: str, k: int):
    if key not in atom:
        raise InvalidStrategy(f"atom {k} lacks key {key!r}")
    return atom[key]


def flow_strategy_to_dict(sigma: MixedFlowStrategy) -> dict:
    return {
        "atoms": [
            {"prob": format_rational(prob),
             "paths": [{"nodes": list(pf.nodes),
                        "amount": format_rational(pf.amount)}
                       for pf in action.paths]}
            for action, prob in sigma.atoms
        ]
    }


def attack_strategy_to_dict(net: Network, sigma: MixedAttackStrategy) -> dict:
    out = []
    for action, prob in sigma.atoms:
        idx = sorted(action.edges)
        out.append({
            "prob": format_rational(prob),
            "edges": [[net.edges[i].tail, net.edges[i].head] for i in idx],
            "edge_index": idx,
        })
    return {"atoms": out}


def load_flow_strategy(net: Network, path: str) -> MixedFlowStrategy:
    return flow_strategy_from_dict(net, _load_json(path))


def load_attack_strategy(net: Network, path: str) -> MixedAttackStrategy:
    return attack_strategy_from_dict(net, _load_json(path))


def _load_json(path: str) -> Mapping:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidStrategy(f"{path}: not valid JSON ({exc})") from exc
