"""Closed-form equilibrium constructions for the flow-security game.

The parameter space splits by the defender valuation p1 against the
cheapest path cost alpha, and the attacker valuation p2 against 1 (the
break-even price of destroying one unit of capacity):

    region I    p1 < alpha            routing never pays; both players idle
    region II   p1 > alpha, p2 < 1    attacking never pays; defender routes
                                      a cheapest-path maximum flow openly
    region III  p1 > alpha, p2 > 1    only mixed equilibria exist

Parameters sitting exactly on a threshold are rejected as BOUNDARY: the
constructions below would degenerate there and which neighbouring region's
profile applies is a modelling choice the caller must make.

Region III constructions (all assume cheapest-path routing is compatible
with a maximum flow, and a cost-aligned minimum cut; see flowopt):

    Prop1   (x0, mu0) pure, region I
    Prop2   (x_star, mu0) pure, region II
    Prop3   defender mixes {x0, x_star}, attacker mixes {mu0, full cut}
    Prop8   budget-capped defender: x_star shrunk to transport budget b1
    Prop9a  attacker spreads over the blocks of a cut partition plus mu0
    Prop9b  attacker spreads over the blocks plus the full cut

Prop3 is the n=1 special case of Prop9a.  Alongside the constructions this
module computes the expectation invariants shared by every region III
equilibrium (theorem1_quantities) and the per-edge and probability bounds
any such equilibrium must satisfy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .errors import (
    AssumptionViolated,
    BoundaryParameters,
    InvalidPartition,
    WrongRegion,
)
from .flowopt import CutSet, FlowAnalysis, analyze
from .netmodel import (
    Attack,
    FlowAction,
    GameParams,
    MixedAttackStrategy,
    MixedFlowStrategy,
    Network,
    PathFlow,
    attack_strategy_to_dict,
    flow_actions_equal,
    flow_strategy_to_dict,
    flow_value,
    pure_attack,
    pure_flow,
    resolve_edge_pair,
    transport_cost,
)

X0 = FlowAction(paths=())
MU0 = Attack(edges=frozenset())


# ------------------------------------------------------------------ regions

@dataclass(frozen=True)
class Region:
    """Parameter region tag; n is the partition size for IIIa/IIIb."""
    tag: str
    n: Optional[int] = None


def classify_region(params: GameParams, alpha: Fraction,
                    n: Optional[int] = None) -> Region:
    """Classify (p1, p2) against alpha; exact threshold hits are BOUNDARY.

    With a partition size n the region III refinement applies: IIIa when
    the attacker mixes blocks with the empty attack (p1 below n*alpha/(n-1)),
    IIIb when with the full cut (above it).  n=1 has no finite threshold
    and is always IIIa.
    """
    if params.p1 == alpha:
        return Region(tag="BOUNDARY", n=n)
    if params.p1 < alpha:
        return Region(tag="I")
    if params.p2 == 1:
        return Region(tag="BOUNDARY", n=n)
    if params.p2 < 1:
        return Region(tag="II")
    if n is None:
        return Region(tag="III")
    if n < 1:
        raise InvalidPartition(f"partition size must be positive, got {n}")
    if n == 1:
        return Region(tag="IIIa", n=1)
    threshold = Fraction(n, n - 1) * alpha
    if params.p1 == threshold:
        return Region(tag="BOUNDARY", n=n)
    return Region(tag="IIIa" if params.p1 < threshold else "IIIb", n=n)


def _require_region(params: GameParams, alpha: Fraction, want: str,
                    n: Optional[int] = None) -> Region:
    region = classify_region(params, alpha, n=n)
    if region.tag == "BOUNDARY":
        raise BoundaryParameters(
            f"parameters p1={params.p1}, p2={params.p2} sit exactly on a "
            f"region threshold (alpha={alpha}"
            + (f", n={n}" if n is not None else "") + ")"
        )
    ok = region.tag == want or (want == "III" and region.tag in ("IIIa", "IIIb"))
    if not ok:
        raise WrongRegion(
            f"construction needs region {want}, parameters are in {region.tag}"
        )
    return region


# ------------------------------------------------------------------ profiles

@dataclass(frozen=True)
class EquilibriumProfile:
    sigma1: MixedFlowStrategy
    sigma2: MixedAttackStrategy
    construction: str
    region: Region


def _require_assumptions(an: FlowAnalysis, need_a2: bool = True) -> None:
    if not an.assumption1.holds:
        raise AssumptionViolated(
            f"t_min={an.t_min} differs from alpha*f_max="
            f"{an.alpha * an.f_max}; no cheapest-path maximum flow exists"
        )
    if need_a2 and not an.assumption2.holds:
        raise AssumptionViolated(
            "no minimum cut is cost aligned with x_star: "
            + "; ".join(an.assumption2.violations)
        )


def region1_equilibrium(net: Network, params: GameParams,
                        analysis: Optional[FlowAnalysis] = None
                        ) -> EquilibriumProfile:
    """Region I: both players idle.  Needs no structural assumptions."""
    an = analysis or analyze(net)
    region = _require_region(params, an.alpha, "I")
    return EquilibriumProfile(sigma1=pure_flow(X0), sigma2=pure_attack(MU0),
                              construction="Prop1", region=region)


def region2_equilibrium(net: Network, params: GameParams,
                        analysis: Optional[FlowAnalysis] = None
                        ) -> EquilibriumProfile:
    """Region II: defender routes x_star in the open, attacker idles.

    Cheapest-path routing must carry a maximum flow, otherwise x_star is
    not even a best response to the empty attack.
    """
    an = analysis or analyze(net)
    region = _require_region(params, an.alpha, "II")
    _require_assumptions(an, need_a2=False)
    return EquilibriumProfile(sigma1=pure_flow(an.x_star),
                              sigma2=pure_attack(MU0),
                              construction="Prop2", region=region)


def region3_equilibrium(net: Network, params: GameParams,
                        analysis: Optional[FlowAnalysis] = None,
                        force: bool = False) -> EquilibriumProfile:
    """Region III two-point mix.

    sigma1 = {x0: 1 - 1/p2, x_star: 1/p2}
    sigma2 = {mu0: alpha/p1, full cut: 1 - alpha/p1}

    The cut is the cost-aligned witness.  With force=True the structural
    assumptions are not enforced and the canonical minimum cut stands in;
    the result is then generally NOT an equilibrium and is meant to be fed
    to the verifier.
    """
    an = analysis or analyze(net)
    region = _require_region(params, an.alpha, "III")
    if not force:
        _require_assumptions(an)
    cut = an.assumption2.cut if an.assumption2.holds else an.min_cut
    mu_min = Attack(edges=frozenset(cut.edges))
    sigma1 = MixedFlowStrategy(atoms=(
        (X0, 1 - Fraction(1) / params.p2),
        (an.x_star, Fraction(1) / params.p2),
    ))
    sigma2 = MixedAttackStrategy(atoms=(
        (MU0, an.alpha / params.p1),
        (mu_min, 1 - an.alpha / params.p1),
    ))
    return EquilibriumProfile(sigma1=sigma1, sigma2=sigma2,
                              construction="Prop3", region=region)


# ---------------------------------------------------------------- partitions

@dataclass(frozen=True)
class Partition:
    """A partition of a cut's edge indices into disjoint nonempty blocks.

    Blocks are stored sorted (internally and by smallest element) so equal
    partitions compare equal.
    """
    blocks: tuple[tuple[int, ...], ...]

    @staticmethod
    def of(blocks: Sequence[Sequence[int]]) -> "Partition":
        normal = tuple(sorted((tuple(sorted(b)) for b in blocks),
                              key=lambda b: b[0] if b else -1))
        return Partition(blocks=normal)


def check_partition(partition: Partition, cut: CutSet) -> None:
    seen: set[int] = set()
    for block in partition.blocks:
        if not block:
            raise InvalidPartition("empty block")
        for i in block:
            if i in seen:
                raise InvalidPartition(f"edge {i} appears in two blocks")
            if i not in cut.edges:
                raise InvalidPartition(f"edge {i} is not a cut edge")
            seen.add(i)
    if seen != set(cut.edges):
        missing = sorted(set(cut.edges) - seen)
        raise InvalidPartition(f"cut edges {missing} not covered")


def enumerate_partitions(items: Sequence[int]) -> tuple[Partition, ...]:
    """Every set partition of the given indices, canonically ordered.

    Generated by inserting items in sorted order into existing blocks
    (in order) or a fresh block, so the first result is the single block
    and the last is all singletons.
    """
    items = sorted(items)
    results: list[Partition] = []

    def grow(k: int, blocks: list[list[int]]) -> None:
        if k == len(items):
            results.append(Partition.of([tuple(b) for b in blocks]))
            return
        for b in blocks:
            b.append(items[k])
            grow(k + 1, blocks)
            b.pop()
        blocks.append([items[k]])
        grow(k + 1, blocks)
        blocks.pop()

    if items:
        grow(0, [])
    return tuple(results)


def partition_equilibrium(net: Network, params: GameParams,
                          partition: Partition,
                          analysis: Optional[FlowAnalysis] = None
                          ) -> EquilibriumProfile:
    """Region III equilibrium from a partition of the aligned cut.

    The defender plays the Prop3 mix.  The attacker spreads over the block
    attacks mu_1..mu_n and pads with mu0 (IIIa, p1 below the threshold
    n*alpha/(n-1)) or with the full cut (IIIb, above it):

        IIIa  each block   1 - alpha/p1,   mu0      1 - n(1 - alpha/p1)
        IIIb  each block   alpha/(p1(n-1)), full cut 1 - n*alpha/(p1(n-1))

    n=1 reduces to Prop3 exactly.
    """
    an = analysis or analyze(net)
    _require_assumptions(an)
    cut = an.assumption2.cut
    check_partition(partition, cut)
    n = len(partition.blocks)
    region = _require_region(params, an.alpha, "III", n=n)

    block_attacks = [Attack(edges=frozenset(b)) for b in partition.blocks]
    mu_min = Attack(edges=frozenset(cut.edges))
    if region.tag == "IIIa":
        p_block = 1 - an.alpha / params.p1
        rest = 1 - n * p_block
        atoms = [(mu, p_block) for mu in block_attacks]
        if rest > 0:
            atoms.append((MU0, rest))
        construction = "Prop9a"
    else:
        p_block = an.alpha / (params.p1 * (n - 1))
        rest = 1 - n * p_block
        atoms = [(mu, p_block) for mu in block_attacks]
        if rest > 0:
            atoms.append((mu_min, rest))
        construction = "Prop9b"
    sigma2 = MixedAttackStrategy(atoms=tuple(atoms))
    sigma1 = MixedFlowStrategy(atoms=(
        (X0, 1 - Fraction(1) / params.p2),
        (an.x_star, Fraction(1) / params.p2),
    ))
    return EquilibriumProfile(sigma1=sigma1, sigma2=sigma2,
                              construction=construction, region=region)


# -------------------------------------------------------------------- budget

def scaled_equilibrium(net: Network, params: GameParams, b1: Fraction,
                       analysis: Optional[FlowAnalysis] = None
                       ) -> EquilibriumProfile:
    """Region III equilibrium for a defender whose every routing action
    must cost at most b1 in transport.

    x_star shrinks uniformly to x_dag with T(x_dag) = b1, played with
    probability t_min/(p2*b1); the slack goes to x0.  Valid exactly for
    t_min/p2 <= b1 <= t_min.  At the lower end the x0 atom vanishes, at
    the upper end this is Prop3.
    """
    from .errors import BudgetOutOfRange
    an = analysis or analyze(net)
    region = _require_region(params, an.alpha, "III")
    _require_assumptions(an)
    lo = an.t_min / params.p2
    hi = an.t_min
    if not lo <= b1 <= hi:
        raise BudgetOutOfRange(
            f"transport budget {b1} outside [{lo}, {hi}] "
            "(t_min/p2 .. t_min); below it no equilibrium keeps the "
            "defender active, above it the cap never binds"
        )
    scale = b1 / an.t_min
    x_dag = FlowAction(paths=tuple(
        PathFlow(nodes=pf.nodes, amount=pf.amount * scale)
        for pf in an.x_star.paths
    ))
    q = an.t_min / (params.p2 * b1)
    atoms: list[tuple[FlowAction, Fraction]] = []
    if q < 1:
        atoms.append((X0, 1 - q))
    atoms.append((x_dag, q))
    sigma1 = MixedFlowStrategy(atoms=tuple(atoms))
    cut = an.assumption2.cut
    sigma2 = MixedAttackStrategy(atoms=(
        (MU0, an.alpha / params.p1),
        (Attack(edges=frozenset(cut.edges)), 1 - an.alpha / params.p1),
    ))
    return EquilibriumProfile(sigma1=sigma1, sigma2=sigma2,
                              construction="Prop8", region=region)


# ----------------------------------------------------- shared region III law

@dataclass(frozen=True)
class TheoremOneQuantities:
    """Expectations every region III equilibrium shares.

    Whatever mixed equilibrium the players land on, the expected payoffs
    are zero and the six flow expectations below depend only on f_max,
    t_min and the valuations.
    """
    u1: Fraction
    u2: Fraction
    e_flow: Fraction
    e_transport: Fraction
    e_attack_cost: Fraction
    e_effective_flow: Fraction
    e_loss: Fraction
    yield_ratio: Fraction
    zero_sum_value: Fraction


def theorem1_quantities(net: Network, params: GameParams,
                        analysis: Optional[FlowAnalysis] = None
                        ) -> TheoremOneQuantities:
    an = analysis or analyze(net)
    _require_region(params, an.alpha, "III")
    _require_assumptions(an, need_a2=False)
    e_flow = an.f_max / params.p2
    e_transport = an.t_min / params.p2
    e_attack = an.f_max - an.t_min / params.p1
    e_eff = an.t_min / (params.p1 * params.p2)
    return TheoremOneQuantities(
        u1=Fraction(0),
        u2=Fraction(0),
        e_flow=e_flow,
        e_transport=e_transport,
        e_attack_cost=e_attack,
        e_effective_flow=e_eff,
        e_loss=(an.f_max - an.t_min / params.p1) / params.p2,
        yield_ratio=an.t_min / (params.p1 * an.f_max),
        zero_sum_value=(an.f_max - an.t_min / params.p1) / params.p2,
    )


# -------------------------------------------------------- equilibrium checks

@dataclass(frozen=True)
class CutEdgeStat:
    edge_index: int
    expected_flow: Fraction
    target_flow: Fraction
    flow_matches: bool
    attack_prob: Fraction
    target_attack_prob: Fraction
    attack_matches: bool


@dataclass(frozen=True)
class CutEdgeStatistics:
    """Per-edge law on a minimum cut under a region III equilibrium.

    Expected flow on cut edge e must be capacity(e)/p2.  When the attacker
    support touches only cut edges, each cut edge is hit with probability
    1 - alpha/p1; `attack_target_applicable` records whether that premise
    holds for the strategy at hand.
    """
    edges: tuple[CutEdgeStat, ...]
    attack_target_applicable: bool


def cut_edge_statistics(net: Network, params: GameParams,
                        sigma1: MixedFlowStrategy,
                        sigma2: MixedAttackStrategy,
                        cut: CutSet,
                        analysis: Optional[FlowAnalysis] = None
                        ) -> CutEdgeStatistics:
    from .netmodel import edge_flows
    an = analysis or analyze(net)
    cut_set = set(cut.edges)
    applicable = all(set(mu.edges) <= cut_set for mu, _ in sigma2.atoms)
    target_attack = 1 - an.alpha / params.p1
    stats = []
    for k in cut.edges:
        e_flow = sum((p * edge_flows(net, x)[k] for x, p in sigma1.atoms),
                     Fraction(0))
        a_prob = sum((q for mu, q in sigma2.atoms if k in mu.edges),
                     Fraction(0))
        target_flow = net.edges[k].capacity / params.p2
        stats.append(CutEdgeStat(
            edge_index=k,
            expected_flow=e_flow,
            target_flow=target_flow,
            flow_matches=(e_flow == target_flow),
            attack_prob=a_prob,
            target_attack_prob=target_attack,
            attack_matches=(applicable and a_prob == target_attack),
        ))
    return CutEdgeStatistics(edges=tuple(stats),
                             attack_target_applicable=applicable)


@dataclass(frozen=True)
class ProbabilityBound:
    label: str
    prob: Fraction
    bound: Fraction
    holds: bool


@dataclass(frozen=True)
class ProbabilityBounds:
    """Caps on the distinguished atoms in any region III equilibrium:
    x0 at most 1 - 1/p2, x_star at most 1/p2, mu0 at most alpha/p1 and
    the full-cut attack at most 1 - alpha/p1."""
    bounds: tuple[ProbabilityBound, ...]
    holds: bool


def check_probability_bounds(net: Network, params: GameParams,
                             sigma1: MixedFlowStrategy,
                             sigma2: MixedAttackStrategy,
                             analysis: Optional[FlowAnalysis] = None
                             ) -> ProbabilityBounds:
    an = analysis or analyze(net)
    cut = an.assumption2.cut if an.assumption2.holds else an.min_cut
    mu_min = frozenset(cut.edges)

    def flow_prob(target: FlowAction) -> Fraction:
        return sum((p for x, p in sigma1.atoms if flow_actions_equal(x, target)),
                   Fraction(0))

    def attack_prob(target: frozenset[int]) -> Fraction:
        return sum((q for mu, q in sigma2.atoms if mu.edges == target),
                   Fraction(0))

    entries = [
        ProbabilityBound("x0", flow_prob(X0), 1 - Fraction(1) / params.p2, False),
        ProbabilityBound("x_star", flow_prob(an.x_star),
                         Fraction(1) / params.p2, False),
        ProbabilityBound("mu0", attack_prob(frozenset()),
                         an.alpha / params.p1, False),
        ProbabilityBound("mu_min", attack_prob(mu_min),
                         1 - an.alpha / params.p1, False),
    ]
    entries = [
        ProbabilityBound(e.label, e.prob, e.bound, e.prob <= e.bound)
        for e in entries
    ]
    return ProbabilityBounds(bounds=tuple(entries),
                             holds=all(e.holds for e in entries))


# ----------------------------------------------------------------- JSON I/O

def region_to_dict(region: Region) -> dict:
    out: dict = {"tag": region.tag}
    if region.n is not None:
        out["n"] = region.n
    return out


def profile_to_dict(net: Network, profile: EquilibriumProfile) -> dict:
    return {
        "construction": profile.construction,
        "region": region_to_dict(profile.region),
        "sigma1": flow_strategy_to_dict(profile.sigma1),
        "sigma2": attack_strategy_to_dict(net, profile.sigma2),
    }


def partition_from_dict(net: Network, raw: Mapping) -> Partition:
    if not isinstance(raw, Mapping) or "blocks" not in raw:
        raise InvalidPartition("partition description must be {'blocks': [...]}")
    blocks = []
    for k, b in enumerate(raw["blocks"]):
        if "edge_index" in b:
            idx = list(b["edge_index"])
            for i in idx:
                if not isinstance(i, int) or not 0 <= i < len(net.edges):
                    raise InvalidPartition(f"block {k}: bad edge index {i!r}")
        elif "edges" in b:
            idx = [resolve_edge_pair(net, t, h) for t, h in b["edges"]]
        else:
            raise InvalidPartition(f"block {k} needs 'edges' or 'edge_index'")
        blocks.append(idx)
    return Partition.of(blocks)


def partition_to_dict(net: Network, partition: Partition) -> dict:
    return {
        "blocks": [
            {"edges": [[net.edges[i].tail, net.edges[i].head] for i in block],
             "edge_index": list(block)}
            for block in partition.blocks
        ]
    }
