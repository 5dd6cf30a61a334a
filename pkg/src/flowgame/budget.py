"""Budgeted play: how little each player can afford to spend per action.

Defender side: in region III the expected transport spend at equilibrium
is t_min/p2, and a per-action transport cap b1 is workable exactly down to
that value (the scaled construction in equilibria handles the profile).

Attacker side: expected attack spend at equilibrium is f_max - t_min/p1,
a hard floor on any per-action budget in expectation.  The per-action cost
itself is driven down by partitioning the aligned cut into n blocks: each
supported attack then costs at most the largest block capacity.  The best
the attacker can do is

    n_star = min( floor(p1 / (p1 - alpha)), number of cut edges )

blocks (more blocks would push the block probabilities past 1), with the
blocks chosen to minimize the maximum block capacity.  That min-max
partition problem is solved exactly by branch and bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .equilibria import (
    EquilibriumProfile,
    Partition,
    _require_assumptions,
    _require_region,
    partition_equilibrium,
)
from .errors import InvalidPartition, TooManyEdges
from .flowopt import CutSet, FlowAnalysis, analyze
from .netmodel import GameParams, Network

MAX_PARTITION_ITEMS = 24


def min_defender_budget(net: Network, params: GameParams,
                        analysis: Optional[FlowAnalysis] = None) -> Fraction:
    """t_min/p2: the smallest per-action transport cap that still admits
    an equilibrium with an active defender."""
    an = analysis or analyze(net)
    _require_region(params, an.alpha, "III")
    _require_assumptions(an, need_a2=False)
    return an.t_min / params.p2


def attacker_budget_lower_bound(net: Network, params: GameParams,
                                analysis: Optional[FlowAnalysis] = None
                                ) -> Fraction:
    """f_max - t_min/p1: the attacker's expected equilibrium spend, which
    no per-action budget can undercut in expectation."""
    an = analysis or analyze(net)
    _require_region(params, an.alpha, "III")
    _require_assumptions(an, need_a2=False)
    return an.f_max - an.t_min / params.p1


def _working_cut(an: FlowAnalysis) -> CutSet:
    return an.assumption2.cut if an.assumption2.holds else an.min_cut


def optimal_partition_size(net: Network, params: GameParams,
                           analysis: Optional[FlowAnalysis] = None) -> int:
    """The largest workable block count, capped by the cut size.

    Block probabilities in the padded-with-mu0 construction are
    1 - alpha/p1 each, so n of them fit only while
    n <= p1/(p1 - alpha)."""
    an = analysis or analyze(net)
    _require_region(params, an.alpha, "III")
    ratio = params.p1 / (params.p1 - an.alpha)
    return min(math.floor(ratio), len(_working_cut(an).edges))


@dataclass(frozen=True)
class PartitionSolution:
    """Min-max partition of a capacity list: blocks hold item positions,
    z_star is the largest block sum."""
    blocks: tuple[tuple[int, ...], ...]
    z_star: Fraction


def solve_min_max_partition(caps: Sequence[Fraction], n: int
                            ) -> PartitionSolution:
    """Partition caps into exactly n blocks minimizing the max block sum.

    Exact branch and bound.  Items are assigned in order; symmetry is
    broken by only opening block k after blocks 0..k-1 are nonempty, and
    the incumbent is replaced on strict improvement only, so the witness
    is the lexicographically first optimal assignment.
    """
    items = [Fraction(c) for c in caps]
    size = len(items)
    if not 1 <= n <= size:
        raise InvalidPartition(
            f"cannot split {size} items into {n} nonempty blocks"
        )
    if size > MAX_PARTITION_ITEMS:
        raise TooManyEdges(
            f"{size} items exceeds {MAX_PARTITION_ITEMS} "
            "for exact partitioning"
        )
    lower = max(max(items), sum(items, Fraction(0)) / n)
    sums = [Fraction(0)] * n
    assign = [0] * size
    best_value: Optional[Fraction] = None
    best_assign: Optional[list[int]] = None

    def dfs(i: int, opened: int, current_max: Fraction) -> None:
        nonlocal best_value, best_assign
        if best_value is not None and best_value == lower:
            return
        if i == size:
            if opened == n and (best_value is None or current_max < best_value):
                best_value = current_max
                best_assign = assign.copy()
            return
        if size - i < n - opened:
            return
        top = min(opened, n - 1)
        for j in range(top + 1):
            new_sum = sums[j] + items[i]
            if best_value is not None and max(current_max, new_sum) >= best_value:
                continue
            sums[j] += items[i]
            assign[i] = j
            dfs(i + 1, opened if j < opened else opened + 1,
                max(current_max, new_sum))
            sums[j] -= items[i]

    dfs(0, 0, Fraction(0))
    assert best_assign is not None and best_value is not None
    blocks: list[list[int]] = [[] for _ in range(n)]
    for pos, j in enumerate(best_assign):
        blocks[j].append(pos)
    return PartitionSolution(blocks=tuple(tuple(b) for b in blocks),
                             z_star=best_value)


@dataclass(frozen=True)
class BudgetAnalysis:
    b1_star: Fraction
    b2_lower: Fraction
    n_star: int
    n: int
    z_star: Fraction
    partition: Partition
    cut: CutSet


def analyze_budget(net: Network, params: GameParams,
                   analysis: Optional[FlowAnalysis] = None,
                   n: Optional[int] = None) -> BudgetAnalysis:
    """Both budget floors plus the min-max partition at block count n
    (default: n_star)."""
    an = analysis or analyze(net)
    _require_region(params, an.alpha, "III")
    _require_assumptions(an, need_a2=False)
    cut = _working_cut(an)
    n_star = optimal_partition_size(net, params, analysis=an)
    count = n_star if n is None else n
    caps = [net.edges[i].capacity for i in cut.edges]
    sol = solve_min_max_partition(caps, count)
    partition = Partition.of([
        tuple(cut.edges[p] for p in block) for block in sol.blocks
    ])
    return BudgetAnalysis(
        b1_star=an.t_min / params.p2,
        b2_lower=an.f_max - an.t_min / params.p1,
        n_star=n_star,
        n=count,
        z_star=sol.z_star,
        partition=partition,
        cut=cut,
    )


def partition_for_cut(net: Network, cut: CutSet, n: int
                      ) -> tuple[Partition, Fraction]:
    """Min-max partition of an arbitrary cut's edges into n blocks."""
    caps = [net.edges[i].capacity for i in cut.edges]
    sol = solve_min_max_partition(caps, n)
    partition = Partition.of([
        tuple(cut.edges[p] for p in block) for block in sol.blocks
    ])
    return partition, sol.z_star


def min_budget_partition_equilibrium(net: Network, params: GameParams,
                                     analysis: Optional[FlowAnalysis] = None,
                                     n: Optional[int] = None
                                     ) -> tuple[BudgetAnalysis,
                                                EquilibriumProfile]:
    """The budget analysis together with the partition equilibrium it
    certifies: every supported attack costs at most z_star."""
    an = analysis or analyze(net)
    ba = analyze_budget(net, params, analysis=an, n=n)
    profile = partition_equilibrium(net, params, ba.partition, analysis=an)
    return ba, profile


def budget_to_dict(net: Network, ba: BudgetAnalysis) -> dict:
    from .equilibria import partition_to_dict
    from .flowopt import cut_to_dict
    return {
        "b1_star": str(ba.b1_star),
        "b2_lower": str(ba.b2_lower),
        "n_star": ba.n_star,
        "n": ba.n,
        "z_star": str(ba.z_star),
        "partition": partition_to_dict(net, ba.partition),
        "cut": cut_to_dict(net, ba.cut),
    }
