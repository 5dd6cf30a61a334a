"""Exact verification of arbitrary mixed strategy pairs.

Two best-response oracles bound what each player could gain by deviating:

  * the defender's best reply to a mixed attack is a linear program over
    all simple s-t paths (a path is worth p1 times its survival
    probability minus its cost, per unit), solved here by an exact
    rational simplex;
  * the attacker's best reply to a mixed flow is found by exhaustive
    enumeration of edge subsets.

Both run in Fraction arithmetic, so the reported gaps

    gap_i = (best reply value of player i) - (expected payoff of player i)

are exact nonnegative rationals and a profile is an equilibrium exactly
when both gaps are zero.  On top of the gaps, the verifier evaluates the
structural laws that region III equilibria must satisfy: the shared
expectation values, support conditions, probability bounds, minimax
identities and the zero-sum transform.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .equilibria import (
    MU0,
    X0,
    ProbabilityBounds,
    check_probability_bounds,
    classify_region,
    theorem1_quantities,
)
from .errors import TooManyEdges
from .flowopt import FlowAnalysis, analyze, enumerate_paths, path_cost
from .netmodel import (
    Attack,
    FlowAction,
    GameParams,
    MixedAttackStrategy,
    MixedFlowStrategy,
    Network,
    PathFlow,
    attack_cost,
    edge_flows,
    effective_flow,
    expected_payoffs,
    flow_value,
    loss,
    path_edge_indices,
    payoff_u1,
    payoff_u2,
    transport_cost,
    zero_sum_payoff,
)

DEFAULT_EDGE_LIMIT = 24


# ------------------------------------------------------------ exact simplex

def _simplex_max(c: Sequence[Fraction], rows: Sequence[Sequence[Fraction]],
                 rhs: Sequence[Fraction]) -> tuple[Fraction, list[Fraction]]:
    """Maximize c.x subject to rows.x <= rhs, x >= 0, rhs >= 0.

    Primal simplex from the slack basis with Bland's rule, so it cannot
    cycle.  All arithmetic is exact.
    """
    m, n = len(rows), len(c)
    tab = [
        [Fraction(f) for f in rows[i]]
        + [Fraction(1) if k == i else Fraction(0) for k in range(m)]
        + [Fraction(rhs[i])]
        for i in range(m)
    ]
    z = [-Fraction(f) for f in c] + [Fraction(0)] * (m + 1)
    basis = [n + i for i in range(m)]
    while True:
        enter = next((j for j in range(n + m) if z[j] < 0), None)
        if enter is None:
            break
        leave = -1
        best_ratio: Optional[Fraction] = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if (best_ratio is None or ratio < best_ratio
                        or (ratio == best_ratio and basis[i] < basis[leave])):
                    best_ratio = ratio
                    leave = i
        assert leave >= 0, "defender LP unbounded; capacities must be finite"
        piv = tab[leave][enter]
        tab[leave] = [v / piv for v in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [a - f * b for a, b in zip(tab[i], tab[leave])]
        if z[enter] != 0:
            f = z[enter]
            z = [a - f * b for a, b in zip(z, tab[leave])]
        basis[leave] = enter
    x = [Fraction(0)] * n
    for i, bi in enumerate(basis):
        if bi < n:
            x[bi] = tab[i][-1]
    return z[-1], x


# ------------------------------------------------------------ best responses

def best_response_flow(net: Network, sigma2: MixedAttackStrategy,
                       params: GameParams,
                       path_limit: Optional[int] = None
                       ) -> tuple[Fraction, FlowAction]:
    """The defender's exact best reply value and a witness action.

    Per unit on path lam the defender earns
    w_lam = p1 * P(lam survives sigma2) - cost(lam); only paths with
    positive weight can help, and capacities couple them into an LP.
    """
    paths = enumerate_paths(net, limit=path_limit)
    cols: list[tuple[tuple[str, ...], frozenset[int], Fraction]] = []
    for nodes in paths:
        idx = frozenset(path_edge_indices(net, nodes))
        surv = sum((q for mu, q in sigma2.atoms if not (idx & mu.edges)),
                   Fraction(0))
        w = params.p1 * surv - path_cost(net, nodes)
        if w > 0:
            cols.append((nodes, idx, w))
    if not cols:
        return Fraction(0), X0
    used_edges = sorted(set().union(*(idx for _, idx, _ in cols)))
    rows = [
        [Fraction(1) if e in idx else Fraction(0) for _, idx, _ in cols]
        for e in used_edges
    ]
    rhs = [net.edges[e].capacity for e in used_edges]
    value, x = _simplex_max([w for _, _, w in cols], rows, rhs)
    witness = FlowAction(paths=tuple(
        PathFlow(nodes=nodes, amount=x[j])
        for j, (nodes, _, _) in enumerate(cols) if x[j] > 0
    ))
    return value, witness


def _attack_scores(net: Network, sigma1: MixedFlowStrategy
                   ) -> list[tuple[Fraction, list[tuple[int, Fraction]]]]:
    """Per sigma1 atom: probability and (path bitmask, amount) pairs."""
    out = []
    for x, p in sigma1.atoms:
        masks = []
        for pf in x.paths:
            mask = 0
            for i in path_edge_indices(net, pf.nodes):
                mask |= 1 << i
            masks.append((mask, pf.amount))
        out.append((p, masks))
    return out


def expected_loss(net: Network, sigma1: MixedFlowStrategy,
                  mu: Attack) -> Fraction:
    return sum((p * loss(net, x, mu) for x, p in sigma1.atoms), Fraction(0))


def best_response_attack(net: Network, sigma1: MixedFlowStrategy,
                         params: GameParams,
                         edge_limit: int = DEFAULT_EDGE_LIMIT,
                         restrict_to: Optional[Iterable[int]] = None,
                         budget: Optional[Fraction] = None
                         ) -> tuple[Fraction, Attack]:
    """The attacker's exact best reply value and a witness attack.

    Exhaustive over all 2^m edge subsets (or subsets of restrict_to, a
    pruning mode meant only for cross-checks, never as the primary
    answer).  A budget caps the admissible attack cost; the empty attack
    always qualifies.  Ties break toward fewer edges, then the smallest
    sorted index tuple, so the witness is deterministic.
    """
    if restrict_to is None:
        universe = list(range(len(net.edges)))
    else:
        universe = sorted(set(restrict_to))
    if len(universe) > edge_limit:
        raise TooManyEdges(
            f"{len(universe)} edges exceeds edge_limit={edge_limit} "
            "for exhaustive attack enumeration"
        )
    atoms = _attack_scores(net, sigma1)
    caps = [e.capacity for e in net.edges]

    best_val: Optional[Fraction] = None
    best_key: Optional[tuple[int, tuple[int, ...]]] = None
    best_set: frozenset[int] = frozenset()
    for mask in range(1 << len(universe)):
        mu_mask = 0
        members = []
        rest = mask
        while rest:
            b = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            members.append(universe[b])
            mu_mask |= 1 << universe[b]
        cost = sum((caps[i] for i in members), Fraction(0))
        if budget is not None and cost > budget:
            continue
        e_loss = Fraction(0)
        for p, paths in atoms:
            hit = Fraction(0)
            for pmask, amt in paths:
                if pmask & mu_mask:
                    hit += amt
            e_loss += p * hit
        val = params.p2 * e_loss - cost
        key = (len(members), tuple(sorted(members)))
        if best_val is None or val > best_val or (val == best_val
                                                  and key < best_key):
            best_val = val
            best_key = key
            best_set = frozenset(members)
    assert best_val is not None
    return best_val, Attack(edges=best_set)


# ------------------------------------------------------------- expectations

def expected_quantities(net: Network, sigma1: MixedFlowStrategy,
                        sigma2: MixedAttackStrategy) -> dict[str, Fraction]:
    """Exact expectations of the five flow quantities under a profile."""
    e_flow = sum((p * flow_value(x) for x, p in sigma1.atoms), Fraction(0))
    e_transport = sum((p * transport_cost(net, x) for x, p in sigma1.atoms),
                      Fraction(0))
    e_attack = sum((q * attack_cost(net, mu) for mu, q in sigma2.atoms),
                   Fraction(0))
    e_eff = Fraction(0)
    for x, p in sigma1.atoms:
        for mu, q in sigma2.atoms:
            e_eff += p * q * flow_value(effective_flow(net, x, mu))
    return {
        "flow": e_flow,
        "transport": e_transport,
        "attack_cost": e_attack,
        "effective_flow": e_eff,
        "loss": e_flow - e_eff,
    }


# ----------------------------------------------------------- support checks

@dataclass(frozen=True)
class SupportChecks:
    """Necessary conditions on region III equilibrium supports.

    lemma3: every routed path in the defender support is a cheapest path.
    prop4: every supported attack costs at most f_max and hits only edges
    saturated by x_star; `prop4_certified` is True when every attacked
    edge was additionally located in an enumerated minimum cut (otherwise
    the saturation screen alone was applied).
    corollary2: every edge of the aligned cut carries flow in some
    defender support action.
    """
    lemma3_holds: bool
    lemma3_violations: tuple[str, ...]
    prop4_holds: bool
    prop4_certified: bool
    prop4_violations: tuple[str, ...]
    corollary2_holds: bool
    corollary2_violations: tuple[str, ...]
    bounds: ProbabilityBounds


def check_support_conditions(net: Network, params: GameParams,
                             sigma1: MixedFlowStrategy,
                             sigma2: MixedAttackStrategy,
                             analysis: Optional[FlowAnalysis] = None
                             ) -> SupportChecks:
    an = analysis or analyze(net)

    lemma3_viol: list[str] = []
    for x, _ in sigma1.atoms:
        for pf in x.paths:
            if pf.amount > 0:
                c = path_cost(net, pf.nodes)
                if c != an.alpha:
                    lemma3_viol.append(
                        f"path {list(pf.nodes)} costs {c}, cheapest is {an.alpha}"
                    )

    star_flows = edge_flows(net, an.x_star)
    cut_union: set[int] = set()
    if an.all_min_cuts is not None:
        for cut in an.all_min_cuts:
            cut_union.update(cut.edges)
    prop4_viol: list[str] = []
    certified = an.all_min_cuts is not None
    for mu, _ in sigma2.atoms:
        c = attack_cost(net, mu)
        if c > an.f_max:
            prop4_viol.append(f"attack {sorted(mu.edges)} costs {c} > f_max={an.f_max}")
        for i in mu.edges:
            if star_flows[i] != net.edges[i].capacity:
                prop4_viol.append(f"edge {i} is not saturated by x_star")
            if an.all_min_cuts is not None and i not in cut_union:
                certified = False

    witness = an.assumption2.cut if an.assumption2.holds else an.min_cut
    coro2_viol: list[str] = []
    for i in witness.edges:
        crossed = any(edge_flows(net, x)[i] > 0 for x, _ in sigma1.atoms)
        if not crossed:
            coro2_viol.append(f"cut edge {i} carries no support flow")

    bounds = check_probability_bounds(net, params, sigma1, sigma2, analysis=an)
    return SupportChecks(
        lemma3_holds=not lemma3_viol,
        lemma3_violations=tuple(lemma3_viol),
        prop4_holds=not prop4_viol,
        prop4_certified=certified,
        prop4_violations=tuple(prop4_viol),
        corollary2_holds=not coro2_viol,
        corollary2_violations=tuple(coro2_viol),
        bounds=bounds,
    )


# --------------------------------------------------------------- lemma four

@dataclass(frozen=True)
class Lemma4Report:
    """Randomized check that destroyed flow never exceeds attack cost,
    with equality for x_star against subsets of the aligned cut."""
    trials: int
    seed: int
    inequality_violations: int
    equality_trials: int
    equality_violations: int


def check_lemma4(net: Network, trials: int = 1000, seed: int = 0,
                 analysis: Optional[FlowAnalysis] = None) -> Lemma4Report:
    an = analysis or analyze(net)
    rng = random.Random(seed)
    paths = enumerate_paths(net)
    ineq_bad = 0
    eq_trials = 0
    eq_bad = 0
    cut = an.assumption2.cut if an.assumption2.holds else an.min_cut
    for _ in range(trials):
        x = _random_feasible_flow(net, paths, rng)
        mu = Attack(edges=frozenset(
            i for i in range(len(net.edges)) if rng.random() < 0.3
        ))
        if loss(net, x, mu) > attack_cost(net, mu):
            ineq_bad += 1
        if cut.edges:
            sub = frozenset(i for i in cut.edges if rng.random() < 0.5)
            eq_trials += 1
            mu_sub = Attack(edges=sub)
            if loss(net, an.x_star, mu_sub) != attack_cost(net, mu_sub):
                eq_bad += 1
    return Lemma4Report(trials=trials, seed=seed,
                        inequality_violations=ineq_bad,
                        equality_trials=eq_trials,
                        equality_violations=eq_bad)


def _random_feasible_flow(net: Network, paths: tuple[tuple[str, ...], ...],
                          rng: random.Random) -> FlowAction:
    """A random path flow, scaled back onto the capacity polytope."""
    chosen = []
    for nodes in paths:
        if rng.random() < 0.5:
            amt = Fraction(rng.randint(0, 8), rng.randint(1, 4))
            if amt > 0:
                chosen.append(PathFlow(nodes=nodes, amount=amt))
    x = FlowAction(paths=tuple(chosen))
    flows = edge_flows(net, x)
    factor = Fraction(1)
    for i, f in flows.items():
        cap = net.edges[i].capacity
        if f > cap:
            factor = min(factor, cap / f) if cap > 0 else Fraction(0)
    if factor < 1:
        x = FlowAction(paths=tuple(
            PathFlow(nodes=pf.nodes, amount=pf.amount * factor)
            for pf in x.paths if pf.amount * factor > 0
        ))
    return x


# ------------------------------------------------------------ minimax views

@dataclass(frozen=True)
class MinimaxEntry:
    value: Fraction
    target: Fraction
    matches: bool
    witness: Optional[str] = None


@dataclass(frozen=True)
class MinimaxChecks:
    """Worst-case payoff identities around a region III profile.

    Attacking the whole aligned cut wipes every routed path, so the
    defender's floor against sigma1 is minus the expected transport
    spend; against sigma2 no flow action beats zero; idling guarantees
    each player exactly zero.
    """
    defender_floor: MinimaxEntry
    defender_best_reply: MinimaxEntry
    maximin_u1: MinimaxEntry
    maximin_u2: MinimaxEntry


def minimax_checks(net: Network, params: GameParams,
                   sigma1: MixedFlowStrategy, sigma2: MixedAttackStrategy,
                   edge_limit: int = DEFAULT_EDGE_LIMIT,
                   path_limit: Optional[int] = None) -> MinimaxChecks:
    m = len(net.edges)
    if m > edge_limit:
        raise TooManyEdges(
            f"{m} edges exceeds edge_limit={edge_limit} for minimax checks"
        )

    worst_val: Optional[Fraction] = None
    worst_mu: frozenset[int] = frozenset()
    for mask in range(1 << m):
        mu = Attack(edges=frozenset(i for i in range(m) if mask >> i & 1))
        val = sum((p * payoff_u1(net, x, mu, params) for x, p in sigma1.atoms),
                  Fraction(0))
        if worst_val is None or val < worst_val:
            worst_val = val
            worst_mu = mu.edges
    e_transport = sum((p * transport_cost(net, x) for x, p in sigma1.atoms),
                      Fraction(0))
    assert worst_val is not None
    floor = MinimaxEntry(value=worst_val, target=-e_transport,
                         matches=(worst_val == -e_transport),
                         witness=str(sorted(worst_mu)))

    br1_value, br1_witness = best_response_flow(net, sigma2, params,
                                                path_limit=path_limit)
    best_reply = MinimaxEntry(value=br1_value, target=Fraction(0),
                              matches=(br1_value == 0),
                              witness=str([list(pf.nodes)
                                           for pf in br1_witness.paths]))

    idle_floor = min(
        payoff_u1(net, X0, Attack(edges=frozenset(
            i for i in range(m) if mask >> i & 1)), params)
        for mask in range(1 << m)
    )
    mm1 = MinimaxEntry(value=idle_floor, target=Fraction(0),
                       matches=(idle_floor == 0), witness="x0")

    guarantee = max(
        -attack_cost(net, Attack(edges=frozenset(
            i for i in range(m) if mask >> i & 1)))
        for mask in range(1 << m)
    )
    mm2 = MinimaxEntry(value=guarantee, target=Fraction(0),
                       matches=(guarantee == 0), witness="mu0")
    return MinimaxChecks(defender_floor=floor, defender_best_reply=best_reply,
                         maximin_u1=mm1, maximin_u2=mm2)


# ---------------------------------------------------------- zero-sum bridge

@dataclass(frozen=True)
class ZeroSumCheck:
    """The affine transform linking u1 to the zero-sum payoff, checked on
    the support, plus the expected zero-sum value against its closed form
    (region III with cheapest-path routing only)."""
    identity_holds: bool
    value: Fraction
    target: Optional[Fraction]
    matches: Optional[bool]


def zero_sum_value_check(net: Network, params: GameParams,
                         sigma1: MixedFlowStrategy,
                         sigma2: MixedAttackStrategy,
                         analysis: Optional[FlowAnalysis] = None
                         ) -> ZeroSumCheck:
    an = analysis or analyze(net)
    identity = True
    value = Fraction(0)
    for x, p in sigma1.atoms:
        for mu, q in sigma2.atoms:
            zs = zero_sum_payoff(net, x, mu, params)
            value += p * q * zs
            lhs = params.p1 * zs - (params.p1 / params.p2) * attack_cost(net, mu)
            if lhs != payoff_u1(net, x, mu, params):
                identity = False
    region = classify_region(params, an.alpha)
    if region.tag == "III" and an.assumption1.holds:
        target = (an.f_max - an.t_min / params.p1) / params.p2
        return ZeroSumCheck(identity_holds=identity, value=value,
                            target=target, matches=(value == target))
    return ZeroSumCheck(identity_holds=identity, value=value,
                        target=None, matches=None)


# ------------------------------------------------------------------- report

@dataclass(frozen=True)
class VerificationReport:
    u1: Fraction
    u2: Fraction
    br1_value: Fraction
    br1_witness: FlowAction
    br2_value: Fraction
    br2_witness: Attack
    gap1: Fraction
    gap2: Fraction
    eps: Fraction
    is_equilibrium: bool
    region_tag: str
    theorem1_residuals: Optional[dict[str, Fraction]]
    support_checks: Optional[SupportChecks]


def verify_equilibrium(net: Network, params: GameParams,
                       sigma1: MixedFlowStrategy,
                       sigma2: MixedAttackStrategy,
                       eps: Fraction = Fraction(0),
                       edge_limit: int = DEFAULT_EDGE_LIMIT,
                       path_limit: Optional[int] = None,
                       attack_budget: Optional[Fraction] = None,
                       analysis: Optional[FlowAnalysis] = None
                       ) -> VerificationReport:
    """Measure both players' exact deviation gaps for a strategy pair.

    The pair is an equilibrium exactly when both gaps vanish; a tolerance
    eps > 0 only relaxes the final verdict, never the arithmetic.  An
    attack_budget verifies against the game where the attacker may only
    play actions costing at most that much.  In region III (with
    cheapest-path routing available) the report also carries the
    residuals of the shared expectation values and the support condition
    checks.
    """
    an = analysis or analyze(net)
    u1, u2 = expected_payoffs(net, sigma1, sigma2, GameParams(params.p1, params.p2))
    br1_value, br1_witness = best_response_flow(net, sigma2, params,
                                                path_limit=path_limit)
    br2_value, br2_witness = best_response_attack(net, sigma1, params,
                                                  edge_limit=edge_limit,
                                                  budget=attack_budget)
    gap1 = br1_value - u1
    gap2 = br2_value - u2
    region = classify_region(params, an.alpha)

    residuals: Optional[dict[str, Fraction]] = None
    if region.tag == "III" and an.assumption1.holds:
        law = theorem1_quantities(net, params, analysis=an)
        actual = expected_quantities(net, sigma1, sigma2)
        residuals = {
            "u1": u1 - law.u1,
            "u2": u2 - law.u2,
            "e_flow": actual["flow"] - law.e_flow,
            "e_transport": actual["transport"] - law.e_transport,
            "e_attack_cost": actual["attack_cost"] - law.e_attack_cost,
            "e_effective_flow": actual["effective_flow"] - law.e_effective_flow,
            "e_loss": actual["loss"] - law.e_loss,
        }

    support: Optional[SupportChecks] = None
    if region.tag == "III":
        support = check_support_conditions(net, params, sigma1, sigma2,
                                           analysis=an)

    return VerificationReport(
        u1=u1, u2=u2,
        br1_value=br1_value, br1_witness=br1_witness,
        br2_value=br2_value, br2_witness=br2_witness,
        gap1=gap1, gap2=gap2, eps=eps,
        is_equilibrium=(gap1 <= eps and gap2 <= eps),
        region_tag=region.tag,
        theorem1_residuals=residuals,
        support_checks=support,
    )


def support_checks_to_dict(sc: SupportChecks) -> dict:
    return {
        "lemma3": {"holds": sc.lemma3_holds,
                   "violations": list(sc.lemma3_violations)},
        "prop4": {"holds": sc.prop4_holds,
                  "certified": sc.prop4_certified,
                  "violations": list(sc.prop4_violations)},
        "corollary2": {"holds": sc.corollary2_holds,
                       "violations": list(sc.corollary2_violations)},
        "prop6_bounds": {
            "holds": sc.bounds.holds,
            "entries": [
                {"label": b.label, "prob": str(b.prob),
                 "bound": str(b.bound), "holds": b.holds}
                for b in sc.bounds.bounds
            ],
        },
    }


def report_to_dict(net: Network, report: VerificationReport) -> dict:
    return {
        "u1": str(report.u1),
        "u2": str(report.u2),
        "br1_value": str(report.br1_value),
        "br1_witness": [
            {"nodes": list(pf.nodes), "amount": str(pf.amount)}
            for pf in report.br1_witness.paths
        ],
        "br2_value": str(report.br2_value),
        "br2_witness": {
            "edges": [[net.edges[i].tail, net.edges[i].head]
                      for i in sorted(report.br2_witness.edges)],
            "edge_index": sorted(report.br2_witness.edges),
        },
        "gap1": str(report.gap1),
        "gap2": str(report.gap2),
        "eps": str(report.eps),
        "is_equilibrium": report.is_equilibrium,
        "region": report.region_tag,
        "theorem1_residuals": (
            None if report.theorem1_residuals is None
            else {k: str(v) for k, v in report.theorem1_residuals.items()}
        ),
        "support_checks": (
            None if report.support_checks is None
            else support_checks_to_dict(report.support_checks)
        ),
    }
