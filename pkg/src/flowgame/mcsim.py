"""Monte-Carlo play of a mixed strategy pair, aimed at validation.

Both players' atoms are sampled independently per trial and the seven
observable quantities (payoffs, routed flow, transport cost, attack cost,
surviving flow, destroyed flow) are averaged with standard errors and
z-scores against analytic targets: the shared region III equilibrium
values where they apply, the exact profile expectations otherwise.

Determinism contract: trial i draws from its own Philox stream at
counter i * 2**64 under the run's key, so results are bit-identical for a
given (seed, trials) pair regardless of platform, and extending a run
never changes earlier trials.  Per-trial outcomes come from an exact
rational table computed once and rounded once, and the accumulation is
sequential Kahan summation, so repeated runs agree to the last bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from numpy.random import Philox

from .equilibria import classify_region, theorem1_quantities
from .errors import InputError
from .flowopt import FlowAnalysis, analyze
from .netmodel import (
    Attack,
    FlowAction,
    GameParams,
    MixedAttackStrategy,
    MixedFlowStrategy,
    Network,
    attack_cost,
    effective_flow,
    flow_value,
    loss,
    payoff_u1,
    payoff_u2,
    transport_cost,
)

QUANTITIES = ("u1", "u2", "flow", "transport", "attack_cost",
              "effective_flow", "loss")

_SCALE = 1 << 64


def _thresholds(probs: list[Fraction]) -> list[tuple[int, int]]:
    """Cumulative atom probabilities as (num << 64, den) pairs, so that
    a uint64 draw d selects the first atom with d * den < num << 64."""
    out = []
    running = Fraction(0)
    for p in probs:
        running += p
        out.append((running.numerator * _SCALE, running.denominator))
    return out


def _select(draw: int, thresholds: list[tuple[int, int]]) -> int:
    for k, (num_scaled, den) in enumerate(thresholds):
        if draw * den < num_scaled:
            return k
    return len(thresholds) - 1


def sample_play(net: Network, sigma1: MixedFlowStrategy,
                sigma2: MixedAttackStrategy,
                bit_generator) -> tuple[FlowAction, Attack]:
    """Draw one (flow action, attack) pair from a numpy bit generator."""
    raw = bit_generator.random_raw(2)
    t1 = _thresholds([p for _, p in sigma1.atoms])
    t2 = _thresholds([q for _, q in sigma2.atoms])
    x = sigma1.atoms[_select(int(raw[0]), t1)][0]
    mu = sigma2.atoms[_select(int(raw[1]), t2)][0]
    return x, mu


class _Kahan:
    __slots__ = ("total", "carry")

    def __init__(self) -> None:
        self.total = 0.0
        self.carry = 0.0

    def add(self, value: float) -> None:
        y = value - self.carry
        t = self.total + y
        self.carry = (t - self.total) - y
        self.total = t


@dataclass(frozen=True)
class SimStat:
    mean: float
    se: float
    target: float
    z: float


@dataclass(frozen=True)
class SimResult:
    trials: int
    seed: int
    target_source: str
    stats: dict[str, SimStat]


def monte_carlo(net: Network, params: GameParams,
                sigma1: MixedFlowStrategy, sigma2: MixedAttackStrategy,
                trials: int, seed: int,
                analysis: Optional[FlowAnalysis] = None) -> SimResult:
    if trials < 2:
        raise InputError("need at least 2 trials for standard errors")
    an = analysis or analyze(net)

    table: list[list[tuple[float, ...]]] = []
    for x, _ in sigma1.atoms:
        row = []
        for mu, _ in sigma2.atoms:
            row.append((
                float(payoff_u1(net, x, mu, params)),
                float(payoff_u2(net, x, mu, params)),
                float(flow_value(x)),
                float(transport_cost(net, x)),
                float(attack_cost(net, mu)),
                float(flow_value(effective_flow(net, x, mu))),
                float(loss(net, x, mu)),
            ))
        table.append(row)

    t1 = _thresholds([p for _, p in sigma1.atoms])
    t2 = _thresholds([q for _, q in sigma2.atoms])

    sums = [_Kahan() for _ in QUANTITIES]
    sqs = [_Kahan() for _ in QUANTITIES]
    for i in range(trials):
        raw = Philox(key=seed, counter=i << 64).random_raw(2)
        k1 = _select(int(raw[0]), t1)
        k2 = _select(int(raw[1]), t2)
        outcome = table[k1][k2]
        for q in range(7):
            v = outcome[q]
            sums[q].add(v)
            sqs[q].add(v * v)

    targets = _targets(net, params, sigma1, sigma2, an)
    stats: dict[str, SimStat] = {}
    for q, name in enumerate(QUANTITIES):
        mean = sums[q].total / trials
        var = max(0.0, (sqs[q].total - trials * mean * mean) / (trials - 1))
        se = math.sqrt(var / trials)
        target = targets[1][name]
        if se > 0:
            z = (mean - target) / se
        else:
            z = 0.0 if mean == target else math.inf
        stats[name] = SimStat(mean=mean, se=se, target=target, z=z)
    return SimResult(trials=trials, seed=seed, target_source=targets[0],
                     stats=stats)


def _targets(net: Network, params: GameParams, sigma1: MixedFlowStrategy,
             sigma2: MixedAttackStrategy, an: FlowAnalysis
             ) -> tuple[str, dict[str, float]]:
    region = classify_region(params, an.alpha)
    if region.tag == "III" and an.assumption1.holds:
        law = theorem1_quantities(net, params, analysis=an)
        return "region3_invariants", {
            "u1": float(law.u1),
            "u2": float(law.u2),
            "flow": float(law.e_flow),
            "transport": float(law.e_transport),
            "attack_cost": float(law.e_attack_cost),
            "effective_flow": float(law.e_effective_flow),
            "loss": float(law.e_loss),
        }
    from .netmodel import expected_payoffs
    from .verify import expected_quantities
    u1, u2 = expected_payoffs(net, sigma1, sigma2, params)
    ex = expected_quantities(net, sigma1, sigma2)
    return "exact_expectation", {
        "u1": float(u1),
        "u2": float(u2),
        "flow": float(ex["flow"]),
        "transport": float(ex["transport"]),
        "attack_cost": float(ex["attack_cost"]),
        "effective_flow": float(ex["effective_flow"]),
        "loss": float(ex["loss"]),
    }


def sim_result_to_dict(result: SimResult) -> dict:
    return {
        "trials": result.trials,
        "seed": result.seed,
        "target_source": result.target_source,
        "quantities": {
            name: {
                "mean": stat.mean,
                "se": stat.se,
                "target": stat.target,
                "z": stat.z,
            }
            for name, stat in result.stats.items()
        },
    }
