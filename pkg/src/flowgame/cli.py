"""Command line front end.

Subcommands:

    analyze      flow quantities, cuts and structural checks of a network
    equilibrium  closed-form equilibrium profile for given valuations
    verify       exact deviation gaps for a supplied strategy pair
    budget       budget floors and the min-max cut partition
    simulate     Monte-Carlo play with standard errors and z-scores
    export-dot   Graphviz rendering of the network

Exit codes: 0 success, 1 bad input (files, flags, strategies), 2 model
errors (wrong region, boundary parameters, failed assumptions, size
limits), 3 verification failure (the supplied pair is not an equilibrium
at the requested tolerance).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from . import __version__
from .budget import analyze_budget, budget_to_dict, partition_for_cut
from .equilibria import (
    classify_region,
    partition_equilibrium,
    partition_from_dict,
    partition_to_dict,
    profile_to_dict,
    region1_equilibrium,
    region2_equilibrium,
    region3_equilibrium,
    scaled_equilibrium,
)
from .errors import BoundaryParameters, InputError, InvalidPartition, ModelError
from .flowopt import (
    DEFAULT_NODE_LIMIT,
    analysis_to_dict,
    analyze,
    cut_to_dict,
    min_cut,
)
from .mcsim import monte_carlo, sim_result_to_dict
from .netmodel import (
    GameParams,
    edge_flows,
    load_attack_strategy,
    load_flow_strategy,
    load_network,
    rational,
)
from .verify import DEFAULT_EDGE_LIMIT, report_to_dict, verify_equilibrium


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems with exit code 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _rational_arg(text: str) -> Fraction:
    try:
        return rational(text)
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("network", help="network description (JSON file)")
    sub.add_argument("-o", "--output", default=None,
                     help="write the result here instead of stdout")


def _add_params(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--p1", type=_rational_arg, required=True,
                     help="defender value per unit delivered (rational)")
    sub.add_argument("--p2", type=_rational_arg, required=True,
                     help="attacker value per unit destroyed (rational)")


def build_parser() -> _Parser:
    parser = _Parser(prog="flowgame",
                     description="solve and verify the flow-security game")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("analyze", parents=[], help="network flow analysis")
    _add_common(p)
    p.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT,
                   help="skip cut enumeration beyond this many nodes")
    p.add_argument("--path-limit", type=int, default=None,
                   help="cap on simple path enumeration")
    p.set_defaults(handler=_cmd_analyze)

    p = subs.add_parser("equilibrium", help="closed-form equilibrium profile")
    _add_common(p)
    _add_params(p)
    pick = p.add_mutually_exclusive_group()
    pick.add_argument("--b1", type=_rational_arg, default=None,
                      help="defender per-action transport budget")
    pick.add_argument("--partition-size", type=int, default=None,
                      help="split the aligned cut into this many blocks")
    pick.add_argument("--partition", default=None,
                      help="JSON file with explicit partition blocks")
    p.add_argument("--force", action="store_true",
                   help="build the region III profile even when the "
                        "structural assumptions fail (for the verifier)")
    p.set_defaults(handler=_cmd_equilibrium)

    p = subs.add_parser("verify", help="exact gap check for a strategy pair")
    _add_common(p)
    _add_params(p)
    p.add_argument("--sigma1", required=True,
                   help="defender mixed strategy (JSON file)")
    p.add_argument("--sigma2", required=True,
                   help="attacker mixed strategy (JSON file)")
    p.add_argument("--eps", type=_rational_arg, default=Fraction(0),
                   help="gap tolerance for the verdict (default 0, exact)")
    p.add_argument("--edge-limit", type=int, default=DEFAULT_EDGE_LIMIT,
                   help="refuse attack enumeration beyond this many edges")
    p.add_argument("--path-limit", type=int, default=None,
                   help="cap on simple path enumeration")
    p.add_argument("--attack-budget", type=_rational_arg, default=None,
                   help="verify against attacks costing at most this")
    p.set_defaults(handler=_cmd_verify)

    p = subs.add_parser("budget", help="budget floors and cut partition")
    _add_common(p)
    _add_params(p)
    p.add_argument("--partition-size", type=int, default=None,
                   help="block count (default: the optimal size)")
    p.add_argument("--all-cuts", action="store_true",
                   help="also partition every enumerated minimum cut")
    p.set_defaults(handler=_cmd_budget)

    p = subs.add_parser("simulate", help="Monte-Carlo play of a profile")
    _add_common(p)
    _add_params(p)
    p.add_argument("--sigma1", default=None,
                   help="defender strategy file (default: equilibrium)")
    p.add_argument("--sigma2", default=None,
                   help="attacker strategy file (default: equilibrium)")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_simulate)

    p = subs.add_parser("export-dot", help="Graphviz view of the network")
    _add_common(p)
    p.add_argument("--flow", default=None,
                   help="flow strategy file; edge labels gain the "
                        "expected flow")
    p.add_argument("--cut", action="store_true",
                   help="dash the canonical minimum cut edges")
    p.add_argument("--attack", default=None,
                   help="attack strategy file; supported edges turn red")
    p.set_defaults(handler=_cmd_export_dot)
    return parser


# ----------------------------------------------------------------- handlers

def _cmd_analyze(args) -> tuple[int, str]:
    net = load_network(args.network)
    an = analyze(net, node_limit=args.node_limit, path_limit=args.path_limit)
    return 0, _json(analysis_to_dict(net, an))


def _auto_profile(net, params, an, force: bool):
    region = classify_region(params, an.alpha)
    if region.tag == "I":
        return region1_equilibrium(net, params, analysis=an)
    if region.tag == "II":
        return region2_equilibrium(net, params, analysis=an)
    if region.tag == "III":
        return region3_equilibrium(net, params, analysis=an, force=force)
    raise BoundaryParameters(
        f"p1={params.p1}, p2={params.p2} lie exactly on a region boundary "
        f"(alpha={an.alpha}); pick parameters strictly inside a region"
    )


def _cmd_equilibrium(args) -> tuple[int, str]:
    net = load_network(args.network)
    params = GameParams(p1=args.p1, p2=args.p2)
    an = analyze(net)
    if args.b1 is not None:
        profile = scaled_equilibrium(net, params, args.b1, analysis=an)
    elif args.partition is not None:
        with open(args.partition, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        partition = partition_from_dict(net, raw)
        profile = partition_equilibrium(net, params, partition, analysis=an)
    elif args.partition_size is not None:
        cut = an.assumption2.cut if an.assumption2.holds else an.min_cut
        partition, _ = partition_for_cut(net, cut, args.partition_size)
        profile = partition_equilibrium(net, params, partition, analysis=an)
    else:
        profile = _auto_profile(net, params, an, args.force)
    return 0, _json(profile_to_dict(net, profile))


def _cmd_verify(args) -> tuple[int, str]:
    net = load_network(args.network)
    params = GameParams(p1=args.p1, p2=args.p2)
    if args.eps < 0:
        raise InputError("--eps must be nonnegative")
    sigma1 = load_flow_strategy(net, args.sigma1)
    sigma2 = load_attack_strategy(net, args.sigma2)
    report = verify_equilibrium(net, params, sigma1, sigma2,
                                eps=args.eps, edge_limit=args.edge_limit,
                                path_limit=args.path_limit,
                                attack_budget=args.attack_budget)
    return (0 if report.is_equilibrium else 3), _json(report_to_dict(net, report))


def _cmd_budget(args) -> tuple[int, str]:
    net = load_network(args.network)
    params = GameParams(p1=args.p1, p2=args.p2)
    an = analyze(net)
    ba = analyze_budget(net, params, analysis=an, n=args.partition_size)
    out = budget_to_dict(net, ba)
    if args.all_cuts and an.all_min_cuts is not None:
        entries = []
        for cut in an.all_min_cuts:
            entry: dict = {"cut": cut_to_dict(net, cut)}
            try:
                partition, z_star = partition_for_cut(net, cut, ba.n)
                entry["z_star"] = str(z_star)
                entry["partition"] = partition_to_dict(net, partition)
            except InvalidPartition as exc:
                entry["error"] = str(exc)
            entries.append(entry)
        out["per_cut"] = entries
    return 0, _json(out)


def _cmd_simulate(args) -> tuple[int, str]:
    net = load_network(args.network)
    params = GameParams(p1=args.p1, p2=args.p2)
    an = analyze(net)
    profile = None
    if args.sigma1 is None or args.sigma2 is None:
        profile = _auto_profile(net, params, an, force=False)
    sigma1 = (load_flow_strategy(net, args.sigma1)
              if args.sigma1 is not None else profile.sigma1)
    sigma2 = (load_attack_strategy(net, args.sigma2)
              if args.sigma2 is not None else profile.sigma2)
    result = monte_carlo(net, params, sigma1, sigma2,
                         trials=args.trials, seed=args.seed, analysis=an)
    return 0, _json(sim_result_to_dict(result))


def _dot_quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _cmd_export_dot(args) -> tuple[int, str]:
    net = load_network(args.network)
    flows: Optional[dict[int, Fraction]] = None
    if args.flow is not None:
        sigma1 = load_flow_strategy(net, args.flow)
        flows = {i: Fraction(0) for i in range(len(net.edges))}
        for action, prob in sigma1.atoms:
            for i, f in edge_flows(net, action).items():
                flows[i] += prob * f
    cut_edges: set[int] = set()
    if args.cut:
        cut_edges = set(min_cut(net).edges)
    attacked: set[int] = set()
    if args.attack is not None:
        sigma2 = load_attack_strategy(net, args.attack)
        for mu, _ in sigma2.atoms:
            attacked |= mu.edges

    lines = [f"digraph {_dot_quote(net.name or 'network')} {{"]
    lines.append("  rankdir=LR;")
    lines.append("  node [shape=circle];")
    for v in net.nodes:
        if v in (net.source, net.sink):
            lines.append(f"  {_dot_quote(v)} [shape=doublecircle];")
        else:
            lines.append(f"  {_dot_quote(v)};")
    for i, e in enumerate(net.edges):
        label = f"{e.capacity},{e.cost}"
        if flows is not None:
            label += f",{flows[i]}"
        attrs = [f'label="{label}"']
        if i in cut_edges:
            attrs.append("style=dashed")
        if i in attacked:
            attrs.append("color=red")
        lines.append(
            f"  {_dot_quote(e.tail)} -> {_dot_quote(e.head)} "
            f"[{', '.join(attrs)}];"
        )
    lines.append("}")
    return 0, "\n".join(lines) + "\n"


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, text = args.handler(args)
    except InputError as exc:
        print(f"flowgame: input error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"flowgame: input error: {exc}", file=sys.stderr)
        return 1
    except ModelError as exc:
        print(f"flowgame: {exc}", file=sys.stderr)
        return 2
    if args.output is not None:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
