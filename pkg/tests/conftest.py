from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from flowgame import Network, load_network
from flowgame.flowopt import FlowAnalysis, analyze

FIXTURE_DIR = Path(__file__).parent / "fixtures"
FIXTURE_NAMES = ["bridge", "aligned", "mesh", "offcut", "skew", "tiered"]


def fixture_path(name: str) -> str:
    return str(FIXTURE_DIR / f"{name}.json")


@lru_cache(maxsize=None)
def fixture_network(name: str) -> Network:
    return load_network(fixture_path(name))


@lru_cache(maxsize=None)
def fixture_analysis(name: str) -> FlowAnalysis:
    return analyze(fixture_network(name))
