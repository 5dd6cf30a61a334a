from __future__ import annotations

import random
from fractions import Fraction as F
from itertools import product

import pytest

from conftest import fixture_analysis, fixture_network
from flowgame import (
    AssumptionViolated,
    BoundaryParameters,
    GameParams,
    InvalidPartition,
    Partition,
    TooManyEdges,
    WrongRegion,
    analyze_budget,
    attack_cost,
    attacker_budget_lower_bound,
    budget_to_dict,
    min_budget_partition_equilibrium,
    min_defender_budget,
    optimal_partition_size,
    partition_for_cut,
    solve_min_max_partition,
)


def test_defender_budget_floor():
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    assert min_defender_budget(net, GameParams(p1=F(6), p2=F(2)),
                               analysis=an) == F(9, 2)
    assert min_defender_budget(net, GameParams(p1=F(6), p2=F(3)),
                               analysis=an) == F(3)
    with pytest.raises(WrongRegion):
        min_defender_budget(net, GameParams(p1=F(2), p2=F(2)), analysis=an)
    with pytest.raises(AssumptionViolated):
        min_defender_budget(fixture_network("skew"),
                            GameParams(p1=F(6), p2=F(2)))


def test_attacker_budget_floor():
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    assert attacker_budget_lower_bound(net, GameParams(p1=F(5), p2=F(2)),
                                       analysis=an) == F(6, 5)
    assert attacker_budget_lower_bound(net, GameParams(p1=F(6), p2=F(2)),
                                       analysis=an) == F(3, 2)


@pytest.mark.parametrize("p1,n_star", [
    (F(5), 2),      # floor(5/2)
    (F(100), 1),    # floor(100/97)
    (F(7, 2), 3),   # ratio 7, capped by the 3-edge cut
])
def test_optimal_partition_size(p1, n_star):
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    assert optimal_partition_size(net, GameParams(p1=p1, p2=F(2)),
                                  analysis=an) == n_star


@pytest.mark.parametrize("caps,n,z,blocks", [
    ([1, 1, 1], 2, F(2), ((0, 1), (2,))),
    ([1, 1, 1], 3, F(1), ((0,), (1,), (2,))),
    ([5, 3, 2, 2], 1, F(12), ((0, 1, 2, 3),)),
    ([5, 3, 2, 2], 2, F(7), ((0, 2), (1, 3))),
    ([4, 3, 3, 2, 2], 3, F(5), ((0,), (1, 3), (2, 4))),
])
def test_min_max_partition_known_cases(caps, n, z, blocks):
    sol = solve_min_max_partition([F(c) for c in caps], n)
    assert sol.z_star == z
    assert sol.blocks == blocks
    assert sorted(i for b in sol.blocks for i in b) == list(range(len(caps)))
    assert max(sum(F(caps[i]) for i in b) for b in sol.blocks) == z


def _brute_force_z(caps, n):
    best = None
    for assign in product(range(n), repeat=len(caps)):
        if len(set(assign)) != n:
            continue
        sums = [F(0)] * n
        for pos, j in enumerate(assign):
            sums[j] += caps[pos]
        if best is None or max(sums) < best:
            best = max(sums)
    return best


def test_min_max_partition_against_brute_force():
    rng = random.Random(20240813)
    for _ in range(150):
        size = rng.randint(1, 7)
        caps = [F(rng.randint(1, 5)) for _ in range(size)]
        n = rng.randint(1, size)
        sol = solve_min_max_partition(caps, n)
        assert sol.z_star == _brute_force_z(caps, n)
        assert len(sol.blocks) == n
        assert all(sol.blocks)


def test_min_max_partition_monotone_in_block_count():
    caps = [F(c) for c in (5, 3, 2, 2, 1)]
    zs = [solve_min_max_partition(caps, n).z_star for n in range(1, 6)]
    assert zs == [F(13), F(7), F(5), F(5), F(5)]
    assert all(a >= b for a, b in zip(zs, zs[1:]))


def test_min_max_partition_rejects_bad_input():
    with pytest.raises(InvalidPartition):
        solve_min_max_partition([F(1), F(1)], 0)
    with pytest.raises(InvalidPartition):
        solve_min_max_partition([F(1), F(1)], 3)
    with pytest.raises(TooManyEdges):
        solve_min_max_partition([F(1)] * 25, 2)


def test_analyze_budget_mesh():
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    ba = analyze_budget(net, GameParams(p1=F(5), p2=F(2)), analysis=an)
    assert ba.b1_star == F(9, 2)
    assert ba.b2_lower == F(6, 5)
    assert ba.n_star == 2 and ba.n == 2
    assert ba.z_star == F(2)
    assert ba.partition.blocks == ((3, 5), (6,))
    assert ba.cut.edges == (3, 5, 6)
    ba3 = analyze_budget(net, GameParams(p1=F(7, 2), p2=F(2)),
                         analysis=an, n=3)
    assert ba3.z_star == F(1)
    assert ba3.partition.blocks == ((3,), (5,), (6,))


def test_partition_for_cut():
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    part, z = partition_for_cut(net, an.assumption2.cut, 2)
    assert z == F(2)
    assert part.blocks == ((3, 5), (6,))


def test_min_budget_partition_equilibrium():
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    ba, prof = min_budget_partition_equilibrium(
        net, GameParams(p1=F(5), p2=F(2)), analysis=an)
    assert prof.construction == "Prop9a"
    assert len(prof.sigma2.atoms) == 3
    assert all(attack_cost(net, mu) <= ba.z_star
               for mu, _ in prof.sigma2.atoms)


def test_budget_boundary_coincidence():
    # at p1 = 2*alpha the best block count is 2, but that p1 sits exactly
    # on the two-block region threshold
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    assert optimal_partition_size(net, GameParams(p1=F(6), p2=F(2)),
                                  analysis=an) == 2
    with pytest.raises(BoundaryParameters):
        min_budget_partition_equilibrium(net, GameParams(p1=F(6), p2=F(2)),
                                         analysis=an)


def test_budget_to_dict():
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    ba = analyze_budget(net, GameParams(p1=F(5), p2=F(2)), analysis=an)
    raw = budget_to_dict(net, ba)
    assert raw["b1_star"] == "9/2"
    assert raw["b2_lower"] == "6/5"
    assert raw["n_star"] == 2
    assert raw["z_star"] == "2"
    assert raw["partition"]["blocks"][0]["edge_index"] == [3, 5]
    assert raw["cut"]["edge_index"] == [3, 5, 6]
