from __future__ import annotations

from fractions import Fraction as F

import pytest

from conftest import fixture_analysis, fixture_network
from flowgame import (
    MU0,
    X0,
    AssumptionViolated,
    Attack,
    BoundaryParameters,
    BudgetOutOfRange,
    FlowAction,
    GameParams,
    InvalidPartition,
    MixedFlowStrategy,
    Partition,
    WrongRegion,
    check_partition,
    check_probability_bounds,
    classify_region,
    cut_edge_statistics,
    enumerate_partitions,
    expected_payoffs,
    flow_actions_equal,
    flow_value,
    partition_equilibrium,
    partition_from_dict,
    partition_to_dict,
    profile_to_dict,
    pure_attack,
    region1_equilibrium,
    region2_equilibrium,
    region3_equilibrium,
    scaled_equilibrium,
    theorem1_quantities,
    transport_cost,
)


@pytest.mark.parametrize("p1,p2,n,tag", [
    (F(1), F(2), None, "I"),
    (F(3), F(2), None, "BOUNDARY"),       # p1 == alpha
    (F(6), F(1, 2), None, "II"),
    (F(6), F(1), None, "BOUNDARY"),       # p2 == 1
    (F(6), F(2), None, "III"),
    (F(5), F(2), 2, "IIIa"),              # p1 < 2*alpha
    (F(12), F(2), 2, "IIIb"),
    (F(6), F(2), 2, "BOUNDARY"),          # p1 == n*alpha/(n-1)
    (F(4), F(2), 3, "IIIa"),
    (F(5), F(2), 3, "IIIb"),              # threshold is 9/2
    (F(9, 2), F(2), 3, "BOUNDARY"),
    (F(100), F(2), 1, "IIIa"),            # n=1 has no upper threshold
])
def test_classify_region_mesh(p1, p2, n, tag):
    region = classify_region(GameParams(p1=p1, p2=p2), F(3), n=n)
    assert region.tag == tag
    if tag.startswith("III") and n is not None:
        assert region.n == n


def test_classify_region_rejects_nonpositive_n():
    with pytest.raises(InvalidPartition):
        classify_region(GameParams(p1=F(6), p2=F(2)), F(3), n=0)


def test_region1_profile():
    net = fixture_network("bridge")  # alpha = 2
    prof = region1_equilibrium(net, GameParams(p1=F(1), p2=F(5)))
    assert prof.construction == "Prop1"
    assert prof.region.tag == "I"
    assert prof.sigma1.atoms == ((X0, F(1)),)
    assert prof.sigma2.atoms == ((MU0, F(1)),)
    with pytest.raises(WrongRegion):
        region1_equilibrium(net, GameParams(p1=F(7), p2=F(5)))


def test_region2_profile():
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    params = GameParams(p1=F(6), p2=F(1, 2))
    prof = region2_equilibrium(net, params, analysis=an)
    assert prof.construction == "Prop2"
    assert prof.sigma1.atoms == ((an.x_star, F(1)),)
    assert prof.sigma2.atoms == ((MU0, F(1)),)
    u1, u2 = expected_payoffs(net, prof.sigma1, prof.sigma2, params)
    assert u1 == F(9)  # (p1 - alpha) * f_max = 3 * 3
    assert u2 == F(0)


def test_region2_needs_cheap_max_flow():
    net = fixture_network("skew")  # t_min=10 > alpha*f_max=6
    with pytest.raises(AssumptionViolated):
        region2_equilibrium(net, GameParams(p1=F(6), p2=F(1, 2)))


def test_region3_profile_mesh():
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    prof = region3_equilibrium(net, GameParams(p1=F(6), p2=F(2)), analysis=an)
    assert prof.construction == "Prop3"
    assert prof.region.tag == "III"
    assert prof.sigma1.atoms == ((X0, F(1, 2)), (an.x_star, F(1, 2)))
    assert prof.sigma2.atoms == (
        (MU0, F(1, 2)),
        (Attack(edges=frozenset({3, 5, 6})), F(1, 2)),
    )
    prof5 = region3_equilibrium(net, GameParams(p1=F(5), p2=F(2)), analysis=an)
    assert dict(prof5.sigma2.atoms)[MU0] == F(3, 5)
    assert dict(prof5.sigma2.atoms)[Attack(edges=frozenset({3, 5, 6}))] == F(2, 5)


def test_region3_boundary_and_wrong_region():
    net = fixture_network("mesh")
    with pytest.raises(BoundaryParameters):
        region3_equilibrium(net, GameParams(p1=F(3), p2=F(2)))
    with pytest.raises(BoundaryParameters):
        region3_equilibrium(net, GameParams(p1=F(6), p2=F(1)))
    with pytest.raises(WrongRegion):
        region3_equilibrium(net, GameParams(p1=F(2), p2=F(2)))


def test_region3_force_skips_assumptions():
    net = fixture_network("skew")
    params = GameParams(p1=F(6), p2=F(2))
    with pytest.raises(AssumptionViolated):
        region3_equilibrium(net, params)
    prof = region3_equilibrium(net, params, force=True)
    # canonical min cut of skew is the source-side pair
    assert prof.sigma2.atoms[1][0] == Attack(edges=frozenset({1, 2}))
    assert prof.sigma2.atoms[0][1] == F(1, 2)  # alpha/p1 = 3/6


def test_partition_normalization_and_checks():
    an = fixture_analysis("mesh")
    cut = an.assumption2.cut
    part = Partition.of([[6], [5, 3]])
    assert part.blocks == ((3, 5), (6,))
    check_partition(part, cut)
    with pytest.raises(InvalidPartition, match="empty block"):
        check_partition(Partition.of([[3, 5, 6], []]), cut)
    with pytest.raises(InvalidPartition, match="two blocks"):
        check_partition(Partition.of([[3, 5], [5, 6]]), cut)
    with pytest.raises(InvalidPartition, match="not a cut edge"):
        check_partition(Partition.of([[0], [3, 5, 6]]), cut)
    with pytest.raises(InvalidPartition, match="not covered"):
        check_partition(Partition.of([[3], [5]]), cut)


def test_enumerate_partitions_counts():
    parts3 = enumerate_partitions([3, 5, 6])
    assert len(parts3) == 5
    assert parts3[0].blocks == ((3, 5, 6),)
    assert parts3[-1].blocks == ((3,), (5,), (6,))
    assert len(set(parts3)) == 5
    assert len(enumerate_partitions([0, 1, 2, 4])) == 15
    assert enumerate_partitions([]) == ()


def test_partition_equilibrium_blocks_with_idle_pad():
    # p1=5 sits below the n=2 threshold 2*alpha = 6
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    prof = partition_equilibrium(net, GameParams(p1=F(5), p2=F(2)),
                                 Partition.of([[3, 5], [6]]), analysis=an)
    assert prof.construction == "Prop9a"
    assert prof.region.tag == "IIIa" and prof.region.n == 2
    probs = {mu.edges: q for mu, q in prof.sigma2.atoms}
    assert probs == {
        frozenset({3, 5}): F(2, 5),
        frozenset({6}): F(2, 5),
        frozenset(): F(1, 5),
    }
    assert prof.sigma1.atoms == ((X0, F(1, 2)), (an.x_star, F(1, 2)))


def test_partition_equilibrium_blocks_with_full_cut_pad():
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    prof = partition_equilibrium(net, GameParams(p1=F(5), p2=F(2)),
                                 Partition.of([[3], [5], [6]]), analysis=an)
    assert prof.construction == "Prop9b"
    assert prof.region.tag == "IIIb" and prof.region.n == 3
    probs = {mu.edges: q for mu, q in prof.sigma2.atoms}
    assert probs == {
        frozenset({3}): F(3, 10),
        frozenset({5}): F(3, 10),
        frozenset({6}): F(3, 10),
        frozenset({3, 5, 6}): F(1, 10),
    }
    prof12 = partition_equilibrium(net, GameParams(p1=F(12), p2=F(2)),
                                   Partition.of([[3, 5], [6]]), analysis=an)
    probs12 = {mu.edges: q for mu, q in prof12.sigma2.atoms}
    assert probs12 == {
        frozenset({3, 5}): F(1, 4),
        frozenset({6}): F(1, 4),
        frozenset({3, 5, 6}): F(1, 2),
    }


def test_partition_singleton_matches_two_point_mix():
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    params = GameParams(p1=F(5), p2=F(2))
    prof_n1 = partition_equilibrium(net, params, Partition.of([[3, 5, 6]]),
                                    analysis=an)
    prof3 = region3_equilibrium(net, params, analysis=an)
    assert prof_n1.construction == "Prop9a"
    assert set(prof_n1.sigma2.atoms) == set(prof3.sigma2.atoms)
    assert prof_n1.sigma1.atoms == prof3.sigma1.atoms


def test_partition_equilibrium_boundary():
    net = fixture_network("mesh")
    with pytest.raises(BoundaryParameters):
        partition_equilibrium(net, GameParams(p1=F(6), p2=F(2)),
                              Partition.of([[3, 5], [6]]))


def test_partition_equilibrium_needs_aligned_cut():
    net = fixture_network("skew")
    with pytest.raises(AssumptionViolated):
        partition_equilibrium(net, GameParams(p1=F(6), p2=F(2)),
                              Partition.of([[1], [2]]))


def test_scaled_equilibrium_upper_end_is_plain_mix():
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    params = GameParams(p1=F(6), p2=F(2))
    prof = scaled_equilibrium(net, params, F(9), analysis=an)
    assert prof.construction == "Prop8"
    assert len(prof.sigma1.atoms) == 2
    assert flow_actions_equal(prof.sigma1.atoms[1][0], an.x_star)
    assert prof.sigma1.atoms[0] == (X0, F(1, 2))
    assert prof.sigma2.atoms == region3_equilibrium(
        net, params, analysis=an).sigma2.atoms


def test_scaled_equilibrium_lower_end_drops_idle_atom():
    net = fixture_network("mesh")
    prof = scaled_equilibrium(net, GameParams(p1=F(6), p2=F(2)), F(9, 2))
    assert len(prof.sigma1.atoms) == 1
    x_dag, prob = prof.sigma1.atoms[0]
    assert prob == F(1)
    assert transport_cost(net, x_dag) == F(9, 2)
    assert flow_value(x_dag) == F(3, 2)


def test_scaled_equilibrium_interior_budget():
    net = fixture_network("mesh")
    prof = scaled_equilibrium(net, GameParams(p1=F(6), p2=F(2)), F(6))
    assert prof.sigma1.atoms[0] == (X0, F(1, 4))
    x_dag, prob = prof.sigma1.atoms[1]
    assert prob == F(3, 4)
    assert transport_cost(net, x_dag) == F(6)
    assert flow_value(x_dag) == F(2)


@pytest.mark.parametrize("b1", [F(4), F(449, 100), F(10)])
def test_scaled_equilibrium_budget_range(b1):
    net = fixture_network("mesh")
    with pytest.raises(BudgetOutOfRange):
        scaled_equilibrium(net, GameParams(p1=F(6), p2=F(2)), b1)


def test_theorem1_quantities_mesh():
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    q = theorem1_quantities(net, GameParams(p1=F(6), p2=F(2)), analysis=an)
    assert (q.u1, q.u2) == (F(0), F(0))
    assert q.e_flow == F(3, 2)
    assert q.e_transport == F(9, 2)
    assert q.e_attack_cost == F(3, 2)
    assert q.e_effective_flow == F(3, 4)
    assert q.e_loss == F(3, 4)
    assert q.yield_ratio == F(1, 2)
    assert q.zero_sum_value == F(3, 4)
    q5 = theorem1_quantities(net, GameParams(p1=F(5), p2=F(2)), analysis=an)
    assert q5.e_attack_cost == F(6, 5)
    assert q5.e_effective_flow == F(9, 10)
    assert q5.e_loss == F(3, 5)
    assert q5.yield_ratio == F(3, 5)


def test_theorem1_quantities_guards():
    with pytest.raises(WrongRegion):
        theorem1_quantities(fixture_network("mesh"),
                            GameParams(p1=F(2), p2=F(2)))
    with pytest.raises(AssumptionViolated):
        theorem1_quantities(fixture_network("skew"),
                            GameParams(p1=F(6), p2=F(2)))


def test_cut_edge_statistics_on_equilibrium():
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    params = GameParams(p1=F(6), p2=F(2))
    prof = region3_equilibrium(net, params, analysis=an)
    stats = cut_edge_statistics(net, params, prof.sigma1, prof.sigma2,
                                an.assumption2.cut, analysis=an)
    assert stats.attack_target_applicable
    assert [s.edge_index for s in stats.edges] == [3, 5, 6]
    for s in stats.edges:
        assert s.expected_flow == F(1, 2) and s.flow_matches
        assert s.attack_prob == F(1, 2) and s.attack_matches
        assert s.target_attack_prob == F(1, 2)


def test_cut_edge_statistics_off_cut_attack():
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    params = GameParams(p1=F(6), p2=F(2))
    prof = region3_equilibrium(net, params, analysis=an)
    sigma2 = pure_attack(Attack(edges=frozenset({0})))
    stats = cut_edge_statistics(net, params, prof.sigma1, sigma2,
                                an.assumption2.cut, analysis=an)
    assert not stats.attack_target_applicable
    assert all(not s.attack_matches for s in stats.edges)


def test_probability_bounds():
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    params = GameParams(p1=F(6), p2=F(2))
    prof = region3_equilibrium(net, params, analysis=an)
    rep = check_probability_bounds(net, params, prof.sigma1, prof.sigma2,
                                   analysis=an)
    assert rep.holds
    assert {b.label: b.prob for b in rep.bounds} == {
        "x0": F(1, 2), "x_star": F(1, 2), "mu0": F(1, 2), "mu_min": F(1, 2)}
    heavy = MixedFlowStrategy(atoms=((X0, F(2, 5)), (an.x_star, F(3, 5))))
    rep2 = check_probability_bounds(net, params, heavy, prof.sigma2,
                                    analysis=an)
    assert not rep2.holds
    failed = [b.label for b in rep2.bounds if not b.holds]
    assert failed == ["x_star"]


def test_partition_dict_round_trip():
    net = fixture_network("mesh")
    part = Partition.of([[3, 5], [6]])
    raw = partition_to_dict(net, part)
    assert partition_from_dict(net, raw) == part
    by_pairs = {"blocks": [{"edges": [["2", "3"], ["1", "3"]]},
                           {"edges": [["2", "4"]]}]}
    assert partition_from_dict(net, by_pairs) == part
    with pytest.raises(InvalidPartition):
        partition_from_dict(net, {"blocks": [{"nope": []}]})
    with pytest.raises(InvalidPartition):
        partition_from_dict(net, {"blocks": [{"edge_index": [99]}]})
    with pytest.raises(InvalidPartition):
        partition_from_dict(net, [])


def test_profile_to_dict_shape():
    net = fixture_network("mesh")
    prof = region3_equilibrium(net, GameParams(p1=F(6), p2=F(2)))
    raw = profile_to_dict(net, prof)
    assert raw["construction"] == "Prop3"
    assert raw["region"] == {"tag": "III"}
    assert [a["prob"] for a in raw["sigma1"]["atoms"]] == ["1/2", "1/2"]
    assert raw["sigma2"]["atoms"][1]["edge_index"] == [3, 5, 6]
