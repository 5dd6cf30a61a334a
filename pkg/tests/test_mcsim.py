from __future__ import annotations

from fractions import Fraction as F

import pytest
from numpy.random import Philox

from conftest import fixture_analysis, fixture_network
from flowgame import (
    GameParams,
    InputError,
    monte_carlo,
    region2_equilibrium,
    region3_equilibrium,
    sample_play,
    sim_result_to_dict,
)
from flowgame.mcsim import QUANTITIES, _select, _thresholds


def mesh_profile(p1=F(6), p2=F(2)):
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    params = GameParams(p1=p1, p2=p2)
    prof = region3_equilibrium(net, params, analysis=an)
    return net, an, params, prof


def test_monte_carlo_reruns_bit_identical():
    net, an, params, prof = mesh_profile()
    a = monte_carlo(net, params, prof.sigma1, prof.sigma2, 3000, 7,
                    analysis=an)
    b = monte_carlo(net, params, prof.sigma1, prof.sigma2, 3000, 7,
                    analysis=an)
    assert a.stats == b.stats
    assert a.target_source == "region3_invariants"


def test_monte_carlo_z_scores_near_targets():
    net, an, params, prof = mesh_profile()
    res = monte_carlo(net, params, prof.sigma1, prof.sigma2, 20000, 11,
                      analysis=an)
    assert set(res.stats) == set(QUANTITIES)
    for name, stat in res.stats.items():
        assert abs(stat.z) < 5, (name, stat)
    assert res.stats["flow"].target == 1.5
    assert res.stats["transport"].target == 4.5
    assert res.stats["effective_flow"].target == 0.75


def test_monte_carlo_seed_changes_draws():
    net, an, params, prof = mesh_profile()
    a = monte_carlo(net, params, prof.sigma1, prof.sigma2, 500, 0,
                    analysis=an)
    b = monte_carlo(net, params, prof.sigma1, prof.sigma2, 500, 1,
                    analysis=an)
    assert a.stats != b.stats


def test_monte_carlo_pure_profile_is_exact():
    net = fixture_network("mesh")
    an = fixture_analysis("mesh")
    params = GameParams(p1=F(6), p2=F(1, 2))
    prof = region2_equilibrium(net, params, analysis=an)
    res = monte_carlo(net, params, prof.sigma1, prof.sigma2, 100, 3,
                      analysis=an)
    assert res.target_source == "exact_expectation"
    for stat in res.stats.values():
        assert stat.se == 0.0
        assert stat.z == 0.0
        assert stat.mean == stat.target
    assert res.stats["u1"].mean == 9.0
    assert res.stats["attack_cost"].mean == 0.0


def test_monte_carlo_needs_two_trials():
    net, an, params, prof = mesh_profile()
    with pytest.raises(InputError):
        monte_carlo(net, params, prof.sigma1, prof.sigma2, 1, 0,
                    analysis=an)


def test_sample_play_frequencies():
    net, an, params, prof = mesh_profile()
    gen = Philox(key=5)
    hits = 0
    n = 4000
    for _ in range(n):
        x, mu = sample_play(net, prof.sigma1, prof.sigma2, gen)
        assert x in (prof.sigma1.atoms[0][0], prof.sigma1.atoms[1][0])
        if mu.edges:
            hits += 1
    # attack atom has probability 1/2; allow 5 sigma
    assert abs(hits / n - 0.5) < 5 * 0.5 / n ** 0.5


def test_monte_carlo_matches_manual_replay():
    net, an, params, prof = mesh_profile()
    trials, seed = 250, 42
    res = monte_carlo(net, params, prof.sigma1, prof.sigma2, trials, seed,
                      analysis=an)
    t1 = _thresholds([p for _, p in prof.sigma1.atoms])
    t2 = _thresholds([q for _, q in prof.sigma2.atoms])
    total = 0.0
    for i in range(trials):
        raw = Philox(key=seed, counter=i << 64).random_raw(2)
        x = prof.sigma1.atoms[_select(int(raw[0]), t1)][0]
        total += float(sum(pf.amount for pf in x.paths))
    assert res.stats["flow"].mean == pytest.approx(total / trials, abs=1e-12)


def test_thresholds_partition_the_draw_space():
    t = _thresholds([F(1, 3), F(1, 3), F(1, 3)])
    assert _select(0, t) == 0
    assert _select((1 << 64) - 1, t) == 2
    lo = (1 << 64) // 3
    assert _select(lo, t) == 0       # draw * 3 == floor boundary stays low
    assert _select(lo + 1, t) == 1


def test_sim_result_serialization():
    net, an, params, prof = mesh_profile()
    res = monte_carlo(net, params, prof.sigma1, prof.sigma2, 200, 1,
                      analysis=an)
    raw = sim_result_to_dict(res)
    assert raw["trials"] == 200 and raw["seed"] == 1
    assert raw["target_source"] == "region3_invariants"
    assert set(raw["quantities"]) == set(QUANTITIES)
    assert raw["quantities"]["u1"]["target"] == 0.0
