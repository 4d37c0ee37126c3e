import json
import random

import pytest

from diffauction import MechanismKind, SocialNetwork, truthful_profile
from diffauction.generators import line_graph
from diffauction.verifier import (
    Counterexample,
    DeviationSpace,
    audit_profile,
    check_IC,
    check_IR,
    check_revenue_dominance,
    check_WBB,
    covering_grid,
    dominance_campaign,
    dominator_campaign,
    enumerate_connected_networks,
    enumerate_topologies,
    exhaustive_sweep,
    minimize_counterexample,
    others_sweep,
    random_profile_sampler,
)

import oracles

IDM, VCG, SPL = MechanismKind.IDM, MechanismKind.VCG, MechanismKind.SPL


# --- enumeration ---------------------------------------------------------------


def test_enumeration_smallest_case():
    nets = list(enumerate_connected_networks(2, (0, 1)))
    assert len(nets) == 2
    assert all(n.edges() == [(0, 1)] for n in nets)


def test_enumeration_has_path_and_triangle():
    shapes = {edges for n, edges in enumerate_topologies(3) if n == 3}
    assert ((0, 1), (1, 2)) in shapes
    assert ((0, 1), (0, 2), (1, 2)) in shapes


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_topology_count_matches_recurrence(n):
    got = sum(1 for k, _ in enumerate_topologies(n, n_min=n))
    assert got == oracles.connected_labeled_graphs(n)


def test_network_count_for_n4_grid01():
    expected = sum(oracles.connected_labeled_graphs(n) * 2 ** (n - 1) for n in (2, 3, 4))
    assert expected == 322
    assert sum(1 for _ in enumerate_connected_networks(4, (0, 1))) == expected


def test_isomorphism_reduction():
    # unlabeled connected graphs with one marked vertex: 1, 3, 11, 58
    counts = [sum(1 for _ in enumerate_topologies(n, n_min=n, up_to_isomorphism=True)) for n in (2, 3, 4, 5)]
    assert counts == [1, 3, 11, 58]


def test_enumeration_is_deterministic():
    a = [n.edges() for n in enumerate_connected_networks(4, (0,))]
    b = [n.edges() for n in enumerate_connected_networks(4, (0,))]
    assert a == b


# --- deviation space ---------------------------------------------------------------


def test_covering_grid():
    assert covering_grid([2, 0, 1]) == (0, 0.5, 1, 1.5, 2, 3)
    space = DeviationSpace.covering(line_graph(3, [4, 0, 1]))
    assert 4 in space.valuation_grid and 5 in space.valuation_grid


def test_subsets_all_and_sampled():
    space = DeviationSpace((0,))
    assert len(space.subsets([1, 2, 3])) == 8
    sampled = DeviationSpace((0,), diffusion_samples=3, seed=1).subsets(range(10))
    assert frozenset() in sampled and frozenset(range(10)) in sampled
    assert len(sampled) == 5


# --- single-instance checks -----------------------------------------------------------


@pytest.mark.parametrize("kind", [IDM, VCG])
def test_ic_and_ir_on_line(kind, line5):
    assert check_IC(line5, kind).holds
    rep = check_IR(line5, kind)
    assert rep.holds
    # truthful bid under every diffusion subset: 2 subsets for the end buyer, 4 for the others
    assert rep.deviations_checked == 4 * 4 + 2


def test_ir_utilities_on_line(line5):
    from diffauction import run, utility

    prof = truthful_profile(line5)
    idm_out = run(IDM, line5, prof)
    vcg_out = run(VCG, line5, prof)
    assert all(utility(line5, i, idm_out) == 0 for i in line5.buyers)
    assert all(utility(line5, i, vcg_out) == 1 for i in line5.buyers)


@pytest.mark.parametrize("kind", [IDM, VCG, SPL])
def test_single_buyer(kind):
    net = SocialNetwork.from_edges(2, [(0, 1)], [0, 9])
    assert check_IR(net, kind).holds
    assert check_IC(net, kind).holds


@pytest.mark.parametrize("kind", [IDM, VCG])
def test_ic_with_sampled_others(kind, fig2):
    rep = check_IC(fig2, kind, DeviationSpace.covering(fig2, diffusion_samples=6, seed=2), others_samples=3, seed=5)
    assert rep.holds
    assert rep.instances_checked > len(fig2.buyers)


def test_spl_does_not_punish_hiding():
    # buyer 1 is the only way to reach buyer 2, who values the item more
    net = SocialNetwork.from_edges(3, [(0, 1), (1, 2)], [0, 5, 9])
    reps = audit_profile(net, [SPL], DeviationSpace.covering(net), buyers=[1]).reports
    assert reps["IC[spl]"].holds
    from diffauction import Bid, run, utility
    from diffauction.model import feasibility_transform

    truthful = run(SPL, net, truthful_profile(net))
    hidden = run(SPL, net, feasibility_transform(net, truthful_profile(net).replace(1, Bid(5, frozenset()))))
    assert utility(net, 1, truthful) == utility(net, 1, hidden) == 5


def test_wbb_examples(line5):
    vcg = check_WBB(line5, VCG)
    assert vcg.violations == 1 and vcg.passed and not vcg.holds
    assert "revenue -4" in vcg.counterexamples[0].note
    assert "VIOLATED (expected)" in vcg.summary_line()
    assert check_WBB(line5, IDM).holds
    sampled = check_WBB(mechanism=IDM, profile_sampler=random_profile_sampler(20), trials=300, seed=3)
    assert sampled.holds and sampled.instances_checked == 300
    with pytest.raises(ValueError):
        check_WBB(line5, IDM, trials=0)


def test_revenue_dominance_examples(line5, fig2):
    assert check_revenue_dominance(line5).as_tuple() == (0, -4, 0)
    cmp = check_revenue_dominance(fig2)
    assert cmp.idm == 10 and cmp.idm >= cmp.vcg and not cmp.violations()
    single = SocialNetwork.from_edges(2, [(0, 1)], [0, 9])
    assert check_revenue_dominance(single).as_tuple() == (0, 0, 0)


def test_small_campaigns():
    rep, complete = dominance_campaign(300, seed=1, n_max=30)
    assert complete and rep.holds and rep.instances_checked == 300
    rep = dominator_campaign(30, seed=1, n_max=60)
    assert rep.holds and rep.instances_checked == 30


def test_small_exhaustive_sweep_parallel_equals_serial():
    a = exhaustive_sweep(4, (0, 1, 2), processes=1)
    b = exhaustive_sweep(4, (0, 1, 2), processes=2)
    assert a.passed and b.passed
    assert a.scenarios == b.scenarios == sum(oracles.connected_labeled_graphs(n) * 3 ** (n - 1) for n in (2, 3, 4))
    for key in a.reports:
        assert a.reports[key].deviations_checked == b.reports[key].deviations_checked
    json.dumps(a.to_dict())


def test_exhaustive_sweep_time_limit():
    res = exhaustive_sweep(4, (0, 1), processes=1, time_limit=0)
    assert not res.complete


def test_ic_against_every_profile_of_the_others():
    """All other buyers' actions (not just truthful ones), n <= 4 up to relabeling."""
    res = others_sweep(4, (0, 1, 2), up_to_isomorphism=True)
    for rep in res.reports.values():
        assert rep.holds, rep.summary_line()
    assert res.reports["IC[idm]"].deviations_checked > 500_000


# --- reporting and shrinking ----------------------------------------------------------


def test_counterexample_serializes(line5):
    cx = Counterexample(line5, 2, 0, None, 1, "demo")
    d = cx.to_dict()
    assert d["deviation"] is None and d["note"] == "demo"
    json.dumps(d)


def test_minimize_returns_input_when_nothing_fails():
    net = SocialNetwork.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)], [0, 1, 2, 3, 3])
    cx = Counterexample(net, 2, 0, None, 0, "seed")
    assert minimize_counterexample(cx, IDM) is cx


def _first_price(net, profile, rng=None, analysis=None):
    # pay-your-bid among the seller's neighbours: not IC, shading pays
    from diffauction.mechanisms import second_price_local

    out = second_price_local(net, profile)
    pay = [0] * net.n
    if out.winner is not None:
        pay[out.winner] = profile[out.winner].value
    return out._replace(payments=tuple(pay), revenue=sum(pay))


def test_minimizer_shrinks_a_real_counterexample(monkeypatch):
    from diffauction import mechanisms, verifier

    monkeypatch.setitem(verifier._MECHANISMS, SPL, _first_price)
    monkeypatch.setitem(mechanisms._DISPATCH, SPL, _first_price)
    net = SocialNetwork.from_edges(
        6, [(0, 1), (0, 2), (2, 3), (3, 4), (1, 5), (4, 5)], [0, 3, 1, 2, 0, 1]
    )
    rep = check_IC(net, SPL)
    assert not rep.holds
    cx = next(c for c in rep.counterexamples if c.buyer == 1)
    small = minimize_counterexample(cx, SPL)
    assert small.deviating_utility > small.truthful_utility
    assert small.scenario.n == 2
    assert small.scenario.valuations[small.buyer] > 0
