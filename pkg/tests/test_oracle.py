import pytest

from conftest import corpus_instances
from tiersynth.domain import AG_ERR, ENV_ERR, DomainTrace, legal_histories
from tiersynth.errors import ResourceError
from tiersynth.ltlf import evaluate, parse_formula as p
from tiersynth.oracle import (enumerate_histories, executor_plays, oracle_regions,
                              oracle_value, oracle_winpend)
from tiersynth.synthesis import AdaptiveExecutor, solve_tiers, synth_single, synth_winpend

S0, SG, SGC, SD, SGD = (frozenset(), frozenset({"g"}), frozenset({"g", "c"}),
                        frozenset({"dead"}), frozenset({"g", "dead"}))
CAP = 200


def test_values_two_road(two_road):
    v = oracle_value(two_road, "F g")
    assert v == "win"
    assert [(k[0], a) for k, a in v.strategy.items()] == [(S0, "safe")]
    pend = oracle_value(two_road, "F g & F c")
    assert pend == "pend"
    assert pend.play.moves == (("risk", "r1"),)
    assert oracle_value(two_road, "F (c & dead)") == "lose"


def test_value_after_history(two_road):
    h = DomainTrace((S0, SD), (("risk", "r2"),))
    assert oracle_value(two_road, "F g & F c", h) == "lose"
    assert oracle_value(two_road, "F dead", h) == "win"
    with pytest.raises(ValueError):
        oracle_value(two_road, "F g", DomainTrace((S0, SG), (("risk", "r1"),)))


def test_caps(robot):
    with pytest.raises(ResourceError):
        oracle_value(robot, "F clean_D")
    with pytest.raises(ResourceError):
        oracle_value(robot, "F clean_D", state_cap=1000, action_cap=2)


def test_regions_two_road(two_road):
    w, c = oracle_regions(two_road, "F g")
    s = synth_single(two_road, "F g")
    assert w == set(s.win.region) and c == set(s.coop.region)
    assert all(k in w for k in s.arena.env_err)
    assert all(k not in w and k not in c for k in s.arena.ag_err)
    assert all(k in w and k in c for k in s.arena.coop)


def test_winpend_two_road(two_road):
    wp = oracle_winpend(two_road, "F g", "F g & F c")
    assert sorted((sorted(k[0][0]), r) for k, r in wp.items()) == \
        [([], 2), (["c", "g"], 0), (["g"], 1)]
    pr = synth_winpend(two_road, "F g", "F g & F c")
    assert wp == {q: pr.wp.rank[q] for q in pr.wp.region}


def test_winpend_empty_when_unsatisfiable(two_road):
    assert oracle_winpend(two_road, "F g", "F g & F (c & dead)") == {}


def test_enumerate_histories(two_road):
    e = AdaptiveExecutor(solve_tiers(two_road, ["F g", "F g & F c"]))
    assert enumerate_histories(two_road, e, 0) == [DomainTrace((S0,))]
    hs = enumerate_histories(two_road, e, 2)
    assert set(map(str, hs)) == {
        "{}",
        "{} (safe,r) {g}",
        "{} (safe,r) {g} (try,r1) {c,g}",
        "{} (safe,r) {g} (try,r2) {dead,g}",
    }
    assert e.status == "running" and e.cursors == AdaptiveExecutor(e.synthesis).cursors
    for depth in range(4):
        assert len(enumerate_histories(two_road, e, depth)) <= sum(
            len(two_road.reactions) ** k for k in range(depth + 1))
    with pytest.raises(ValueError):
        enumerate_histories(two_road, e, 9)


def test_enumerate_histories_with_callable(two_road):
    agent = lambda h: "safe" if h.last == S0 else None
    assert [str(h) for h in enumerate_histories(two_road, agent, 3)] == ["{}", "{} (safe,r) {g}"]


def test_executor_plays_two_road(two_road):
    e = AdaptiveExecutor(solve_tiers(two_road, ["F g", "F g & F c"]))
    plays = executor_plays(e)
    assert sorted(str(x) for x in plays) == [
        "{} (safe,r) {g} (try,r1) {c,g}",
        "{} (safe,r) {g} (try,r2) {dead,g}",
    ]


@pytest.mark.parametrize("inst", corpus_instances())
def test_value_monotone_across_tiers(inst):
    d, tiers = inst
    order = {"lose": 0, "pend": 1, "win": 2}
    for h in legal_histories(d, 3):
        vals = [oracle_value(d, f, h, state_cap=CAP).value for f in tiers]
        for lo, hi in zip(vals, vals[1:]):
            assert order[hi] <= order[lo]


@pytest.mark.parametrize("inst", corpus_instances()[:6])
def test_win_witness_is_verified(inst):
    d, tiers = inst
    for f in tiers:
        v = oracle_value(d, f, state_cap=CAP)
        if v == "win":
            assert v.strategy is not None
        elif v == "pend":
            assert evaluate(list(v.play.states), f)
