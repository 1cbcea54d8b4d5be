import pytest

from conftest import corpus_instances
from tiersynth.domain import ENV_ERR, DomainTrace
from tiersynth.errors import AlphabetMismatch, ExecutorError, TierError
from tiersynth.ltlf import parse_formula as p
from tiersynth.oracle import executor_plays
from tiersynth.policies import GreedyAdversarial, GreedyCooperative, RandomEnv, Scripted
from tiersynth.synthesis import (AdaptiveExecutor, check_multitier, play, solve_tiers,
                                 synth_multitier, synth_single, synth_winpend, verdicts)

S0, SG, SGC, SD, SGD = (frozenset(), frozenset({"g"}), frozenset({"g", "c"}),
                        frozenset({"dead"}), frozenset({"g", "dead"}))
TWO = ["F g", "F g & F c"]


def test_synth_single(two_road):
    s = synth_single(two_road, "F g")
    assert s.arena.initial in s.win.region
    s = synth_single(two_road, "F c & F dead")
    assert s.arena.initial not in s.coop.region
    s = synth_single(two_road, "true")
    legal = [q for q in s.arena.ts.states if not isinstance(q[0], str)]
    assert all(q in s.win.region for q in legal)
    with pytest.raises(AlphabetMismatch):
        synth_single(two_road, "F zzz")


def test_synth_winpend(two_road):
    pr = synth_winpend(two_road, *TWO)
    t = pr.transducer()
    assert pr.arena.initial in pr.wp.region
    assert t.output() == "safe"
    t.advance("safe", "r")
    assert t.output() == "try"
    t.advance("try", "r2")
    assert t.output() is None
    with pytest.raises(TierError):
        synth_winpend(two_road, "F c", "F g")


def test_check_multitier(two_road):
    assert check_multitier(two_road, TWO) is None
    trace, i = check_multitier(two_road, ["F c", "F g"])
    assert i == 1
    assert trace == DomainTrace((S0, SG), (("safe", "r"),))
    assert check_multitier(two_road, ["F g", "F g"]) is None
    assert check_multitier(two_road, ["F g"]) is None
    with pytest.raises(ValueError):
        check_multitier(two_road, [])


def test_game_counts(two_road, robot, robot_goals):
    assert solve_tiers(two_road, TWO).report["single_solves"] == 2
    assert solve_tiers(two_road, TWO).report["pair_solves"] == 1
    r = solve_tiers(robot, robot_goals).report
    assert (r["single_solves"], r["pair_solves"]) == (3, 3)


def test_non_tiers_rejected(two_road):
    with pytest.raises(TierError) as err:
        solve_tiers(two_road, ["F c", "F g"])
    assert err.value.counterexample[1] == 1


def test_executor_dispatch(two_road):
    e = synth_multitier(two_road, TWO)
    assert e.action() == "safe"
    d = e.log[-1]
    assert (d.j, d.l, d.m, d.source) == (1, 2, 2, "omega")
    assert e.action() == "safe"  # idempotent until advanced
    assert e.advance("safe", "r") == SG
    assert e.action() == "try"
    e.advance("try", "r1")
    assert e.action() is None
    assert (e.log[-1].j, e.log[-1].source) == (2, "kappa")
    assert e.status == "stopped"
    with pytest.raises(ExecutorError):
        e.action()
    with pytest.raises(ExecutorError):
        e.advance("stay", "r")


def test_executor_fallback_stop(two_road):
    e = synth_multitier(two_road, TWO)
    e.action()
    e.advance("safe", "r")
    e.action()
    e.advance("try", "r2")
    assert e.action() is None
    d = e.log[-1]
    assert (d.j, d.l, d.source) == (1, 0, "kappa")


def test_executor_advance_errors(two_road):
    e = synth_multitier(two_road, TWO)
    with pytest.raises(ExecutorError):
        e.advance("safe", "r")
    e.action()
    with pytest.raises(ExecutorError):
        e.advance("risk", "r1")
    with pytest.raises(AlphabetMismatch):
        e.advance("safe", "zzz")


def test_illegal_reaction_drives_env_error(two_road):
    e = synth_multitier(two_road, TWO)
    e.action()
    e.advance("safe", "r2")
    assert e.state == ENV_ERR
    assert all(t.tags[q][0] == ENV_ERR for t, q in zip(e.synthesis.objectives, e.cursors))
    assert e.action() is None
    assert e.log[-1].source == "kappa" and e.log[-1].j == 2


def test_play_two_road(two_road):
    res = play(synth_multitier(two_road, TWO), Scripted(["r", "r1"]))
    assert [sorted(s) for s in res.trace.states] == [[], ["g"], ["c", "g"]]
    assert res.verdicts == [True, True] and res.stopped and not res.truncated
    res = play(synth_multitier(two_road, TWO), Scripted(["r", "r2"]))
    assert res.trace.last == SGD
    assert res.verdicts == [True, False]


def test_truncation(two_road):
    res = play(synth_multitier(two_road, TWO), Scripted(["r"]), max_steps=1)
    assert res.truncated and not res.stopped
    assert len(res.trace) == 1


def test_transient_variant_stops_early(transient):
    """Outside the WP region the executor enforces tier 1 and stops, even
    though a history-dependent strategy could still try for tier 2 once."""
    syn = solve_tiers(transient, TWO, keep=True)
    pr = syn.pair_syntheses[1, 2]
    pg = pr.arena.ts.step(pr.arena.initial, ("safe", "r"))
    assert pg not in pr.wp.region
    assert pr.arena.initial not in pr.wp.region
    e = AdaptiveExecutor(syn)
    assert e.action() == "safe" and e.log[-1].source == "kappa"
    e.advance("safe", "r")
    assert e.action() is None
    # "try" from sg keeps tier 1 won whatever happens and may reach tier 2
    assert transient.delta(SG, "try", "r1") == SGC
    assert transient.delta(SG, "try", "r2") == SG


def test_robot_example(robot, robot_goals):
    syn = solve_tiers(robot, robot_goals)
    e = AdaptiveExecutor(syn)
    assert e.values() == ["win", "pend", "pend"]
    d = e.explain()
    assert (d.j, d.l, d.m) == (1, 2, 3)
    closing = play(AdaptiveExecutor(syn), Scripted(["close"]))
    assert closing.verdicts == [True, False, False]
    opening = play(AdaptiveExecutor(syn), Scripted(["open"]))
    assert opening.highest >= 2 and opening.verdicts[:2] == [True, True]
    coop = play(AdaptiveExecutor(syn), GreedyCooperative())
    assert coop.highest == 2
    adv = play(AdaptiveExecutor(syn), GreedyAdversarial())
    assert adv.verdicts[0]


def test_parallel_matches_serial(two_road, robot, robot_goals):
    for d, goals in ((two_road, TWO), (robot, robot_goals)):
        a, b = solve_tiers(d, goals), solve_tiers(d, goals, jobs=2)
        assert a.objectives == b.objectives
        assert a.pairs == b.pairs


@pytest.mark.parametrize("inst", corpus_instances())
def test_existence_and_tier_monotonicity(inst):
    d, tiers = inst
    syn = solve_tiers(d, tiers)
    e = AdaptiveExecutor(syn)
    # with no enforceable tier the executor only cooperates, so plays may loop
    horizon = None if e.explain().j > 0 else 12
    for x in executor_plays(e, horizon=horizon):
        v = verdicts(syn.goals, x)
        # satisfied tiers form a prefix of the tier order
        assert v == sorted(v, reverse=True)
    for seed in range(3):
        out = play(AdaptiveExecutor(syn), RandomEnv(seed), max_steps=200)
        assert out.stopped or horizon is not None
