import pytest

from conftest import corpus_instances
from tiersynth.errors import AlphabetMismatch, ExecutorError
from tiersynth.games import extract_transducer, solve_adv, solve_coop
from tiersynth.ltlf import evaluate, parse_formula as p
from tiersynth.oracle import shortest_histories, strategy_plays
from tiersynth.synthesis import pair_from_singles, synth_single, synth_winpend

S0, SG, SGC, SD, SGD = (frozenset(), frozenset({"g"}), frozenset({"g", "c"}),
                        frozenset({"dead"}), frozenset({"g", "dead"}))


def test_trivial_targets(two_road):
    a = synth_single(two_road, "F g").arena
    everything = solve_adv(a.ts, a.ts.states)
    assert everything.region == set(a.ts.states) and not everything.strategy
    nothing = solve_adv(a.ts, set())
    assert not nothing.region
    assert solve_coop(a.ts, set()).region == frozenset()


def test_two_road_adv(two_road):
    s = synth_single(two_road, "F g")
    assert s.arena.initial in s.win.region
    assert s.kappa[s.arena.initial] == "safe"


def test_two_road_coop(two_road):
    s = synth_single(two_road, "F g & F c")
    assert s.arena.initial in s.coop.region
    assert s.nu[s.arena.initial] == "risk"
    assert not any(q in s.coop.region for q in s.arena.ts.states if q[0] == SD)
    assert s.arena.coop <= s.coop.region


def _pair_state(p, dom):
    [q] = [q for q in p.arena.ts.states if q[0][0] == dom and q[1][0] == dom
           and (dom != SG or q[0] != p.arena.initial[0])]
    return q


def test_two_road_winpend(two_road):
    pr = synth_winpend(two_road, "F g", "F g & F c")
    wp = pr.wp
    by_dom = {q[0][0]: q for q in wp.region}
    assert set(by_dom) == {S0, SG, SGC}
    assert [wp.rank[by_dom[s]] for s in (SGC, SG, S0)] == [0, 1, 2]
    assert wp.base == {by_dom[SGC]}
    assert pr.omega[by_dom[S0]] == "safe"
    assert pr.omega[by_dom[SG]] == "try"
    pgd = pr.arena.ts.step(by_dom[SG], ("try", "r2"))
    assert pgd in wp.escape and pgd not in wp.region
    assert pgd not in pr.omega  # first objective accepted: stop


def test_transducer(two_road):
    s = synth_single(two_road, "F g")
    t = s.winning_transducer()
    assert t.output() == "safe"
    t.advance("safe", "r")
    assert t.output() is None
    with pytest.raises(ExecutorError):
        t.advance("stay", "r")
    t.reset()
    with pytest.raises(AlphabetMismatch):
        t.advance("fly", "r")
    t1, t2 = s.winning_transducer(), s.winning_transducer()
    for tr in (t1, t2):
        tr.advance("risk", "r2")
    assert t1.output() == t2.output()


def _rank_checks(ts, sol, adversarial):
    for q, a in sol.strategy.items():
        ranks = [sol.rank.get(ts.delta[q][a, r]) for r in ts.alphabet.reactions]
        if adversarial:
            assert all(k is not None and k < sol.rank[q] for k in ranks)
        else:
            assert any(k is not None and k < sol.rank[q] for k in ranks)
    assert set(sol.strategy) == sol.region - sol.target


@pytest.mark.parametrize("inst", corpus_instances())
def test_solution_invariants(inst):
    d, tiers = inst
    for f in tiers:
        s = synth_single(d, f)
        _rank_checks(s.arena.ts, s.win, True)
        _rank_checks(s.arena.ts, s.coop, False)
        hist = shortest_histories(d, s.arena.ts)
        for q, h in hist.items():
            if q in s.win.region:
                plays = strategy_plays(d, s.arena.ts, s.kappa, q, h)
                assert all(evaluate(list(x.states), f) for x in plays)
                assert all(len(x) - len(h) <= len(s.win.region) + 1 for x in plays)
            if q in s.coop.region:
                horizon = len(s.coop.region) + 1
                plays = strategy_plays(d, s.arena.ts, s.nu, q, h, horizon=horizon)
                assert any(evaluate(list(x.states), f) for x in plays)


@pytest.mark.parametrize("inst", corpus_instances())
def test_winpend_invariants(inst):
    d, tiers = inst
    singles = [synth_single(d, f) for f in tiers]
    for i in range(len(tiers)):
        for j in range(i + 1, len(tiers)):
            s1, s2 = singles[i], singles[j]
            pr = pair_from_singles(s1, s2, i + 1, j + 1)
            wp, ts = pr.wp, pr.arena.ts
            for q, k in wp.rank.items():
                if k == 0:
                    continue
                a = wp.strategy[q]
                succ = [ts.delta[q][a, r] for r in ts.alphabet.reactions]
                assert any(wp.rank.get(t, k) < k for t in succ)
                assert all(wp.rank.get(t, k) < k or t in wp.escape for t in succ)
                # never a reaction that stays in WP at rank >= k
                assert not any(t in wp.region and wp.rank[t] >= k for t in succ)
            assert not (wp.region & wp.escape)
