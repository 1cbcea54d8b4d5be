"""Reachability games on arenas over Act x React, the winning-pending
fixpoint, and positional strategies as transducers.

All solvers grow their region level by level.  A state's rank is the level
at which it joined; its strategy action is the lexicographically smallest
action witnessing that step.  Target states get no action: a play that
reaches them may stop there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable

from .automata import TransitionSystem
from .errors import AlphabetMismatch, ExecutorError

TIE_BREAK = "lexmin-action"


@dataclass
class RegionSolution:
    region: frozenset
    strategy: dict
    rank: dict
    target: frozenset = frozenset()

    def __contains__(self, q):
        return q in self.region


@dataclass
class WinPendSolution:
    region: frozenset
    rank: dict
    strategy: dict
    base: frozenset = frozenset()
    escape: frozenset = frozenset()

    def __contains__(self, q):
        return q in self.region


def _edges(ts: TransitionSystem):
    """actions (sorted), reactions, and predecessor lists t -> [(q, a)]
    with one entry per reaction."""
    actions = sorted(ts.alphabet.actions)
    reactions = list(ts.alphabet.reactions)
    preds: dict = {q: [] for q in ts.states}
    for q in ts.states:
        row = ts.delta[q]
        for a in actions:
            for r in reactions:
                preds[row[a, r]].append((q, a))
    return actions, reactions, preds


def solve_adv(ts: TransitionSystem, target: Iterable) -> RegionSolution:
    """Least fixpoint of X -> target | {q : some action keeps every reaction in X}."""
    target = frozenset(target) & set(ts.states)
    actions, reactions, preds = _edges(ts)
    remaining = {(q, a): len(reactions) for q in ts.states for a in actions}
    rank = {q: 0 for q in target}
    strategy = {}
    frontier = list(target)
    level = 0
    while frontier:
        level += 1
        found: dict = {}
        for t in frontier:
            for q, a in preds[t]:
                remaining[q, a] -= 1
                if remaining[q, a] == 0 and q not in rank:
                    if q not in found or a < found[q]:
                        found[q] = a
        for q, a in found.items():
            rank[q] = level
            strategy[q] = a
        frontier = list(found)
    return RegionSolution(frozenset(rank), strategy, rank, target)


def solve_coop(ts: TransitionSystem, target: Iterable) -> RegionSolution:
    """Least fixpoint of X -> target | {q : some move leads into X}."""
    target = frozenset(target) & set(ts.states)
    _, _, preds = _edges(ts)
    rank = {q: 0 for q in target}
    strategy = {}
    frontier = list(target)
    level = 0
    while frontier:
        level += 1
        found: dict = {}
        for t in frontier:
            for q, a in preds[t]:
                if q not in rank and (q not in found or a < found[q]):
                    found[q] = a
        for q, a in found.items():
            rank[q] = level
            strategy[q] = a
        frontier = list(found)
    return RegionSolution(frozenset(rank), strategy, rank, target)


def solve_winpend(pa, adv1: Iterable, coop2: Iterable, w1: Iterable, c2: Iterable,
                  fallback: dict | None = None) -> WinPendSolution:
    """Winning-pending fixpoint on a pair arena.

    WP_0 = adv1 x coop2.  A state joins at level i+1 when one action has a
    reaction into WP_i and sends every reaction into WP_i or into the escape
    set w1 x (not c2), where objective 1 is still enforceable but objective 2
    can no longer be met.  Region arguments are sets of component states;
    `fallback` is the first objective's winning strategy, followed on every
    pair state outside WP minus WP_0.
    """
    ts = pa.ts
    adv1, coop2, w1, c2 = set(adv1), set(coop2), set(w1), set(c2)
    base = frozenset(q for q in ts.states if q[0] in adv1 and q[1] in coop2)
    escape = frozenset(q for q in ts.states if q[0] in w1 and q[1] not in c2)
    actions, reactions, preds = _edges(ts)
    # reactions of (q, a) not yet known to land in WP or escape
    remaining = {}
    for q in ts.states:
        row = ts.delta[q]
        for a in actions:
            remaining[q, a] = sum(1 for r in reactions if row[a, r] not in escape)
    rank = {q: 0 for q in base}
    chosen = {}
    frontier = list(base)
    level = 0
    while frontier:
        level += 1
        found: dict = {}
        for t in frontier:
            for q, a in preds[t]:
                # reaching zero here implies at least one reaction lands in WP
                remaining[q, a] -= 1
                if remaining[q, a] == 0 and q not in rank:
                    if q not in found or a < found[q]:
                        found[q] = a
        for q, a in found.items():
            rank[q] = level
            chosen[q] = a
        frontier = list(found)
    fallback = fallback or {}
    strategy = {}
    for q in ts.states:
        if q in chosen:
            strategy[q] = chosen[q]
        elif q[0] in fallback:
            strategy[q] = fallback[q[0]]
    return WinPendSolution(frozenset(rank), rank, strategy, base, escape)


class Transducer:
    """A transition system with a partial output map; no output means stop."""

    def __init__(self, ts: TransitionSystem, strategy: dict, state: Hashable | None = None):
        unknown = set(strategy) - set(ts.states)
        if unknown:
            raise ValueError(f"strategy mentions unknown states: {sorted(map(str, unknown))[:3]}")
        self.ts = ts
        self.strategy = strategy
        self.state = ts.initial if state is None else state
        self.stopped = False

    def output(self):
        a = self.strategy.get(self.state)
        if a is None:
            self.stopped = True
        return a

    def advance(self, action: str, reaction: str):
        if self.stopped:
            raise ExecutorError("transducer already emitted stop")
        if (action, reaction) not in self.ts.delta[self.state]:
            raise AlphabetMismatch(f"move ({action}, {reaction}) is not in the alphabet")
        self.state = self.ts.delta[self.state][action, reaction]
        return self.state

    def reset(self):
        self.state = self.ts.initial
        self.stopped = False


def extract_transducer(ts: TransitionSystem, strategy: dict) -> Transducer:
    return Transducer(ts, strategy)
