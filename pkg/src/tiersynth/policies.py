"""Environment policies for simulation.

A policy is a callable `policy(executor, action) -> reaction`.  The greedy
policies are one-step heuristics, not optimal opponents or helpers.
"""

from __future__ import annotations

import random
from itertools import cycle
from typing import Callable, Sequence


class Scripted:
    """Replays a fixed reaction list, cycling when it runs out."""

    def __init__(self, reactions: Sequence[str]):
        if not reactions:
            raise ValueError("scripted policy needs at least one reaction")
        self.reactions = list(reactions)
        self._it = cycle(self.reactions)

    def __call__(self, e, action):
        return next(self._it)


class RandomEnv:
    """Uniform choice among legal reactions; reproducible per seed."""

    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)

    def __call__(self, e, action):
        return self.rng.choice(sorted(e.legal_reactions(action)))


def _successor(e, action, reaction):
    child = e.fork()
    child.advance(action, reaction)
    return child


def _in_target(e, child) -> bool:
    """Whether `child` is still inside the region the last dispatch aimed at."""
    d = e.log[-1] if e.log else e.explain()
    syn = e.synthesis
    if d.source == "omega":
        return (child.cursors[d.j - 1], child.cursors[d.l - 1]) in syn.pairs[d.j, d.l].wp
    if d.source == "kappa":
        return child.cursors[d.j - 1] in syn.objectives[d.j - 1].win
    if d.source == "nu":
        return child.cursors[d.m - 1] in syn.objectives[d.m - 1].coop
    return False


def _levels(child) -> tuple[int, int]:
    """(highest tier not lost, highest tier won) at a successor."""
    values = child.values()
    alive = max((i + 1 for i, v in enumerate(values) if v != "lose"), default=0)
    won = max((i + 1 for i, v in enumerate(values) if v == "win"), default=0)
    return alive, won


class GreedyAdversarial:
    """Prefers reactions that push the play out of the dispatch's target
    region, then ones that lower the best still-reachable tier."""

    def __call__(self, e, action):
        best = None
        for r in sorted(e.legal_reactions(action)):
            child = _successor(e, action, r)
            key = (_in_target(e, child), *_levels(child), r)
            best = key if best is None or key < best else best
        return best[-1]


class GreedyCooperative:
    """Prefers reactions that keep the highest tier cooperatively satisfiable,
    then ones that make more tiers enforceable."""

    def __call__(self, e, action):
        best = None
        for r in sorted(e.legal_reactions(action)):
            alive, won = _levels(_successor(e, action, r))
            key = (-alive, -won, r)
            best = key if best is None or key < best else best
        return best[-1]


class Interactive:
    """Asks on the terminal which legal reaction to play."""

    def __init__(self, read: Callable[[str], str] | None = None,
                 write: Callable[[str], None] | None = None):
        self.read = read or (lambda prompt: input(prompt))
        self.write = write or print

    def __call__(self, e, action):
        options = sorted(e.legal_reactions(action))
        self.write(f"agent plays {action} in {sorted(e.state)}")
        for k, r in enumerate(options):
            self.write(f"  [{k}] {r}")
        while True:
            answer = self.read("reaction> ").strip()
            if answer in options:
                return answer
            if answer.isdigit() and int(answer) < len(options):
                return options[int(answer)]
            self.write(f"pick 0..{len(options) - 1} or a reaction name")


def make_policy(spec: str, seed: int = 0, read=None, write=None):
    """Build a policy from its command-line form:
    scripted:r1,r2 | random[:seed] | greedy-adversarial | greedy-cooperative | interactive"""
    kind, _, arg = spec.partition(":")
    if kind == "scripted":
        return Scripted([x for x in arg.split(",") if x])
    if kind == "random":
        return RandomEnv(int(arg) if arg else seed)
    if kind == "greedy-adversarial":
        return GreedyAdversarial()
    if kind == "greedy-cooperative":
        return GreedyCooperative()
    if kind == "interactive":
        return Interactive(read, write)
    raise ValueError(f"unknown environment policy {spec!r}")
