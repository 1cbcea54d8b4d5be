"""Seeded generators for random formulas, traces, domains and tier lists.

Used by the test suite and the demos; everything is a pure function of the
random generator passed in.
"""

from __future__ import annotations

import random
from itertools import combinations

from .domain import Domain, parse_domain
from .ltlf import (FALSE, TRUE, Always, And, Atom, Eventually, Formula, Implies,
                   Next, Not, Or, Release, Until, WeakNext)

_UNARY = (Not, Next, WeakNext, Eventually, Always)
_BINARY = (And, Or, Implies, Until, Release)


def random_formula(rng: random.Random, atoms, depth: int = 5) -> Formula:
    """A formula of nesting depth at most `depth` over `atoms`."""
    atoms = list(atoms)
    if depth <= 1 or rng.random() < 0.25:
        k = rng.randrange(len(atoms) + 2) if atoms else rng.randrange(2)
        if k < len(atoms):
            return Atom(atoms[k])
        return TRUE if k % 2 == 0 else FALSE
    if rng.random() < 0.45:
        return rng.choice(_UNARY)(random_formula(rng, atoms, depth - 1))
    op = rng.choice(_BINARY)
    return op(random_formula(rng, atoms, depth - 1), random_formula(rng, atoms, depth - 1))


def random_trace(rng: random.Random, atoms, length: int) -> list[frozenset]:
    atoms = list(atoms)
    return [frozenset(a for a in atoms if rng.random() < 0.5) for _ in range(length)]


def all_traces(atoms, max_len: int):
    """Every non-empty trace over 2^atoms up to max_len letters."""
    atoms = list(atoms)
    letters = [frozenset(c) for k in range(len(atoms) + 1) for c in combinations(atoms, k)]
    layer = [[]]
    for _ in range(max_len):
        layer = [t + [x] for t in layer for x in letters]
        yield from layer


def random_domain_doc(rng: random.Random, n_fluents: int = 3, n_states: int = 5,
                      n_actions: int = 3, n_reactions: int = 2) -> dict:
    """A domain document whose states are distinct fluent sets; every state
    has at least one action and reactions of one action lead to distinct
    states, so the result always validates."""
    fluents = [f"p{i}" for i in range(n_fluents)]
    subsets = [sorted(c) for k in range(n_fluents + 1) for c in combinations(fluents, k)]
    rng.shuffle(subsets)
    states = subsets[:max(1, min(n_states, len(subsets)))]
    actions = [f"a{i}" for i in range(n_actions)]
    reactions = [f"r{i}" for i in range(n_reactions)]
    transitions = []
    for s in states:
        chosen = rng.sample(actions, rng.randint(1, n_actions))
        for a in chosen:
            k = rng.randint(1, min(n_reactions, len(states)))
            targets = rng.sample(states, k)
            for r, t in zip(rng.sample(reactions, k), targets):
                transitions.append({"from": s, "action": a, "reaction": r, "to": t})
    return {"fluents": fluents, "initial": states[0], "actions": actions,
            "reactions": reactions, "transitions": transitions}


def random_domain(rng: random.Random, **kw) -> Domain:
    return parse_domain(random_domain_doc(rng, **kw))


def random_goal_atom(rng: random.Random, fluents) -> Formula:
    """A small reachability-flavoured objective, the typical shape of a tier."""
    p = Atom(rng.choice(list(fluents)))
    q = Atom(rng.choice(list(fluents)))
    shapes = [
        lambda: Eventually(p),
        lambda: Eventually(And(p, q)),
        lambda: Eventually(And(p, Not(q))),
        lambda: Eventually(And(p, Next(Eventually(q)))),
        lambda: Until(Not(p), q),
        lambda: Eventually(And(p, WeakNext(q))),
        lambda: And(Eventually(p), Always(Or(p, Not(q)))),
    ]
    return rng.choice(shapes)()


def random_tiers(rng: random.Random, fluents, n: int) -> list[Formula]:
    """n objectives where each tier conjoins a new obligation onto the previous
    one, so containment of the legal models holds by construction."""
    tiers = [random_goal_atom(rng, fluents)]
    while len(tiers) < n:
        tiers.append(And(tiers[-1], random_goal_atom(rng, fluents)))
    return tiers


def corpus(seed: int = 7, size: int = 24, **kw) -> list[Domain]:
    """A reproducible list of small random domains."""
    rng = random.Random(seed)
    out = []
    for _ in range(size):
        out.append(random_domain(
            rng,
            n_fluents=kw.get("n_fluents", rng.choice([2, 3])),
            n_states=kw.get("n_states", rng.randint(3, 6)),
            n_actions=kw.get("n_actions", rng.choice([2, 3])),
            n_reactions=kw.get("n_reactions", 2),
        ))
    return out
