"""Single-objective and pair synthesis, tier validation, and the adaptive
executor that combines all of them at run time.

The executor works on integer-indexed tables (`ObjectiveTable`,
`PairTable`) so that a freshly synthesized strategy and one loaded back from
a bundle directory run through the same code.
"""

from __future__ import annotations

import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .arena import Arena, PairArena, build_arena
from .automata import Dfa, to_dfa
from .domain import (AG_ERR, ENV_ERR, Domain, DomainDfa, DomainTrace, domain_to_dfa)
from .errors import AlphabetMismatch, ExecutorError, TierError
from .games import (RegionSolution, Transducer, WinPendSolution, extract_transducer,
                    solve_adv, solve_coop, solve_winpend)
from .ltlf import Formula, atoms_of, evaluate, parse_formula, to_text


def _as_formula(f) -> Formula:
    return parse_formula(f) if isinstance(f, str) else f


def objective_dfa(d: Domain, f: Formula) -> Dfa:
    """DFA for f over the fluents f mentions (other fluents never matter)."""
    atoms = atoms_of(f)
    unknown = atoms - set(d.fluents)
    if unknown:
        raise AlphabetMismatch(f"formula mentions unknown fluents {sorted(unknown)}")
    return to_dfa(f, [x for x in d.fluents if x in atoms])


# ----------------------------------------------------------- Alg. 1

@dataclass
class SingleSynthesis:
    formula: Formula
    dfa: Dfa
    arena: Arena
    win: RegionSolution
    coop: RegionSolution

    @property
    def kappa(self) -> dict:
        return self.win.strategy

    @property
    def nu(self) -> dict:
        return self.coop.strategy

    def winning_transducer(self) -> Transducer:
        return extract_transducer(self.arena.ts, self.win.strategy)

    def cooperative_transducer(self) -> Transducer:
        return extract_transducer(self.arena.ts, self.coop.strategy)


def synth_single(d: Domain, f, dd: DomainDfa | None = None) -> SingleSynthesis:
    f = _as_formula(f)
    dd = dd or domain_to_dfa(d)
    dfa = objective_dfa(d, f)
    arena = build_arena(dd, dfa)
    win = solve_adv(arena.ts, arena.adv)
    coop = solve_coop(arena.ts, arena.coop)
    return SingleSynthesis(f, dfa, arena, win, coop)


# ----------------------------------------------------------- Alg. 2

@dataclass
class PairSynthesis:
    first: int
    second: int
    arena: PairArena
    wp: WinPendSolution

    @property
    def omega(self) -> dict:
        return self.wp.strategy

    def transducer(self) -> Transducer:
        return extract_transducer(self.arena.ts, self.wp.strategy)


def pair_from_singles(s1: SingleSynthesis, s2: SingleSynthesis,
                      first: int = 1, second: int = 2) -> PairSynthesis:
    pa = PairArena(s1.arena, s2.arena)
    wp = solve_winpend(pa, s1.arena.adv, s2.arena.coop, s1.win.region, s2.coop.region,
                       fallback=s1.win.strategy)
    return PairSynthesis(first, second, pa, wp)


def synth_winpend(d: Domain, f1, f2, check: bool = True) -> PairSynthesis:
    f1, f2 = _as_formula(f1), _as_formula(f2)
    if check:
        witness = check_multitier(d, [f1, f2])
        if witness is not None:
            raise TierError("second objective is not contained in the first", witness)
    dd = domain_to_dfa(d)
    return pair_from_singles(synth_single(d, f1, dd), synth_single(d, f2, dd))


# ----------------------------------------------------------- tiers

def check_multitier(d: Domain, goals: Sequence) -> tuple[DomainTrace, int] | None:
    """None if every tier's legal models contain the next tier's; otherwise the
    shortest legal trace satisfying tier i+1 but not tier i, with i (1-based)."""
    goals = [_as_formula(g) for g in goals]
    if not goals:
        raise ValueError("at least one goal is required")
    dfas = [objective_dfa(d, g) for g in goals]
    for i in range(len(goals) - 1):
        found = _containment_witness(d, dfas[i], dfas[i + 1])
        if found is not None:
            return found, i + 1
    return None


def _containment_witness(d: Domain, weak: Dfa, strong: Dfa) -> DomainTrace | None:
    wa, sa = frozenset(weak.alphabet.atoms), frozenset(strong.alphabet.atoms)
    s0 = d.initial
    start = (s0, weak.ts.step(weak.initial, s0 & wa), strong.ts.step(strong.initial, s0 & sa))
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        s, x, y = node
        if y in strong.final and x not in weak.final:
            states, moves = [], []
            while node is not None:
                states.append(node[0])
                link = parent[node]
                if link is not None:
                    moves.append(link[1])
                    node = link[0]
                else:
                    node = None
            return DomainTrace(tuple(reversed(states)), tuple(reversed(moves)))
        for a in d.alpha(s):
            for r in d.beta(s, a):
                t = d.delta(s, a, r)
                nxt = (t, weak.ts.step(x, t & wa), strong.ts.step(y, t & sa))
                if nxt not in parent:
                    parent[nxt] = (node, (a, r))
                    queue.append(nxt)
    return None


# ----------------------------------------------------------- tables

@dataclass
class ObjectiveTable:
    """An objective's arena with regions and strategies, keyed by state id."""

    formula: Formula
    tags: list            # per id: (domain state or error name, dfa state)
    succ: list            # per id: {(action, reaction): id}
    win: frozenset
    coop: frozenset
    kappa: dict
    nu: dict
    win_rank: dict
    coop_rank: dict
    initial: int = 0

    def value(self, q: int) -> str:
        if q in self.win:
            return "win"
        return "pend" if q in self.coop else "lose"

    @classmethod
    def from_single(cls, s: SingleSynthesis) -> "ObjectiveTable":
        idx = s.arena.index
        states = s.arena.ts.states
        ids = lambda xs: frozenset(idx[q] for q in xs)
        return cls(
            formula=s.formula,
            tags=list(states),
            succ=[{m: idx[t] for m, t in s.arena.ts.delta[q].items()} for q in states],
            win=ids(s.win.region),
            coop=ids(s.coop.region),
            kappa={idx[q]: a for q, a in s.win.strategy.items()},
            nu={idx[q]: a for q, a in s.coop.strategy.items()},
            win_rank={idx[q]: k for q, k in s.win.rank.items()},
            coop_rank={idx[q]: k for q, k in s.coop.rank.items()},
            initial=idx[s.arena.initial],
        )


@dataclass
class PairTable:
    """WP region and combined strategy, keyed by (first id, second id)."""

    first: int
    second: int
    states: list          # pair keys in BFS order
    wp: frozenset
    omega: dict
    rank: dict

    @classmethod
    def from_pair(cls, p: PairSynthesis) -> "PairTable":
        i1, i2 = p.arena.a1.index, p.arena.a2.index
        key = lambda q: (i1[q[0]], i2[q[1]])
        return cls(
            first=p.first,
            second=p.second,
            states=[key(q) for q in p.arena.ts.states],
            wp=frozenset(key(q) for q in p.wp.region),
            omega={key(q): a for q, a in p.wp.strategy.items()},
            rank={key(q): k for q, k in p.wp.rank.items()},
        )


# ----------------------------------------------------------- Alg. 3

@dataclass
class MultiTierSynthesis:
    domain: Domain
    goals: list
    objectives: list          # ObjectiveTable per tier, index 0 is tier 1
    pairs: dict               # (i, j) 1-based -> PairTable
    report: dict = field(default_factory=dict)
    singles: list | None = None
    pair_syntheses: dict | None = None

    @property
    def n(self) -> int:
        return len(self.goals)


def _single_job(args):
    d, f = args
    return synth_single(d, f)


def _pair_job(args):
    s1, s2, i, j = args
    return PairTable.from_pair(pair_from_singles(s1, s2, i, j))


def solve_tiers(d: Domain, goals: Sequence, jobs: int = 1, check: bool = True,
                keep: bool = False) -> MultiTierSynthesis:
    """Run every single-objective and every pair synthesis for a tier list.

    Pair syntheses reuse the arenas and regions of the single syntheses.
    With jobs > 1 both phases run in a process pool.  `keep` retains the
    full synthesis objects (arenas, solutions) for inspection.
    """
    goals = [_as_formula(g) for g in goals]
    if check:
        witness = check_multitier(d, goals)
        if witness is not None:
            trace, i = witness
            raise TierError(f"tier {i + 1} is not contained in tier {i}", witness)
    n = len(goals)
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    t0 = time.perf_counter()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            singles = list(pool.map(_single_job, [(d, f) for f in goals]))
            t1 = time.perf_counter()
            pair_tables = list(pool.map(
                _pair_job, [(singles[i - 1], singles[j - 1], i, j) for i, j in pairs]))
        pair_syn = None
    else:
        dd = domain_to_dfa(d)
        singles = [synth_single(d, f, dd) for f in goals]
        t1 = time.perf_counter()
        pair_syn = {(i, j): pair_from_singles(singles[i - 1], singles[j - 1], i, j)
                    for i, j in pairs}
        pair_tables = [PairTable.from_pair(pair_syn[p]) for p in pairs]
    t2 = time.perf_counter()
    report = {
        "objectives": n,
        "single_solves": len(singles),
        "pair_solves": len(pair_tables),
        "arena_states": [len(s.arena) for s in singles],
        "pair_states": [len(p.states) for p in pair_tables],
        "seconds_single": t1 - t0,
        "seconds_pair": t2 - t1,
    }
    return MultiTierSynthesis(
        domain=d,
        goals=goals,
        objectives=[ObjectiveTable.from_single(s) for s in singles],
        pairs={(p.first, p.second): p for p in pair_tables},
        report=report,
        singles=singles if keep else None,
        pair_syntheses=pair_syn if keep else None,
    )


@dataclass
class Dispatch:
    j: int
    l: int
    m: int
    source: str          # "omega", "kappa", "nu" or "stop"
    action: str | None
    values: list         # per tier: "win" / "pend" / "lose"
    wp: list             # tiers i > j whose pair state with j lies in WP

    def as_dict(self) -> dict:
        return {"j": self.j, "l": self.l, "m": self.m, "source": self.source,
                "action": self.action, "values": self.values, "wp": self.wp}


class AdaptiveExecutor:
    """Runs the adaptive strategy for a tier list one step at a time.

    One cursor per objective arena; the cursor of pair (i, j) is the pair of
    the two objective cursors, which is exactly the state the synchronized
    product reaches on the same moves.
    """

    def __init__(self, synthesis: MultiTierSynthesis):
        self.synthesis = synthesis
        self.domain = synthesis.domain
        self.cursors = [t.initial for t in synthesis.objectives]
        self.history = DomainTrace((self.domain.initial,))
        self.status = "running"
        self.pending: str | None = None
        self.log: list[Dispatch] = []

    @property
    def n(self) -> int:
        return self.synthesis.n

    @property
    def state(self):
        """Current domain state, or the error sink the play fell into."""
        return self.synthesis.objectives[0].tags[self.cursors[0]][0]

    def fork(self) -> "AdaptiveExecutor":
        other = object.__new__(AdaptiveExecutor)
        other.synthesis = self.synthesis
        other.domain = self.domain
        other.cursors = list(self.cursors)
        other.history = self.history
        other.status = self.status
        other.pending = self.pending
        other.log = list(self.log)
        return other

    def values(self) -> list[str]:
        return [t.value(q) for t, q in zip(self.synthesis.objectives, self.cursors)]

    def explain(self) -> Dispatch:
        objs = self.synthesis.objectives
        n = self.n
        values = self.values()
        j = max((i for i in range(1, n + 1) if values[i - 1] == "win"), default=0)
        wp = []
        if j > 0:
            for i in range(j + 1, n + 1):
                if (self.cursors[j - 1], self.cursors[i - 1]) in self.synthesis.pairs[j, i].wp:
                    wp.append(i)
        l = max(wp, default=0)
        m = max((i for i in range(1, n + 1) if values[i - 1] != "lose"), default=0)
        if l > j > 0:
            pair = (self.cursors[j - 1], self.cursors[l - 1])
            source, action = "omega", self.synthesis.pairs[j, l].omega.get(pair)
        elif j > 0:
            source, action = "kappa", objs[j - 1].kappa.get(self.cursors[j - 1])
        elif m > 0:
            source, action = "nu", objs[m - 1].nu.get(self.cursors[m - 1])
        else:
            source, action = "stop", None
        return Dispatch(j, l, m, source, action, values, wp)

    def action(self) -> str | None:
        """Next action, or None to stop (after which nothing more is accepted)."""
        if self.status != "running":
            raise ExecutorError("executor has stopped")
        if self.pending is not None:
            return self.pending
        dispatch = self.explain()
        self.log.append(dispatch)
        if dispatch.action is None:
            self.status = "stopped"
        self.pending = dispatch.action
        return dispatch.action

    def legal_reactions(self, action: str | None = None) -> tuple[str, ...]:
        s = self.state
        if isinstance(s, str):
            return ()
        return self.domain.beta(s, action if action is not None else self.pending)

    def advance(self, action: str, reaction: str):
        if self.status != "running":
            raise ExecutorError("executor has stopped")
        if self.pending is None:
            raise ExecutorError("advance called before action")
        if action != self.pending:
            raise ExecutorError(f"advance with {action!r} but the executor chose {self.pending!r}")
        if reaction not in self.domain.reactions:
            raise AlphabetMismatch(f"unknown reaction {reaction!r}")
        self.cursors = [t.succ[q][action, reaction]
                        for t, q in zip(self.synthesis.objectives, self.cursors)]
        self.history = DomainTrace(self.history.states + (self.state,),
                                   self.history.moves + ((action, reaction),))
        self.pending = None
        return self.state


def synth_multitier(d: Domain, goals: Sequence, jobs: int = 1) -> AdaptiveExecutor:
    return AdaptiveExecutor(solve_tiers(d, goals, jobs=jobs))


# ----------------------------------------------------------- simulation

@dataclass
class PlayResult:
    trace: DomainTrace
    verdicts: list[bool]
    stopped: bool
    truncated: bool
    dispatches: list = field(default_factory=list)

    @property
    def highest(self) -> int:
        """Highest satisfied tier (0 if none)."""
        return max((i + 1 for i, v in enumerate(self.verdicts) if v), default=0)

    def to_json(self) -> dict:
        return {
            "trace": self.trace.to_json(),
            "verdicts": self.verdicts,
            "highest_tier": self.highest,
            "stopped": self.stopped,
            "truncated": self.truncated,
            "dispatch": [d.as_dict() for d in self.dispatches],
        }


def verdicts(goals: Sequence[Formula], trace: DomainTrace) -> list[bool]:
    """Satisfaction of every tier on the legal part of a trace, computed with
    the direct evaluator."""
    states = [s for s in trace.states if not isinstance(s, str)]
    return [evaluate(states, g) for g in goals]


def play(e: AdaptiveExecutor, env: Callable, max_steps: int = 100,
         on_step: Callable | None = None) -> PlayResult:
    """Alternate executor actions and environment reactions until the executor
    stops or `max_steps` moves were made.  `env(executor, action)` returns a
    reaction; `on_step(dispatch, reaction)` observes each step."""
    steps = 0
    truncated = False
    while True:
        a = e.action()
        if a is None:
            break
        if steps >= max_steps:
            truncated = True
            break
        r = env(e, a)
        if on_step is not None:
            on_step(e.log[-1], r)
        e.advance(a, r)
        steps += 1
    return PlayResult(e.history, verdicts(e.synthesis.goals, e.history),
                      stopped=e.status == "stopped", truncated=truncated,
                      dispatches=list(e.log))
