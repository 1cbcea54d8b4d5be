"""Brute-force ground truth for small instances.

History values are decided by searching for a positional agent strategy over
(domain state, objective DFA state) keys, with satisfaction of every play
checked by the direct LTLf evaluator on the concrete trace.  Nothing here
uses the arena builder or the game solvers; the only compiled artifact used
is the objective DFA, as the memory a positional strategy needs.

Caps are hard errors: an oracle that silently truncates would be guessing.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .automata import Dfa
from .domain import AG_ERR, ENV_ERR, Domain, DomainTrace, is_legal_trace
from .errors import ResourceError
from .ltlf import Formula, evaluate, parse_formula

DEFAULT_STATE_CAP = 12
DEFAULT_ACTION_CAP = 6


@dataclass
class ValueVerdict:
    value: str                      # "win", "pend" or "lose"
    strategy: dict | None = None    # key -> action, for win (keys absent = stop)
    play: DomainTrace | None = None  # an accepting continuation, for pend
    explored: int = 0

    def __eq__(self, other):
        if isinstance(other, str):
            return self.value == other
        return isinstance(other, ValueVerdict) and self.value == other.value

    def __str__(self):
        return self.value


class _Game:
    """Successor and acceptance queries on keys (domain state, dfa state)."""

    def __init__(self, d: Domain, f: Formula, dfa: Dfa | None = None):
        from .synthesis import objective_dfa
        self.d = d
        self.f = f
        self.dfa = dfa or objective_dfa(d, f)
        self.atoms = frozenset(self.dfa.alphabet.atoms)
        self._acc: dict = {}

    def start(self, h: DomainTrace):
        q = self.dfa.ts.run([s & self.atoms for s in h.states])
        return (h.last, q)

    def step(self, key, a: str, r: str):
        s, q = key
        if s in (AG_ERR, ENV_ERR):
            return key
        if a not in self.d.alpha(s):
            return (AG_ERR, q)
        if r not in self.d.beta(s, a):
            return (ENV_ERR, q)
        t = self.d.delta(s, a, r)
        return (t, self.dfa.ts.step(q, t & self.atoms))

    def legal(self, key):
        """(action, [(reaction, successor)...]) for every legal action."""
        s = key[0]
        for a in self.d.alpha(s):
            yield a, [(r, self.step(key, a, r)) for r in self.d.beta(s, a)]

    def accepting(self, states: tuple) -> bool:
        v = self._acc.get(states)
        if v is None:
            v = self._acc[states] = evaluate(list(states), self.f)
        return v

    def reachable(self, key) -> set:
        seen = {key}
        stack = [key]
        while stack:
            k = stack.pop()
            for _, succ in self.legal(k):
                for _, t in succ:
                    if t not in seen:
                        seen.add(t)
                        stack.append(t)
        return seen


def _check_caps(game: _Game, key, state_cap: int, action_cap: int):
    reach = game.reachable(key)
    if len(reach) > state_cap:
        raise ResourceError(f"oracle: {len(reach)} reachable states exceed cap {state_cap}")
    if len(game.d.actions) > action_cap:
        raise ResourceError(f"oracle: {len(game.d.actions)} actions exceed cap {action_cap}")


def _find_winning(game: _Game, h: DomainTrace, key) -> dict | None:
    """Search for a positional strategy under which every play from h is
    finite and satisfies the objective.

    The strategy stops exactly at accepting keys (stopping there wins; at a
    non-accepting key stopping loses).  A key met again on the current path
    means the positional strategy loops forever, so that branch fails.  Keys
    proven winning relative to the current path stay assigned; assignments
    made under a failed choice are rolled back.
    """
    sigma: dict = {}
    done: set = set()

    def win(k, states: tuple, path: frozenset) -> bool:
        if game.accepting(states):
            return True
        if k in path:
            return False
        if k in done:
            return True
        # keys on the path are never done, and done keys are never revisited
        # through the path, so a done key stays winning for any later path
        inner = path | {k}
        for a, succ in game.legal(k):
            saved_sigma, saved_done = dict(sigma), set(done)
            sigma[k] = a
            if all(win(t, states + (t[0],), inner) for _, t in succ):
                done.add(k)
                return True
            sigma.clear()
            sigma.update(saved_sigma)
            done.clear()
            done.update(saved_done)
        return False

    if win(key, h.states, frozenset()):
        return sigma
    return None


def _verify_winning(game: _Game, h: DomainTrace, key, sigma: dict, horizon: int) -> bool:
    """Expand every play of `sigma` from h; all must end, satisfied, within horizon."""
    stack = [(key, h.states, 0)]
    while stack:
        k, states, depth = stack.pop()
        if game.accepting(states):
            continue
        if depth > horizon or k not in sigma:
            return False
        a = sigma[k]
        for r in game.d.beta(k[0], a):
            t = game.step(k, a, r)
            stack.append((t, states + (t[0],), depth + 1))
    return True


def _find_accepting_play(game: _Game, h: DomainTrace, key) -> DomainTrace | None:
    """Shortest legal continuation of h satisfying the objective (BFS)."""
    if game.accepting(h.states):
        return h
    queue = deque([(key, h)])
    seen = {key}
    while queue:
        k, trace = queue.popleft()
        for a, succ in game.legal(k):
            for r, t in succ:
                ext = trace.extend(a, r, t[0])
                if game.accepting(ext.states):
                    return ext
                if t not in seen:
                    seen.add(t)
                    queue.append((t, ext))
    return None


def oracle_value(d: Domain, f, h: DomainTrace | None = None,
                 state_cap: int = DEFAULT_STATE_CAP,
                 action_cap: int = DEFAULT_ACTION_CAP, _game: _Game | None = None) -> ValueVerdict:
    """win / pend / lose value of objective f at legal history h."""
    f = parse_formula(f) if isinstance(f, str) else f
    h = h or DomainTrace((d.initial,))
    if not is_legal_trace(d, h):
        raise ValueError(f"illegal history: {h}")
    game = _game or _Game(d, f)
    key = game.start(h)
    _check_caps(game, key, state_cap, action_cap)
    sigma = _find_winning(game, h, key)
    if sigma is not None:
        if not _verify_winning(game, h, key, sigma, state_cap + 1):
            raise AssertionError("oracle produced a strategy that does not win")
        return ValueVerdict("win", strategy=sigma)
    play = _find_accepting_play(game, h, key)
    if play is not None:
        return ValueVerdict("pend", play=play)
    return ValueVerdict("lose")


def _key_histories(game: _Game) -> dict:
    """A shortest legal history for every reachable legal key (BFS)."""
    d = game.d
    h0 = DomainTrace((d.initial,))
    start = game.start(h0)
    hist = {start: h0}
    queue = deque([start])
    while queue:
        k = queue.popleft()
        for a, succ in game.legal(k):
            for r, t in succ:
                if t not in hist:
                    hist[t] = hist[k].extend(a, r, t[0])
                    queue.append(t)
    return hist


def _error_keys(game: _Game, keys) -> tuple[set, set]:
    ag, env = set(), set()
    for k in keys:
        for a in game.d.actions:
            for r in game.d.reactions:
                t = game.step(k, a, r)
                (ag if t[0] == AG_ERR else env if t[0] == ENV_ERR else set()).add(t)
    return ag, env


def oracle_regions(d: Domain, f, state_cap: int = DEFAULT_STATE_CAP,
                   action_cap: int = DEFAULT_ACTION_CAP) -> tuple[set, set]:
    """(W, C) as sets of (domain state or error name, dfa state) keys.

    Every legal key is classified by oracle_value on a shortest history that
    reaches it.  Error keys follow from the definitions: an environment
    error is won by the agent but not cooperatively satisfied; an agent
    error is neither.
    """
    f = parse_formula(f) if isinstance(f, str) else f
    game = _Game(d, f)
    hist = _key_histories(game)
    win, coop = set(), set()
    for k, h in hist.items():
        v = oracle_value(d, f, h, state_cap, action_cap, _game=game).value
        if v == "win":
            win.add(k)
        if v in ("win", "pend"):
            coop.add(k)
    _, env = _error_keys(game, hist)
    win |= env
    return win, coop


def oracle_winpend(d: Domain, f1, f2, state_cap: int = DEFAULT_STATE_CAP,
                   action_cap: int = DEFAULT_ACTION_CAP) -> dict:
    """Winning-pending region by naive iteration; maps pair keys to the level
    at which they enter.  Every round rescans all pair keys."""
    f1 = parse_formula(f1) if isinstance(f1, str) else f1
    f2 = parse_formula(f2) if isinstance(f2, str) else f2
    g1, g2 = _Game(d, f1), _Game(d, f2)
    w1, _ = oracle_regions(d, f1, state_cap, action_cap)
    _, c2 = oracle_regions(d, f2, state_cap, action_cap)

    h0 = DomainTrace((d.initial,))
    start = (g1.start(h0), g2.start(h0))
    pairs = {start}
    stack = [start]
    while stack:
        k1, k2 = stack.pop()
        for a in d.actions:
            for r in d.reactions:
                t = (g1.step(k1, a, r), g2.step(k2, a, r))
                if t not in pairs:
                    pairs.add(t)
                    stack.append(t)
    acc1 = {k for k in pairs if k[0][0] not in (AG_ERR, ENV_ERR) and k[0][1] in g1.dfa.final}
    acc2 = {k for k in pairs if k[1][0] not in (AG_ERR, ENV_ERR) and k[1][1] in g2.dfa.final}
    adv1_coop2 = {k for k in pairs
                  if k[0][0] != AG_ERR and (k[0][0] == ENV_ERR or k in acc1) and k in acc2}
    escape = {k for k in pairs if k[0] in w1 and k[1] not in c2}

    level = {k: 0 for k in adv1_coop2}
    i = 0
    while True:
        current = set(level)
        added = []
        for k in pairs:
            if k in current:
                continue
            for a in d.actions:
                succ = [(g1.step(k[0], a, r), g2.step(k[1], a, r)) for r in d.reactions]
                if any(t in current for t in succ) and \
                        all(t in current or t in escape for t in succ):
                    added.append(k)
                    break
        if not added:
            return level
        i += 1
        for k in added:
            level[k] = i


def enumerate_histories(d: Domain, agent, depth: int) -> list[DomainTrace]:
    """All legal histories with at most `depth` moves that are consistent with
    `agent`, root included.  `agent` is an AdaptiveExecutor (forked, never
    mutated) or a callable mapping a history to an action or None."""
    if depth > 8:
        raise ValueError("depth is limited to 8")
    from .synthesis import AdaptiveExecutor
    if isinstance(agent, AdaptiveExecutor):
        frontier = [agent.fork()]
        out = [frontier[0].history]
        for _ in range(depth):
            nxt = []
            for e in frontier:
                if e.status != "running":
                    continue
                a = e.action()
                if a is None:
                    continue
                for r in d.beta(e.state, a):
                    child = e.fork()
                    child.advance(a, r)
                    nxt.append(child)
            out.extend(c.history for c in nxt)
            frontier = nxt
        return out
    frontier = [DomainTrace((d.initial,))]
    out = list(frontier)
    for _ in range(depth):
        nxt = []
        for h in frontier:
            a = agent(h)
            if a is None:
                continue
            if a not in d.alpha(h.last):
                raise ValueError(f"agent chose inapplicable action {a} after {h}")
            for r in d.beta(h.last, a):
                nxt.append(h.extend(a, r, d.delta(h.last, a, r)))
        out.extend(nxt)
        frontier = nxt
    return out


class InfinitePlay(AssertionError):
    """A strategy under test loops forever on some play."""


def executor_plays(e, horizon: int | None = None, limit: int = 200_000) -> list[DomainTrace]:
    """Every maximal play of the executor from its current history, branching
    over legal reactions.  The executor's choice depends only on its cursors,
    so meeting the same cursors twice on one play means it never stops; that
    raises InfinitePlay unless a horizon is given, in which case plays longer
    than `horizon` further moves are dropped."""
    d = e.domain
    out: list[DomainTrace] = []
    start = len(e.history)
    stack = [(e.fork(), frozenset())]
    while stack:
        cur, path = stack.pop()
        key = tuple(cur.cursors)
        if horizon is not None:
            if len(cur.history) - start > horizon:
                continue
        elif key in path:
            raise InfinitePlay(f"executor loops after {cur.history}")
        a = cur.action()
        if a is None:
            out.append(cur.history)
            if len(out) > limit:
                raise ResourceError("too many plays")
            continue
        reactions = d.beta(cur.state, a)
        if not reactions:
            raise AssertionError(f"executor chose inapplicable {a} after {cur.history}")
        for r in reactions:
            child = cur.fork()
            child.advance(a, r)
            stack.append((child, path | {key}))
    return out


def strategy_plays(d: Domain, ts, strategy: dict, start, history: DomainTrace,
                   horizon: int | None = None, limit: int = 200_000) -> list[DomainTrace]:
    """Maximal plays of a positional strategy on an arena (or pair arena)
    from `start`, reached by `history`.  Arena states must expose the domain
    state through their first component (first of first, for pairs).

    Without a horizon a looping play raises InfinitePlay.  With one, plays
    longer than `horizon` moves are dropped instead, which suits cooperative
    strategies that only promise some terminating play.
    """

    def dom(q):
        while isinstance(q, tuple):
            q = q[0]
        return q

    out: list[DomainTrace] = []
    stack = [(start, history, frozenset())]
    while stack:
        q, h, path = stack.pop()
        if horizon is not None and len(h) - len(history) > horizon:
            continue
        if q in path and horizon is None:
            raise InfinitePlay(f"strategy loops after {h}")
        a = strategy.get(q)
        if a is None:
            out.append(h)
            if len(out) > limit:
                raise ResourceError("too many plays")
            continue
        s = dom(q)
        if a not in d.alpha(s):
            raise AssertionError(f"strategy chose inapplicable {a} after {h}")
        for r in d.beta(s, a):
            t = ts.delta[q][a, r]
            stack.append((t, h.extend(a, r, d.delta(s, a, r)), path | {q}))
    return out


def shortest_histories(d: Domain, ts) -> dict:
    """A shortest legal history reaching each legally reachable arena state."""
    h0 = DomainTrace((d.initial,))
    hist = {ts.initial: h0}
    queue = deque([ts.initial])
    while queue:
        q = queue.popleft()
        s = hist[q].last
        for a in d.alpha(s):
            for r in d.beta(s, a):
                t = ts.delta[q][a, r]
                if t not in hist:
                    hist[t] = hist[q].extend(a, r, d.delta(s, a, r))
                    queue.append(t)
    return hist
