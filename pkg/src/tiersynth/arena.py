"""Game arenas: domain DFA x objective DFA, and products of two arenas."""

from __future__ import annotations

from collections import deque

from .automata import Dfa, PropSymbols, TransitionSystem, product_ts
from .domain import AG_ERR, ENV_ERR, DomainDfa, state_text
from .errors import AlphabetMismatch, ResourceError, state_cap


class Arena:
    """Reachable part of the product of a domain DFA and an objective DFA.

    States are pairs (domain state or error sink, objective DFA state).  The
    objective component reads the domain state after every legal move and
    freezes once the domain component enters an error sink.
    """

    def __init__(self, dd: DomainDfa, objective: Dfa, ts: TransitionSystem):
        self.dd = dd
        self.domain = dd.domain
        self.objective = objective
        self.ts = ts
        states = ts.states
        self.ag_err = frozenset(q for q in states if q[0] == AG_ERR)
        self.env_err = frozenset(q for q in states if q[0] == ENV_ERR)
        self.acc = frozenset(q for q in states if q[1] in objective.final)
        self.adv = frozenset(q for q in states
                             if q[0] != AG_ERR and (q[0] == ENV_ERR or q in self.acc))
        self.coop = frozenset(q for q in states
                              if q[0] not in (AG_ERR, ENV_ERR) and q in self.acc)
        self.index = {q: i for i, q in enumerate(states)}

    @property
    def initial(self):
        return self.ts.initial

    def __len__(self):
        return len(self.ts)

    def tag(self, q) -> dict:
        s, x = q
        return {"domain": s if isinstance(s, str) else sorted(s), "dfa": x}

    def locate(self, history) -> tuple:
        """Arena state reached by a domain trace's move sequence."""
        return self.ts.run(history.moves)


def _letter(state, atoms: frozenset) -> frozenset:
    return state & atoms


def build_arena(dd: DomainDfa, objective: Dfa) -> Arena:
    if not isinstance(objective.alphabet, PropSymbols):
        raise AlphabetMismatch("objective DFA must read sets of fluents")
    atoms = frozenset(objective.alphabet.atoms)
    extra = atoms - set(dd.domain.fluents)
    if extra:
        raise AlphabetMismatch(f"objective atoms {sorted(extra)} are not fluents")
    dts, ots = dd.ts, objective.ts
    letters = dts.alphabet.letters()
    cap = state_cap()

    s0 = dts.initial
    init = (s0, ots.step(ots.initial, _letter(s0, atoms)))
    seen = {init}
    order = [init]
    delta = {}
    queue = deque(order)
    while queue:
        q = queue.popleft()
        s, x = q
        row = {}
        if s in (AG_ERR, ENV_ERR):
            row = {m: q for m in letters}
        else:
            drow = dts.delta[s]
            for m in letters:
                t = drow[m]
                nxt = (t, x) if t in (AG_ERR, ENV_ERR) else (t, ots.step(x, _letter(t, atoms)))
                if nxt not in seen:
                    if len(seen) >= cap:
                        raise ResourceError(f"arena exceeds {cap} states")
                    seen.add(nxt)
                    order.append(nxt)
                    queue.append(nxt)
                row[m] = nxt
        delta[q] = row
    labels = {q: f"{state_text(q[0])}/{q[1]}" for q in order}
    ts = TransitionSystem(dts.alphabet, order, init, delta, labels, check=False)
    return Arena(dd, objective, ts)


class PairArena:
    """Synchronized product of two arenas over the same domain."""

    def __init__(self, a1: Arena, a2: Arena):
        if a1.domain is not a2.domain and a1.domain != a2.domain:
            raise ValueError("pair arena needs two arenas over the same domain")
        self.a1 = a1
        self.a2 = a2
        self.ts = product_ts(a1.ts, a2.ts)
        for q1, q2 in self.ts.states:
            if q1[0] != q2[0]:
                raise AssertionError("pair arena components disagree on the domain state")
        self.ts.labels = {q: f"{a1.ts.labels[q[0]]} | {a2.ts.labels[q[1]]}"
                          for q in self.ts.states}
        self.index = {q: i for i, q in enumerate(self.ts.states)}

    @property
    def initial(self):
        return self.ts.initial

    def __len__(self):
        return len(self.ts)

    def lift(self, side: int, subset) -> frozenset:
        subset = set(subset)
        return frozenset(q for q in self.ts.states if q[side - 1] in subset)

    def tag(self, q) -> dict:
        return {"first": self.a1.tag(q[0]), "second": self.a2.tag(q[1])}


def build_pair_arena(a1: Arena, a2: Arena) -> PairArena:
    return PairArena(a1, a2)


def arena_dot(arena, win=(), coop=(), wp=(), name: str = "arena") -> str:
    """Graphviz source with regions colored: W green, C minus W yellow,
    WP with a dashed border.  Edges are grouped by target."""
    ts = arena.ts
    win, coop, wp = set(win), set(coop), set(wp)
    ids = {q: i for i, q in enumerate(ts.states)}
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  init [shape=point];"]
    for q in ts.states:
        attrs = []
        if q in win:
            attrs.append('style="filled%s", fillcolor=palegreen' % (",dashed" if q in wp else ""))
        elif q in coop:
            attrs.append('style="filled%s", fillcolor=lightyellow' % (",dashed" if q in wp else ""))
        elif q in wp:
            attrs.append("style=dashed")
        label = ts.labels.get(q, str(q)).replace('"', '\\"')
        lines.append(f'  n{ids[q]} [label="{label}"{", " if attrs else ""}{", ".join(attrs)}];')
    lines.append(f"  init -> n{ids[ts.initial]};")
    for q in ts.states:
        grouped: dict[int, list[str]] = {}
        for m in ts.alphabet.letters():
            grouped.setdefault(ids[ts.delta[q][m]], []).append("/".join(m))
        for t in sorted(grouped):
            lines.append(f'  n{ids[q]} -> n{t} [label="{" ".join(grouped[t])}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
