"""Deterministic transition systems, DFAs, and LTLf-to-DFA compilation.

The compiler works by formula progression.  A DFA state is a pair
``(residual, flag)``: the residual is what the rest of the word must satisfy,
kept as a reduced ordered BDD over its temporal obligations so that equal
residuals are recognized exactly; the flag records whether the prefix read so
far already satisfies the formula.  Acceptance is therefore state based even
though finite-trace satisfaction depends on where the word ends.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product as _cartesian
from typing import Hashable, Iterable, Sequence

from .bdd import BDD
from .errors import AlphabetMismatch, ResourceError, state_cap
from .ltlf import (
    FALSE, TRUE, And, Atom, FalseF, Formula, Next, Not, Or, Release, TrueF,
    Until, WeakNext, atoms_of, to_nnf, to_text,
)

DEFAULT_LETTER_CAP = 2 ** 20

State = Hashable


@dataclass(frozen=True)
class PropSymbols:
    """The alphabet 2^atoms; letters are frozensets of atom names."""

    atoms: tuple[str, ...]

    def letters(self) -> list[frozenset[str]]:
        n = len(self.atoms)
        return [frozenset(a for i, a in enumerate(self.atoms) if mask >> i & 1)
                for mask in range(1 << n)]

    def __len__(self):
        return 1 << len(self.atoms)


@dataclass(frozen=True)
class Moves:
    """The alphabet Act x React; letters are (action, reaction) pairs."""

    actions: tuple[str, ...]
    reactions: tuple[str, ...]

    def letters(self) -> list[tuple[str, str]]:
        return list(_cartesian(self.actions, self.reactions))

    def __len__(self):
        return len(self.actions) * len(self.reactions)


class TransitionSystem:
    """A deterministic transition system with a total transition map.

    `states` fixes an order (used for serialization and DOT output);
    `delta[q][letter]` is the successor of q on letter.
    """

    def __init__(self, alphabet, states: Sequence[State], initial: State,
                 delta: dict, labels: dict | None = None, check: bool = True):
        self.alphabet = alphabet
        self.states = tuple(states)
        self.initial = initial
        self.delta = delta
        self.labels = labels or {}
        if check:
            self._check()

    def _check(self):
        known = set(self.states)
        if self.initial not in known:
            raise ValueError(f"initial state {self.initial!r} is not a state")
        letters = self.alphabet.letters()
        for q in self.states:
            row = self.delta.get(q)
            if row is None or any(x not in row for x in letters):
                raise ValueError(f"transition map is not total at {q!r}")
            if any(t not in known for t in row.values()):
                raise ValueError(f"transition from {q!r} leaves the state set")

    def __len__(self):
        return len(self.states)

    def step(self, q: State, letter) -> State:
        try:
            return self.delta[q][letter]
        except KeyError:
            raise AlphabetMismatch(f"letter {letter!r} is not in the alphabet") from None

    def run(self, word: Iterable, start: State | None = None) -> State:
        q = self.initial if start is None else start
        for letter in word:
            q = self.step(q, letter)
        return q

    def successors(self, q: State) -> set[State]:
        return set(self.delta[q].values())

    def reachable(self, start: State | None = None) -> list[State]:
        start = self.initial if start is None else start
        seen = {start}
        order = [start]
        queue = deque(order)
        while queue:
            q = queue.popleft()
            for t in self.delta[q].values():
                if t not in seen:
                    seen.add(t)
                    order.append(t)
                    queue.append(t)
        return order


class Dfa:
    def __init__(self, ts: TransitionSystem, final: Iterable[State]):
        self.ts = ts
        self.final = frozenset(final)
        if not self.final <= set(ts.states):
            raise ValueError("final states must be states")

    @property
    def states(self):
        return self.ts.states

    @property
    def initial(self):
        return self.ts.initial

    @property
    def alphabet(self):
        return self.ts.alphabet

    def __len__(self):
        return len(self.ts)

    def accepts(self, trace: Iterable) -> bool:
        letters = [frozenset(x) for x in trace] if isinstance(self.alphabet, PropSymbols) \
            else list(trace)
        return self.ts.run(letters) in self.final


# ----------------------------------------------------------- progression

class Progression:
    """Progression of one LTLf formula, with residuals as canonical BDD nodes.

    BDD variables are the obligation leaves of the NNF formula (atoms, X, WX,
    U and R subformulas), ordered by first occurrence.  Every residual is a
    Boolean combination of these leaves, so the set of residuals is finite.
    """

    def __init__(self, f: Formula):
        self.formula = f
        self.nnf = to_nnf(f)
        self.bdd = BDD()
        self.leaves: list[Formula] = []
        self.index: dict[Formula, int] = {}
        self._collect(self.nnf)
        self._bdd_cache: dict[Formula, int] = {}
        self._prog_cache: dict[tuple[Formula, frozenset], int] = {}
        self._emp_cache: dict[tuple[Formula, frozenset], bool] = {}
        self.initial = self.to_bdd(self.nnf)

    def _collect(self, g: Formula):
        if isinstance(g, (Atom, Next, WeakNext, Until, Release)) and g not in self.index:
            self.index[g] = len(self.leaves)
            self.leaves.append(g)
        for c in g.children():
            self._collect(c)

    def to_bdd(self, g: Formula) -> int:
        r = self._bdd_cache.get(g)
        if r is not None:
            return r
        b = self.bdd
        if isinstance(g, TrueF):
            r = b.TRUE
        elif isinstance(g, FalseF):
            r = b.FALSE
        elif isinstance(g, Not):
            r = b.neg(self.to_bdd(g.arg))
        elif isinstance(g, And):
            r = b.conj(self.to_bdd(g.left), self.to_bdd(g.right))
        elif isinstance(g, Or):
            r = b.disj(self.to_bdd(g.left), self.to_bdd(g.right))
        else:
            r = b.var(self.index[g])
        self._bdd_cache[g] = r
        return r

    def _prog(self, g: Formula, letter: frozenset) -> int:
        key = (g, letter)
        r = self._prog_cache.get(key)
        if r is not None:
            return r
        b = self.bdd
        if isinstance(g, Atom):
            r = b.TRUE if g.name in letter else b.FALSE
        elif isinstance(g, TrueF):
            r = b.TRUE
        elif isinstance(g, FalseF):
            r = b.FALSE
        elif isinstance(g, Not):
            r = b.neg(self._prog(g.arg, letter))
        elif isinstance(g, And):
            r = b.conj(self._prog(g.left, letter), self._prog(g.right, letter))
        elif isinstance(g, Or):
            r = b.disj(self._prog(g.left, letter), self._prog(g.right, letter))
        elif isinstance(g, (Next, WeakNext)):
            r = self.to_bdd(g.arg)
        elif isinstance(g, Until):
            r = b.disj(self._prog(g.right, letter),
                       b.conj(self._prog(g.left, letter), self.to_bdd(g)))
        elif isinstance(g, Release):
            r = b.conj(self._prog(g.right, letter),
                       b.disj(self._prog(g.left, letter), self.to_bdd(g)))
        else:
            raise TypeError(f"formula not in NNF: {g!r}")
        self._prog_cache[key] = r
        return r

    def _emp(self, g: Formula, letter: frozenset) -> bool:
        key = (g, letter)
        r = self._emp_cache.get(key)
        if r is not None:
            return r
        if isinstance(g, Atom):
            r = g.name in letter
        elif isinstance(g, TrueF):
            r = True
        elif isinstance(g, FalseF):
            r = False
        elif isinstance(g, Not):
            r = not self._emp(g.arg, letter)
        elif isinstance(g, And):
            r = self._emp(g.left, letter) and self._emp(g.right, letter)
        elif isinstance(g, Or):
            r = self._emp(g.left, letter) or self._emp(g.right, letter)
        elif isinstance(g, Next):
            r = False
        elif isinstance(g, WeakNext):
            r = True
        elif isinstance(g, (Until, Release)):
            r = self._emp(g.right, letter)
        else:
            raise TypeError(f"formula not in NNF: {g!r}")
        self._emp_cache[key] = r
        return r

    def progress(self, residual: int, letter: frozenset) -> int:
        """Residual after reading `letter`: for every non-empty u,
        letter.u satisfies `residual` iff u satisfies the result."""
        letter = frozenset(letter)
        return self.bdd.compose(residual, lambda v: self._prog(self.leaves[v], letter))

    def empty_continuation(self, residual: int, letter: frozenset) -> bool:
        """True iff the one-letter word <letter> satisfies `residual`."""
        letter = frozenset(letter)
        return self.bdd.evaluate(residual, lambda v: self._emp(self.leaves[v], letter))

    def to_formula(self, residual: int) -> Formula:
        """A formula (NNF) denoting the residual; used for labels."""
        memo: dict[int, Formula] = {0: FALSE, 1: TRUE}

        def go(u: int) -> Formula:
            if u in memo:
                return memo[u]
            v, lo, hi = self.bdd.node(u)
            leaf = self.leaves[v]
            pos = _conj(leaf, go(hi))
            neg = _conj(to_nnf(Not(leaf)), go(lo))
            memo[u] = _disj(pos, neg)
            return memo[u]

        return go(residual)


def _conj(a: Formula, b: Formula) -> Formula:
    if isinstance(a, FalseF) or isinstance(b, FalseF):
        return FALSE
    if isinstance(a, TrueF):
        return b
    if isinstance(b, TrueF):
        return a
    return And(a, b)


def _disj(a: Formula, b: Formula) -> Formula:
    if isinstance(a, TrueF) or isinstance(b, TrueF):
        return TRUE
    if isinstance(a, FalseF):
        return b
    if isinstance(b, FalseF):
        return a
    return Or(a, b)


def progress(f: Formula, letter: Iterable[str]) -> Formula:
    """Progress a formula through one letter, returning the residual formula."""
    p = Progression(f)
    return p.to_formula(p.progress(p.initial, frozenset(letter)))


def empty_continuation(f: Formula, letter: Iterable[str]) -> bool:
    p = Progression(f)
    return p.empty_continuation(p.initial, frozenset(letter))


def to_dfa(f: Formula, atoms: Sequence[str] | None = None,
           letter_cap: int = DEFAULT_LETTER_CAP) -> Dfa:
    """Compile `f` to a DFA over 2^atoms accepting exactly its non-empty models.

    `atoms` defaults to the sorted atoms of `f`.  States are numbered in BFS
    order from the initial state; `dfa.ts.labels` maps each state to its
    (residual text, flag) pair.
    """
    needed = atoms_of(f)
    atoms = tuple(sorted(needed)) if atoms is None else tuple(atoms)
    if not needed <= set(atoms):
        raise AlphabetMismatch(f"atoms {sorted(needed - set(atoms))} missing from alphabet")
    if len(set(atoms)) != len(atoms):
        raise ValueError("duplicate atoms in alphabet")
    if len(atoms) >= 63 or (1 << len(atoms)) > letter_cap:
        raise ResourceError(f"alphabet of 2^{len(atoms)} letters exceeds cap {letter_cap}")
    alphabet = PropSymbols(atoms)
    letters = alphabet.letters()
    prog = Progression(f)
    cap = state_cap()

    initial = (prog.initial, False)
    ids = {initial: 0}
    order = [initial]
    delta: dict[int, dict] = {}
    row_cache: dict[int, dict] = {}
    queue = deque([initial])
    while queue:
        key = queue.popleft()
        residual = key[0]
        row = row_cache.get(residual)
        if row is None:
            row = {}
            for a in letters:
                nxt = (prog.progress(residual, a), prog.empty_continuation(residual, a))
                if nxt not in ids:
                    if len(ids) >= cap:
                        raise ResourceError(f"DFA exceeds {cap} states")
                    ids[nxt] = len(order)
                    order.append(nxt)
                    queue.append(nxt)
                row[a] = ids[nxt]
            row_cache[residual] = row
        delta[ids[key]] = row
    labels = {i: (to_text(prog.to_formula(r)), flag) for (r, flag), i in ids.items()}
    ts = TransitionSystem(alphabet, range(len(order)), 0, delta, labels, check=False)
    final = [i for (r, flag), i in ids.items() if flag]
    return Dfa(ts, final)


def accepts(d: Dfa, trace: Iterable) -> bool:
    return d.accepts(trace)


# ----------------------------------------------------------- products

def product_ts(t1: TransitionSystem, t2: TransitionSystem) -> TransitionSystem:
    """Synchronous product; only pairs reachable from (i1, i2) are materialized."""
    if t1.alphabet != t2.alphabet:
        raise AlphabetMismatch("product of transition systems over different alphabets")
    letters = t1.alphabet.letters()
    cap = state_cap()
    init = (t1.initial, t2.initial)
    seen = {init}
    order = [init]
    delta = {}
    queue = deque(order)
    while queue:
        q = queue.popleft()
        r1, r2 = t1.delta[q[0]], t2.delta[q[1]]
        row = {}
        for a in letters:
            t = (r1[a], r2[a])
            if t not in seen:
                if len(seen) >= cap:
                    raise ResourceError(f"product exceeds {cap} states")
                seen.add(t)
                order.append(t)
                queue.append(t)
            row[a] = t
        delta[q] = row
    return TransitionSystem(t1.alphabet, order, init, delta, check=False)


def lift(prod: TransitionSystem, side: int, subset: Iterable[State]) -> set:
    """Product states whose `side` component (1 or 2) lies in `subset`."""
    if side not in (1, 2):
        raise ValueError("side must be 1 or 2")
    subset = set(subset)
    return {q for q in prod.states if q[side - 1] in subset}


# ----------------------------------------------------------- minimization

def minimize(d: Dfa) -> Dfa:
    """Hopcroft partition refinement over the reachable part of `d`."""
    ts = d.ts
    letters = ts.alphabet.letters()
    states = ts.reachable()
    final = {q for q in states if q in d.final}
    rest = set(states) - final
    inverse: dict = {a: {} for a in letters}
    for q in states:
        for a in letters:
            inverse[a].setdefault(ts.delta[q][a], []).append(q)

    partition = [blk for blk in (final, rest) if blk]
    work = [min(partition, key=len)] if len(partition) == 2 else []
    while work:
        splitter = work.pop()
        for a in letters:
            inv = inverse[a]
            pre = {p for t in splitter for p in inv.get(t, ())}
            if not pre:
                continue
            refined = []
            for blk in partition:
                inside = blk & pre
                if inside and len(inside) < len(blk):
                    outside = blk - inside
                    refined.extend((inside, outside))
                    if blk in work:
                        work.remove(blk)
                        work.extend((inside, outside))
                    else:
                        work.append(inside if len(inside) <= len(outside) else outside)
                else:
                    refined.append(blk)
            partition = refined

    block_of = {}
    for i, blk in enumerate(partition):
        for q in blk:
            block_of[q] = i
    # renumber blocks in BFS order from the initial block
    start = block_of[ts.initial]
    ids = {start: 0}
    order = [start]
    queue = deque(order)
    rep = {i: min(blk, key=states.index) for i, blk in enumerate(partition)}
    delta = {}
    while queue:
        b = queue.popleft()
        row = {}
        for a in letters:
            t = block_of[ts.delta[rep[b]][a]]
            if t not in ids:
                ids[t] = len(order)
                order.append(t)
                queue.append(t)
            row[a] = ids[t]
        delta[ids[b]] = row
    labels = {ids[b]: ts.labels.get(rep[b], rep[b]) for b in order}
    new_ts = TransitionSystem(ts.alphabet, range(len(order)), 0, delta, labels, check=False)
    return Dfa(new_ts, [ids[b] for b in order if rep[b] in d.final])


# ----------------------------------------------------------- DOT export

def _letter_text(letter) -> str:
    if isinstance(letter, frozenset):
        return "{" + ",".join(sorted(letter)) + "}"
    return "/".join(letter)


def to_dot(d: Dfa, name: str = "dfa") -> str:
    """Graphviz source; nodes in BFS order from the initial state."""
    ts = d.ts
    order = ts.reachable()
    ids = {q: i for i, q in enumerate(order)}
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  init [shape=point];']
    for q in order:
        label = ts.labels.get(q, q)
        if isinstance(label, tuple):
            label = f"{label[0]} | {'acc' if label[1] else 'rej'}"
        shape = "doublecircle" if q in d.final else "circle"
        text = str(label).replace('"', '\\"')
        lines.append(f'  s{ids[q]} [shape={shape}, label="{text}"];')
    lines.append(f"  init -> s{ids[ts.initial]};")
    for q in order:
        grouped: dict[int, list[str]] = {}
        for a in ts.alphabet.letters():
            grouped.setdefault(ids[ts.delta[q][a]], []).append(_letter_text(a))
        for t in sorted(grouped):
            lines.append(f'  s{ids[q]} -> s{t} [label="{" ".join(grouped[t])}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
