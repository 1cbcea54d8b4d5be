"""LTLf formulas: abstract syntax, concrete syntax, and finite-trace semantics.

Formulas are immutable dataclasses compared structurally, so they can be used
as dictionary keys and deduplicated freely.  The concrete syntax is::

    f ::= f -> f            (right associative, lowest precedence)
        | f | f
        | f & f
        | f U f | f R f     (right associative, tighter than &)
        | !f | X f | WX f | F f | G f
        | ( f ) | true | false | atom

`evaluate` is a direct implementation of the inductive semantics and serves as
ground truth for everything compiled from formulas.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import FormulaSyntaxError

__all__ = [
    "Formula", "Atom", "TrueF", "FalseF", "Not", "And", "Or", "Implies",
    "Next", "WeakNext", "Until", "Release", "Eventually", "Always",
    "TRUE", "FALSE", "parse_formula", "to_text", "formula_size",
    "subformulas", "atoms_of", "evaluate", "to_nnf", "as_trace",
]

ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def children(self) -> tuple[Formula, ...]:
        return ()

    def __str__(self) -> str:
        return to_text(self)

    # operator sugar for building formulas in Python code
    def __and__(self, other: Formula) -> Formula:
        return And(self, other)

    def __or__(self, other: Formula) -> Formula:
        return Or(self, other)

    def __invert__(self) -> Formula:
        return Not(self)


@dataclass(frozen=True, eq=True)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if not ATOM_RE.match(self.name) or self.name in _KEYWORDS:
            raise ValueError(f"invalid atom name {self.name!r}")


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class WeakNext(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Eventually(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Always(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


TRUE = TrueF()
FALSE = FalseF()

_KEYWORDS = {"true", "false", "X", "WX", "F", "G", "U", "R"}
_UNARY = {"!": Not, "X": Next, "WX": WeakNext, "F": Eventually, "G": Always}
_UNARY_TEXT = {Not: "!", Next: "X ", WeakNext: "WX ", Eventually: "F ", Always: "G "}
_BINARY_TEXT = {And: "&", Or: "|", Implies: "->", Until: "U", Release: "R"}


# ---------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(r"\s*(?:(->)|([()!&|])|([A-Za-z_][A-Za-z0-9_]*))")
_PRIMARY_START = frozenset({"(", "!", "X", "WX", "F", "G", "true", "false", "<atom>"})


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []  # (kind, value, char offset)
        pos = 0
        while True:
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                rest = text[pos:]
                stripped = rest.lstrip()
                if not stripped:
                    break
                bad = pos + len(rest) - len(stripped)
                raise FormulaSyntaxError(
                    f"unexpected character {stripped[0]!r}",
                    self._byte_offset(bad), frozenset())
            start = m.start(m.lastindex)
            value = m.group(m.lastindex)
            if m.lastindex == 3:
                kind = value if value in _KEYWORDS else "<atom>"
            else:
                kind = value
            self.tokens.append((kind, value, start))
            pos = m.end()
        self.end = len(text)
        self.i = 0

    def _byte_offset(self, char_offset: int) -> int:
        return len(self.text[:char_offset].encode("utf-8"))

    def peek(self) -> str | None:
        if self.i < len(self.tokens):
            return self.tokens[self.i][0]
        return None

    def fail(self, expected: Iterable[str]):
        if self.i < len(self.tokens):
            kind, value, off = self.tokens[self.i]
            msg = f"unexpected token {value!r}"
        else:
            off = self.end
            msg = "unexpected end of input"
        raise FormulaSyntaxError(msg, self._byte_offset(off), frozenset(expected))

    def take(self, kind: str):
        if self.peek() != kind:
            self.fail({kind})
        self.i += 1

    def parse(self) -> Formula:
        f = self.implies()
        if self.peek() is not None:
            self.fail({"->", "|", "&", "U", "R", "<end>"})
        return f

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.i += 1
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.peek() == "|":
            self.i += 1
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.temporal()
        while self.peek() == "&":
            self.i += 1
            left = And(left, self.temporal())
        return left

    def temporal(self) -> Formula:
        left = self.unary()
        kind = self.peek()
        if kind == "U":
            self.i += 1
            return Until(left, self.temporal())
        if kind == "R":
            self.i += 1
            return Release(left, self.temporal())
        return left

    def unary(self) -> Formula:
        kind = self.peek()
        if kind in _UNARY:
            self.i += 1
            return _UNARY[kind](self.unary())
        if kind == "(":
            self.i += 1
            f = self.implies()
            self.take(")")
            return f
        if kind == "true":
            self.i += 1
            return TRUE
        if kind == "false":
            self.i += 1
            return FALSE
        if kind == "<atom>":
            value = self.tokens[self.i][1]
            self.i += 1
            return Atom(value)
        self.fail(_PRIMARY_START)


def parse_formula(text: str) -> Formula:
    """Parse `text` into a formula.

    Raises FormulaSyntaxError carrying the byte offset of the offending token
    and the set of token kinds that would have been accepted there.
    """
    if not text or not text.strip():
        raise FormulaSyntaxError("empty formula", 0, frozenset(_PRIMARY_START))
    return _Parser(text).parse()


def to_text(f: Formula) -> str:
    """Render a formula in the concrete syntax; parse_formula inverts it."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    cls = type(f)
    if cls in _UNARY_TEXT:
        return _UNARY_TEXT[cls] + _wrap(f.arg)
    return f"{_wrap(f.left)} {_BINARY_TEXT[cls]} {_wrap(f.right)}"


def _wrap(f: Formula) -> str:
    if type(f) in _BINARY_TEXT:
        return "(" + to_text(f) + ")"
    return to_text(f)


# ---------------------------------------------------------------- structure

def subformulas(f: Formula) -> set[Formula]:
    seen: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        stack.extend(g.children())
    return seen


def formula_size(f: Formula) -> int:
    """Number of distinct subformulas, counting operators as written."""
    return len(subformulas(f))


def atoms_of(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


def to_nnf(f: Formula) -> Formula:
    """Negation normal form over atoms, true/false, &, |, X, WX, U and R.

    Implications and the F/G abbreviations are expanded; negation only
    remains directly above atoms.
    """
    return _nnf(f, False)


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, Atom):
        return Not(f) if neg else f
    if isinstance(f, TrueF):
        return FALSE if neg else TRUE
    if isinstance(f, FalseF):
        return TRUE if neg else FALSE
    if isinstance(f, Not):
        return _nnf(f.arg, not neg)
    if isinstance(f, And):
        op = Or if neg else And
        return op(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Or):
        op = And if neg else Or
        return op(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Implies):
        if neg:
            return And(_nnf(f.left, False), _nnf(f.right, True))
        return Or(_nnf(f.left, True), _nnf(f.right, False))
    if isinstance(f, Next):
        return (WeakNext if neg else Next)(_nnf(f.arg, neg))
    if isinstance(f, WeakNext):
        return (Next if neg else WeakNext)(_nnf(f.arg, neg))
    if isinstance(f, Until):
        op = Release if neg else Until
        return op(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Release):
        op = Until if neg else Release
        return op(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Eventually):
        # F g = true U g ; !F g = false R !g
        if neg:
            return Release(FALSE, _nnf(f.arg, True))
        return Until(TRUE, _nnf(f.arg, False))
    if isinstance(f, Always):
        # G g = false R g ; !G g = true U !g
        if neg:
            return Until(TRUE, _nnf(f.arg, True))
        return Release(FALSE, _nnf(f.arg, False))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------- semantics

def as_trace(trace: Iterable[Iterable[str]]) -> tuple[frozenset[str], ...]:
    return tuple(frozenset(letter) for letter in trace)


def evaluate(trace: Sequence[Iterable[str]], f: Formula) -> bool:
    """True iff the non-empty finite `trace` satisfies `f` at position 0."""
    t = as_trace(trace)
    if not t:
        raise ValueError("LTLf formulas are only evaluated on non-empty traces")
    return _evaluate_cached(t, f)


@lru_cache(maxsize=200_000)
def _evaluate_cached(trace: tuple[frozenset[str], ...], f: Formula) -> bool:
    last = len(trace) - 1
    memo: dict[tuple[int, Formula], bool] = {}

    def holds(i: int, g: Formula) -> bool:
        key = (i, g)
        if key in memo:
            return memo[key]
        if isinstance(g, Atom):
            r = g.name in trace[i]
        elif isinstance(g, TrueF):
            r = True
        elif isinstance(g, FalseF):
            r = False
        elif isinstance(g, Not):
            r = not holds(i, g.arg)
        elif isinstance(g, And):
            r = holds(i, g.left) and holds(i, g.right)
        elif isinstance(g, Or):
            r = holds(i, g.left) or holds(i, g.right)
        elif isinstance(g, Implies):
            r = (not holds(i, g.left)) or holds(i, g.right)
        elif isinstance(g, Next):
            r = i < last and holds(i + 1, g.arg)
        elif isinstance(g, WeakNext):
            r = i == last or holds(i + 1, g.arg)
        elif isinstance(g, Until):
            r = False
            for j in range(i, last + 1):
                if holds(j, g.right):
                    r = True
                    break
                if not holds(j, g.left):
                    break
        elif isinstance(g, Release):
            # f R g == !(!f U !g)
            r = True
            for j in range(i, last + 1):
                if not holds(j, g.right):
                    r = False
                    break
                if holds(j, g.left):
                    break
        elif isinstance(g, Eventually):
            r = any(holds(j, g.arg) for j in range(i, last + 1))
        elif isinstance(g, Always):
            r = all(holds(j, g.arg) for j in range(i, last + 1))
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[key] = r
        return r

    return holds(0, f)
