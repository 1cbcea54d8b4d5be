"""Explicit FOND planning domains, legal traces, and the domain-as-DFA view.

A domain state is a frozenset of fluent names.  The two error sinks of the
DFA view are the strings AG_ERR (agent used an inapplicable action) and
ENV_ERR (environment answered with an inapplicable reaction).
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import jsonschema

from .automata import Moves, TransitionSystem
from .errors import DomainError
from .ltlf import Formula, evaluate

AG_ERR = "ag_err"
ENV_ERR = "env_err"
ERRORS = (AG_ERR, ENV_ERR)

_NAMES = {"type": "array", "items": {"type": "string", "minLength": 1}, "uniqueItems": True}

DOMAIN_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["fluents", "initial", "actions", "reactions", "transitions"],
    "properties": {
        "fluents": _NAMES,
        "initial": _NAMES,
        "actions": {**_NAMES, "minItems": 1},
        "reactions": {**_NAMES, "minItems": 1},
        "transitions": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["from", "action", "reaction", "to"],
                "properties": {
                    "from": _NAMES,
                    "action": {"type": "string"},
                    "reaction": {"type": "string"},
                    "to": _NAMES,
                },
            },
        },
    },
}


def state_key(s) -> list[str] | str:
    """JSON form of a domain state (or an error sink)."""
    return s if isinstance(s, str) else sorted(s)


def state_text(s) -> str:
    return s if isinstance(s, str) else "{" + ",".join(sorted(s)) + "}"


class Domain:
    """A nondeterministic planning domain restricted to states reachable from
    the initial one.  `transitions` maps (state, action, reaction) to state."""

    def __init__(self, fluents: Sequence[str], initial: Iterable[str],
                 actions: Sequence[str], reactions: Sequence[str],
                 transitions: dict):
        self.fluents = tuple(fluents)
        self.initial = frozenset(initial)
        self.actions = tuple(sorted(actions))
        self.reactions = tuple(sorted(reactions))
        self._alpha: dict[frozenset, tuple[str, ...]] = {}
        self._beta: dict[tuple[frozenset, str], tuple[str, ...]] = {}
        for (s, a, r) in transitions:
            self._beta.setdefault((s, a), ())
            self._beta[s, a] += (r,)
        for (s, a), rs in self._beta.items():
            self._beta[s, a] = tuple(sorted(rs))
            self._alpha[s] = self._alpha.get(s, ()) + (a,)
        self._alpha = {s: tuple(sorted(set(acts))) for s, acts in self._alpha.items()}
        self.transitions = dict(transitions)
        self.states = self._reachable()

    def _reachable(self) -> tuple[frozenset, ...]:
        order = [self.initial]
        seen = {self.initial}
        queue = deque(order)
        while queue:
            s = queue.popleft()
            for a in self.alpha(s):
                for r in self.beta(s, a):
                    t = self.transitions[s, a, r]
                    if t not in seen:
                        seen.add(t)
                        order.append(t)
                        queue.append(t)
        return tuple(order)

    def alpha(self, s) -> tuple[str, ...]:
        """Actions applicable in s, sorted by name."""
        return self._alpha.get(s, ())

    def beta(self, s, a: str) -> tuple[str, ...]:
        """Reactions applicable to a in s, sorted by name."""
        return self._beta.get((s, a), ())

    def delta(self, s, a: str, r: str):
        return self.transitions.get((s, a, r))

    def to_json(self) -> dict:
        rows = sorted(
            ((sorted(s), a, r, sorted(t)) for (s, a, r), t in self.transitions.items()),
        )
        return {
            "fluents": list(self.fluents),
            "initial": sorted(self.initial),
            "actions": list(self.actions),
            "reactions": list(self.reactions),
            "transitions": [{"from": s, "action": a, "reaction": r, "to": t}
                            for s, a, r, t in rows],
        }

    def digest(self) -> str:
        text = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def __eq__(self, other):
        return isinstance(other, Domain) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(self.digest())

    def __repr__(self):
        return (f"Domain({len(self.fluents)} fluents, {len(self.states)} states, "
                f"{len(self.actions)} actions, {len(self.reactions)} reactions)")


def _check_names(kind: str, names, known, where: str):
    unknown = [n for n in names if n not in known]
    if unknown:
        raise DomainError("schema", f"unknown {kind} {unknown[0]!r} in {where}")


def parse_domain(doc: dict) -> Domain:
    """Validate a domain document (already decoded JSON) and build a Domain."""
    try:
        jsonschema.validate(doc, DOMAIN_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "document"
        raise DomainError("schema", f"{where}: {exc.message}") from None
    fluents = set(doc["fluents"])
    if len(fluents) != len(doc["fluents"]):
        raise DomainError("schema", "duplicate fluent")
    actions, reactions = set(doc["actions"]), set(doc["reactions"])
    _check_names("fluent", doc["initial"], fluents, "initial")

    transitions: dict = {}
    for i, row in enumerate(doc["transitions"]):
        where = f"transitions/{i}"
        _check_names("fluent", row["from"], fluents, where)
        _check_names("fluent", row["to"], fluents, where)
        _check_names("action", [row["action"]], actions, where)
        _check_names("reaction", [row["reaction"]], reactions, where)
        s, t = frozenset(row["from"]), frozenset(row["to"])
        key = (s, row["action"], row["reaction"])
        if key in transitions:
            raise DomainError("duplicate-transition",
                              f"transition ({state_text(s)}, {key[1]}, {key[2]}) given twice",
                              state=s, action=key[1])
        transitions[key] = t

    d = Domain(doc["fluents"], doc["initial"], doc["actions"], doc["reactions"], transitions)
    for s in d.states:
        if not d.alpha(s):
            raise DomainError("dead-state", f"reachable state {state_text(s)} has no action",
                              state=s)
        for a in d.alpha(s):
            rs = d.beta(s, a)
            if not rs:
                raise DomainError("no-reaction",
                                  f"action {a} in {state_text(s)} has no reaction",
                                  state=s, action=a)
            targets = [d.delta(s, a, r) for r in rs]
            if len(set(targets)) != len(targets):
                raise DomainError("uniqueness",
                                  f"two reactions to {a} in {state_text(s)} "
                                  f"lead to the same state", state=s, action=a)
    # keep only what can be reached; unreachable states are treated as absent
    reach = set(d.states)
    kept = {k: t for k, t in transitions.items() if k[0] in reach}
    if len(kept) != len(transitions):
        d = Domain(doc["fluents"], doc["initial"], doc["actions"], doc["reactions"], kept)
    return d


def load_domain(source) -> Domain:
    """Load a domain from a path, a JSON string, or an already decoded dict."""
    if isinstance(source, dict):
        return parse_domain(source)
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        text = Path(source).read_text()
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError("schema", f"invalid JSON: {exc}") from None
    return parse_domain(doc)


# ----------------------------------------------------------- traces

@dataclass(frozen=True)
class DomainTrace:
    """s0 (a1,r1) s1 ... (an,rn) sn; `states` has one more entry than `moves`."""

    states: tuple
    moves: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(frozenset(s) if not isinstance(s, str) else s
                                                 for s in self.states))
        object.__setattr__(self, "moves", tuple(tuple(m) for m in self.moves))
        if len(self.states) != len(self.moves) + 1:
            raise ValueError("a trace needs exactly one more state than moves")

    def __len__(self):
        return len(self.moves)

    @property
    def last(self):
        return self.states[-1]

    def extend(self, action: str, reaction: str, state) -> "DomainTrace":
        return DomainTrace(self.states + (frozenset(state),), self.moves + ((action, reaction),))

    def to_json(self) -> dict:
        return {"states": [state_key(s) for s in self.states],
                "moves": [{"action": a, "reaction": r} for a, r in self.moves]}

    @classmethod
    def from_json(cls, doc: dict) -> "DomainTrace":
        return cls(tuple(doc["states"]),
                   tuple((m["action"], m["reaction"]) for m in doc["moves"]))

    def __str__(self):
        parts = [state_text(self.states[0])]
        for (a, r), s in zip(self.moves, self.states[1:]):
            parts.append(f"({a},{r})")
            parts.append(state_text(s))
        return " ".join(parts)


def is_legal_trace(d: Domain, t: DomainTrace) -> bool:
    if t.states[0] != d.initial:
        return False
    for s, (a, r), nxt in zip(t.states, t.moves, t.states[1:]):
        if a not in d.alpha(s) or r not in d.beta(s, a) or d.delta(s, a, r) != nxt:
            return False
    return True


def trace_satisfies(d: Domain, t: DomainTrace, f: Formula) -> bool:
    if not is_legal_trace(d, t):
        raise ValueError(f"illegal trace: {t}")
    return evaluate(list(t.states), f)


# ----------------------------------------------------------- DFA view

@dataclass
class DomainDfa:
    """The domain read as a transition system over Act x React with two
    absorbing error sinks."""

    domain: Domain
    ts: TransitionSystem
    ag_err: frozenset = field(default=frozenset({AG_ERR}))
    env_err: frozenset = field(default=frozenset({ENV_ERR}))


def domain_to_dfa(d: Domain) -> DomainDfa:
    moves = Moves(d.actions, d.reactions)
    delta = {}
    for s in d.states:
        row = {}
        for a, r in moves.letters():
            if a not in d.alpha(s):
                row[a, r] = AG_ERR
            elif r not in d.beta(s, a):
                row[a, r] = ENV_ERR
            else:
                row[a, r] = d.delta(s, a, r)
        delta[s] = row
    for e in ERRORS:
        delta[e] = {m: e for m in moves.letters()}
    ts = TransitionSystem(moves, d.states + ERRORS, d.initial, delta,
                          labels={s: state_text(s) for s in d.states + ERRORS})
    return DomainDfa(d, ts)


def legal_histories(d: Domain, depth: int):
    """All legal traces with at most `depth` moves, shortest first."""
    frontier = [DomainTrace((d.initial,))]
    out = list(frontier)
    for _ in range(depth):
        nxt = []
        for h in frontier:
            s = h.last
            for a in d.alpha(s):
                for r in d.beta(s, a):
                    nxt.append(h.extend(a, r, d.delta(s, a, r)))
        out.extend(nxt)
        frontier = nxt
    return out
