"""Exception hierarchy shared by all modules."""

from __future__ import annotations

import os


class TierSynthError(Exception):
    """Base class for errors raised by tiersynth."""


class FormulaSyntaxError(TierSynthError, ValueError):
    def __init__(self, message: str, offset: int, expected: frozenset[str]):
        self.offset = offset
        self.expected = expected
        detail = f" (expected one of: {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"syntax error at offset {offset}: {message}{detail}")


class AlphabetMismatch(TierSynthError, ValueError):
    pass


class ResourceError(TierSynthError):
    """A configured size cap was exceeded."""


class DomainError(TierSynthError, ValueError):
    """An invalid planning domain document.

    `kind` is one of "schema", "uniqueness", "dead-state", "no-reaction",
    "duplicate-transition"; `state` and `action` locate the offending entry
    when there is one.
    """

    def __init__(self, kind: str, message: str, state=None, action=None):
        self.kind = kind
        self.state = state
        self.action = action
        super().__init__(message)

    def report(self) -> dict:
        return {
            "valid": False,
            "error": self.kind,
            "message": str(self),
            "state": sorted(self.state) if self.state is not None else None,
            "action": self.action,
        }


class TierError(TierSynthError, ValueError):
    """Goals do not form a multi-tier hierarchy; carries the witness."""

    def __init__(self, message: str, counterexample):
        self.counterexample = counterexample
        super().__init__(message)


class ExecutorError(TierSynthError, RuntimeError):
    pass


DEFAULT_STATE_CAP = 1_000_000


def state_cap(default: int = DEFAULT_STATE_CAP) -> int:
    """Resource cap on materialized states, overridable via TIERSYNTH_CAP_STATES."""
    value = os.environ.get("TIERSYNTH_CAP_STATES")
    if value:
        return int(value)
    return default
