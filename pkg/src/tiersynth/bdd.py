"""A minimal reduced ordered BDD, used to give progression residuals a unique form.

Nodes are integers; 0 and 1 are the terminals.  Variable indices double as
the variable order (smaller index closer to the root).
"""

from __future__ import annotations

from typing import Callable


class BDD:
    FALSE = 0
    TRUE = 1

    def __init__(self):
        self._var = [-1, -1]
        self._lo = [0, 1]
        self._hi = [0, 1]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._ite: dict[tuple[int, int, int], int] = {}

    def __len__(self):
        return len(self._var)

    def node(self, u: int) -> tuple[int, int, int]:
        return self._var[u], self._lo[u], self._hi[u]

    def mk(self, v: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (v, lo, hi)
        u = self._unique.get(key)
        if u is None:
            u = len(self._var)
            self._var.append(v)
            self._lo.append(lo)
            self._hi.append(hi)
            self._unique[key] = u
        return u

    def var(self, v: int) -> int:
        return self.mk(v, 0, 1)

    def _top(self, u: int) -> int:
        v = self._var[u]
        return v if v >= 0 else 1 << 60

    def _cofactors(self, u: int, v: int) -> tuple[int, int]:
        if self._var[u] == v:
            return self._lo[u], self._hi[u]
        return u, u

    def ite(self, f: int, g: int, h: int) -> int:
        if f == 1:
            return g
        if f == 0:
            return h
        if g == h:
            return g
        if g == 1 and h == 0:
            return f
        key = (f, g, h)
        r = self._ite.get(key)
        if r is not None:
            return r
        v = min(self._top(f), self._top(g), self._top(h))
        f0, f1 = self._cofactors(f, v)
        g0, g1 = self._cofactors(g, v)
        h0, h1 = self._cofactors(h, v)
        r = self.mk(v, self.ite(f0, g0, h0), self.ite(f1, g1, h1))
        self._ite[key] = r
        return r

    def neg(self, u: int) -> int:
        return self.ite(u, 0, 1)

    def conj(self, u: int, w: int) -> int:
        return self.ite(u, w, 0)

    def disj(self, u: int, w: int) -> int:
        return self.ite(u, 1, w)

    def compose(self, u: int, subst: Callable[[int], int]) -> int:
        """Simultaneously replace every variable v of `u` by `subst(v)`."""
        memo: dict[int, int] = {0: 0, 1: 1}

        def go(n: int) -> int:
            r = memo.get(n)
            if r is None:
                r = self.ite(subst(self._var[n]), go(self._hi[n]), go(self._lo[n]))
                memo[n] = r
            return r

        return go(u)

    def evaluate(self, u: int, assign: Callable[[int], bool]) -> bool:
        while u > 1:
            u = self._hi[u] if assign(self._var[u]) else self._lo[u]
        return u == 1

    def support(self, u: int) -> set[int]:
        seen, out, stack = set(), set(), [u]
        while stack:
            n = stack.pop()
            if n <= 1 or n in seen:
                continue
            seen.add(n)
            out.add(self._var[n])
            stack.extend((self._lo[n], self._hi[n]))
        return out
