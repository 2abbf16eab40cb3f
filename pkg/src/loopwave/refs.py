"""Symbolic variable references and the linear expressions inside them.

A reference is a scalar name, one element of an array (with an integer-linear
subscript), a contiguous array region ``base(lo:hi)``, or an opaque access to
an array whose subscript could not be analyzed.  Two references are the *same
set member* iff their normalized forms are equal; semantic questions ("can
these two touch the same cell?") are answered separately by ``overlap``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

Terms = tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class LinExpr:
    """Integer-linear expression: sum of coef*name terms plus a constant."""

    terms: Terms = ()
    const: int = 0

    @staticmethod
    def of_const(c: int) -> "LinExpr":
        return LinExpr((), c)

    @staticmethod
    def of_name(name: str, coef: int = 1) -> "LinExpr":
        if coef == 0:
            return LinExpr((), 0)
        return LinExpr(((name, coef),), 0)

    @staticmethod
    def _norm(d: dict[str, int], const: int) -> "LinExpr":
        return LinExpr(tuple(sorted((n, c) for n, c in d.items() if c != 0)), const)

    def _as_dict(self) -> dict[str, int]:
        return dict(self.terms)

    def __add__(self, other: "LinExpr") -> "LinExpr":
        d = self._as_dict()
        for n, c in other.terms:
            d[n] = d.get(n, 0) + c
        return LinExpr._norm(d, self.const + other.const)

    def __sub__(self, other: "LinExpr") -> "LinExpr":
        return self + other.scaled(-1)

    def __neg__(self) -> "LinExpr":
        return self.scaled(-1)

    def scaled(self, k: int) -> "LinExpr":
        if k == 0:
            return LinExpr((), 0)
        return LinExpr(tuple((n, c * k) for n, c in self.terms), self.const * k)

    def shifted(self, k: int) -> "LinExpr":
        return LinExpr(self.terms, self.const + k)

    def names(self) -> set[str]:
        return {n for n, _ in self.terms}

    def coef(self, name: str) -> int:
        for n, c in self.terms:
            if n == name:
                return c
        return 0

    def drop(self, name: str) -> "LinExpr":
        return LinExpr(tuple((n, c) for n, c in self.terms if n != name), self.const)

    def substitute(self, name: str, value: "LinExpr") -> "LinExpr":
        c = self.coef(name)
        if c == 0:
            return self
        return self.drop(name) + value.scaled(c)

    def is_const(self) -> bool:
        return not self.terms

    def is_zero(self) -> bool:
        return not self.terms and self.const == 0

    def evaluate(self, env: dict[str, int]) -> int:
        """Concrete value under a scalar environment; KeyError if unbound."""
        return sum(c * env[n] for n, c in self.terms) + self.const

    def display(self) -> str:
        parts: list[str] = []
        for n, c in self.terms:
            if c == 1:
                parts.append(("+" if parts else "") + n)
            elif c == -1:
                parts.append("-" + n)
            else:
                parts.append(("+" if parts and c > 0 else "") + f"{c}*{n}")
        if self.const or not parts:
            parts.append(("+" if parts and self.const > 0 else "") + str(self.const))
        return "".join(parts)

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.display()


SCALAR = "scalar"
ELEM = "elem"
REGION = "region"
OPAQUE = "opaque"


@dataclass(frozen=True)
class VarRef:
    """A scalar, array element, array region, or opaque array access."""

    base: str
    kind: str = SCALAR
    sub: Optional[LinExpr] = None            # ELEM only
    lo: Optional[LinExpr] = None             # REGION; None = unbounded below
    hi: Optional[LinExpr] = None             # REGION; None = unbounded above

    @staticmethod
    def scalar(name: str) -> "VarRef":
        return VarRef(name, SCALAR)

    @staticmethod
    def elem(base: str, sub: LinExpr) -> "VarRef":
        return VarRef(base, ELEM, sub=sub)

    @staticmethod
    def region(base: str, lo: Optional[LinExpr], hi: Optional[LinExpr]) -> "VarRef":
        return VarRef(base, REGION, lo=lo, hi=hi)

    @staticmethod
    def whole(base: str) -> "VarRef":
        return VarRef(base, REGION, lo=None, hi=None)

    @staticmethod
    def opaque(base: str) -> "VarRef":
        return VarRef(base, OPAQUE)

    def is_scalar(self) -> bool:
        return self.kind == SCALAR

    def is_whole(self) -> bool:
        return self.kind == REGION and self.lo is None and self.hi is None

    def names(self) -> set[str]:
        """Scalar names appearing in subscript or bounds."""
        out: set[str] = set()
        if self.sub is not None:
            out |= self.sub.names()
        for b in (self.lo, self.hi):
            if b is not None:
                out |= b.names()
        return out

    def display(self) -> str:
        if self.kind == SCALAR:
            return self.base
        if self.kind == ELEM:
            return f"{self.base}({self.sub.display()})"
        if self.kind == OPAQUE:
            return f"{self.base}(?)"
        if self.is_whole():
            return f"{self.base}(*)"
        lo = self.lo.display() if self.lo is not None else "*"
        hi = self.hi.display() if self.hi is not None else "*"
        return f"{self.base}({lo}:{hi})"

    def sort_key(self) -> tuple[str, str, str]:
        return (self.base, self.kind, self.display())

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.display()


#: Pseudo-variable standing for the program's output stream.
STDOUT = VarRef.scalar("STDOUT")


def sorted_refs(refs: Iterable[VarRef]) -> list[VarRef]:
    return sorted(refs, key=VarRef.sort_key)


def display_set(refs: Iterable[VarRef]) -> str:
    return "{" + ", ".join(r.display() for r in sorted_refs(refs)) + "}"
