"""Predicate facts attached to graph vertices.

Three fact families are tracked per vertex:

* exact-range facts ``x = (lo:hi:step)`` for scalars whose value set is
  known precisely (loop indices, constants);
* interval facts ``lo <= x <= hi`` with possibly one-sided symbolic bounds;
* reduction facts ``z = op(...)`` marking accumulator updates.

Branch conditions that do not refine a scalar interval (for example a
comparison on an array element) are kept verbatim as display-only facts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .refs import LinExpr

SUM = "sum"
PRODUCT = "product"
MIN = "min"
MAX = "max"


@dataclass(frozen=True)
class Interval:
    """Value fact for one scalar.

    ``step`` not None means the exact value set {lo, lo+step, ..., hi}
    (both bounds present); otherwise the fact is a plain interval and
    either bound may be missing (unbounded side).
    """

    lo: Optional[LinExpr] = None
    hi: Optional[LinExpr] = None
    step: Optional[int] = None

    def is_exact(self) -> bool:
        return self.step is not None

    def is_single(self) -> bool:
        return self.is_exact() and self.lo == self.hi

    def display(self, name: str) -> str:
        if self.is_exact():
            if self.lo == self.hi:
                return f"{name} = {self.lo.display()}"
            return f"{name} = ({self.lo.display()}:{self.hi.display()}:{self.step})"
        if self.lo is not None and self.hi is not None:
            return f"{self.lo.display()} <= {name} <= {self.hi.display()}"
        if self.lo is not None:
            return f"{name} >= {self.lo.display()}"
        if self.hi is not None:
            return f"{name} <= {self.hi.display()}"
        return f"{name} = ?"

    def mentions(self, name: str) -> bool:
        for b in (self.lo, self.hi):
            if b is not None and name in b.names():
                return True
        return False


@dataclass(frozen=True)
class CondFact:
    """A branch condition kept as-is (no interval refinement possible)."""

    display: str
    names: frozenset[str] = frozenset()
    bases: frozenset[str] = frozenset()


@dataclass(frozen=True)
class ReductionFact:
    """Scalar ``var`` is only updated as ``var = var op operand``."""

    var: str
    op: str
    operand: str = ""
    guard_vid: int = -1       # condition vertex for guarded min/max updates

    def display(self) -> str:
        body = self.operand or "..."
        label = {SUM: "SUM", PRODUCT: "PRODUCT", MIN: "MIN", MAX: "MAX"}[self.op]
        return f"{self.var} = {label}({body})"


@dataclass
class PredState:
    """Facts holding on entry to one vertex."""

    facts: dict[str, Interval] = field(default_factory=dict)
    conds: frozenset[CondFact] = frozenset()

    def copy(self) -> "PredState":
        return PredState(dict(self.facts), self.conds)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PredState)
            and self.facts == other.facts
            and self.conds == other.conds
        )

    def display_items(self) -> list[str]:
        items = [iv.display(name) for name, iv in self.facts.items()]
        items.extend(c.display for c in self.conds)
        return sorted(items)


BLANK = PredState()


# ---------------------------------------------------------------------------
# Sign reasoning over linear expressions under interval facts.
# ---------------------------------------------------------------------------

def _const_of(b: Optional[LinExpr]) -> Optional[int]:
    if b is not None and b.is_const():
        return b.const
    return None


def value_range(le: LinExpr, facts: dict[str, Interval]) -> tuple[Optional[int], Optional[int]]:
    """Conservative constant bounds of ``le``; None marks an unbounded side."""
    lo: Optional[int] = le.const
    hi: Optional[int] = le.const
    for name, coef in le.terms:
        iv = facts.get(name)
        nlo = _const_of(iv.lo) if iv else None
        nhi = _const_of(iv.hi) if iv else None
        if coef > 0:
            tlo = None if nlo is None else coef * nlo
            thi = None if nhi is None else coef * nhi
        else:
            tlo = None if nhi is None else coef * nhi
            thi = None if nlo is None else coef * nlo
        lo = None if (lo is None or tlo is None) else lo + tlo
        hi = None if (hi is None or thi is None) else hi + thi
    return lo, hi


ZERO = "zero"
POS = "pos"
NEG = "neg"
NONNEG = "nonneg"
NONPOS = "nonpos"
UNKNOWN = "unknown"


def sign_of(le: LinExpr, state: Optional[PredState]) -> str:
    """Best provable sign of ``le`` given the interval facts of ``state``."""
    if le.is_zero():
        return ZERO
    facts = state.facts if state is not None else {}
    lo, hi = value_range(le, facts)
    if lo is not None and hi is not None and lo == hi == 0:
        return ZERO
    if lo is not None and lo > 0:
        return POS
    if hi is not None and hi < 0:
        return NEG
    if lo is not None and lo >= 0:
        return NONNEG
    if hi is not None and hi <= 0:
        return NONPOS
    return UNKNOWN


def provably_le(a: LinExpr, b: LinExpr, state: Optional[PredState]) -> bool:
    return sign_of(b - a, state) in (ZERO, POS, NONNEG)


def provably_lt(a: LinExpr, b: LinExpr, state: Optional[PredState]) -> bool:
    return sign_of(b - a, state) == POS


def provably_ne(a: LinExpr, b: LinExpr, state: Optional[PredState]) -> bool:
    return sign_of(b - a, state) in (POS, NEG)


# ---------------------------------------------------------------------------
# Interval algebra: hull (path join), refinement (branch meet), widening.
# ---------------------------------------------------------------------------

def _min_bound(a: Optional[LinExpr], b: Optional[LinExpr]) -> Optional[LinExpr]:
    """Lower bound valid for both; None when incomparable or unbounded."""
    if a is None or b is None:
        return None
    if a == b:
        return a
    if a.is_const() and b.is_const():
        return a if a.const <= b.const else b
    d = b - a
    if d.is_const():
        return a if d.const >= 0 else b
    return None


def _max_bound(a: Optional[LinExpr], b: Optional[LinExpr]) -> Optional[LinExpr]:
    if a is None or b is None:
        return None
    if a == b:
        return a
    if a.is_const() and b.is_const():
        return a if a.const >= b.const else b
    d = b - a
    if d.is_const():
        return a if d.const <= 0 else b
    return None


def hull(a: Interval, b: Interval) -> Interval:
    """Smallest representable interval containing both facts."""
    if a == b:
        return a
    return Interval(_min_bound(a.lo, b.lo), _max_bound(a.hi, b.hi), None)


def _within(inner: Optional[LinExpr], outer: Optional[LinExpr], *, low_side: bool) -> bool:
    """Is ``inner`` inside ``outer`` on one side (provably, without env)?"""
    if outer is None:
        return True
    if inner is None:
        return False
    d = inner - outer
    if not d.is_const():
        return False
    return d.const >= 0 if low_side else d.const <= 0


def widen(cur: Interval, back: Interval) -> Interval:
    """Join with a loop back-edge fact; any disagreeing side goes unbounded."""
    if cur == back:
        return cur
    lo = cur.lo if _within(back.lo, cur.lo, low_side=True) else None
    hi = cur.hi if _within(back.hi, cur.hi, low_side=False) else None
    return Interval(lo, hi, None)


def refine(base: Optional[Interval], op: str, bound: LinExpr) -> Interval:
    """Tighten ``base`` with a branch comparison ``x <op> bound``.

    Integer semantics: strict comparisons shift the bound by one.
    """
    lo = base.lo if base else None
    hi = base.hi if base else None
    step = base.step if base else None
    new_lo: Optional[LinExpr] = None
    new_hi: Optional[LinExpr] = None
    if op == "<":
        new_hi = bound.shifted(-1)
    elif op == "<=":
        new_hi = bound
    elif op == ">":
        new_lo = bound.shifted(1)
    elif op == ">=":
        new_lo = bound
    elif op == "==":
        return Interval(bound, bound, 1)
    # "/=" adds no interval information
    if new_lo is not None:
        tighter = _max_bound(lo, new_lo)
        lo, step = (tighter if tighter is not None else new_lo), None
    if new_hi is not None:
        tighter = _min_bound(hi, new_hi)
        hi, step = (tighter if tighter is not None else new_hi), None
    return Interval(lo, hi, step)


NEGATED = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "/=", "/=": "=="}


def shift_fact(iv: Interval, k: int) -> Interval:
    return Interval(
        iv.lo.shifted(k) if iv.lo is not None else None,
        iv.hi.shifted(k) if iv.hi is not None else None,
        iv.step,
    )


def reflect_fact(iv: Interval) -> Interval:
    return Interval(
        -iv.hi if iv.hi is not None else None,
        -iv.lo if iv.lo is not None else None,
        iv.step,
    )
