"""Conservative location reasoning over symbolic references.

``may_overlap`` answers whether two references can touch the same memory
cell *at the same instant* (same values of all scalars).  ``expand_region``
turns index-subscripted elements into whole array regions once the index
range is known.  Verdicts are three-valued and err toward MAY_OVERLAP.
"""

from __future__ import annotations

import enum
from typing import Iterable, Optional

from .predicates import (
    Interval,
    PredState,
    provably_le,
    provably_lt,
    provably_ne,
)
from .refs import ELEM, OPAQUE, REGION, SCALAR, LinExpr, VarRef


class Overlap(enum.Enum):
    DISJOINT = "disjoint"
    MAY_OVERLAP = "mayOverlap"
    EQUAL = "equal"


class MissingRange(Exception):
    """An indexed reference cannot be expanded: no exact range for its index."""


def _span_disjoint(
    alo: Optional[LinExpr], ahi: Optional[LinExpr],
    blo: Optional[LinExpr], bhi: Optional[LinExpr],
    env: Optional[PredState],
) -> bool:
    if ahi is not None and blo is not None and provably_lt(ahi, blo, env):
        return True
    if bhi is not None and alo is not None and provably_lt(bhi, alo, env):
        return True
    return False


def may_overlap(a: VarRef, b: VarRef, env: Optional[PredState] = None) -> Overlap:
    """Classify two references as disjoint, equal, or possibly overlapping."""
    if a.base != b.base:
        return Overlap.DISJOINT
    if a.kind == SCALAR and b.kind == SCALAR:
        return Overlap.EQUAL
    if a.kind == SCALAR or b.kind == SCALAR:
        # Same name used both as scalar and as array: malformed but possible.
        return Overlap.MAY_OVERLAP
    if a.kind == OPAQUE or b.kind == OPAQUE:
        return Overlap.MAY_OVERLAP
    if a.kind == ELEM and b.kind == ELEM:
        if a.sub == b.sub:
            return Overlap.EQUAL
        if provably_ne(a.sub, b.sub, env):
            return Overlap.DISJOINT
        return Overlap.MAY_OVERLAP
    # At least one region from here on.
    alo, ahi = (a.sub, a.sub) if a.kind == ELEM else (a.lo, a.hi)
    blo, bhi = (b.sub, b.sub) if b.kind == ELEM else (b.lo, b.hi)
    if _span_disjoint(alo, ahi, blo, bhi, env):
        return Overlap.DISJOINT
    if alo is not None and alo == ahi == blo == bhi:
        return Overlap.EQUAL
    return Overlap.MAY_OVERLAP


def covers(write: VarRef, read: VarRef, env: Optional[PredState] = None) -> bool:
    """Does a definite write to ``write`` always provide the cell of ``read``?"""
    if may_overlap(write, read, env) == Overlap.EQUAL:
        return True
    if write.kind == REGION and read.kind == ELEM and write.base == read.base:
        if write.is_whole():
            return True
        if (
            write.lo is not None
            and write.hi is not None
            and provably_le(write.lo, read.sub, env)
            and provably_le(read.sub, write.hi, env)
        ):
            return True
    return False


def _exact_fact(env: Optional[PredState], name: str) -> Optional[Interval]:
    if env is None:
        return None
    iv = env.facts.get(name)
    if iv is not None and iv.is_exact():
        return iv
    return None


def _expand_bound(bound: LinExpr, name: str, repl: LinExpr) -> LinExpr:
    return bound.substitute(name, repl)


def expand_over(
    ref: VarRef, index: str, lo: Optional[LinExpr], hi: Optional[LinExpr]
) -> VarRef:
    """Expand one reference over a single index with the given value range.

    Elements become regions; region bounds are widened over the index.
    Raises MissingRange when either end of the range is unavailable.
    """
    if ref.kind == SCALAR:
        return ref
    if ref.kind == OPAQUE:
        return VarRef.whole(ref.base)
    if ref.kind == ELEM:
        c = ref.sub.coef(index)
        if c == 0:
            return ref
        if abs(c) != 1 or lo is None or hi is None:
            raise MissingRange(ref.display())
        at_lo = ref.sub.substitute(index, lo)
        at_hi = ref.sub.substitute(index, hi)
        return VarRef.region(ref.base, at_lo, at_hi) if c > 0 else VarRef.region(
            ref.base, at_hi, at_lo
        )
    # REGION: widen each bound over the index range.
    new_lo, new_hi = ref.lo, ref.hi
    if new_lo is not None and new_lo.coef(index) != 0:
        if abs(new_lo.coef(index)) != 1 or lo is None or hi is None:
            new_lo = None
        else:
            new_lo = _expand_bound(new_lo, index, lo if new_lo.coef(index) > 0 else hi)
    if new_hi is not None and new_hi.coef(index) != 0:
        if abs(new_hi.coef(index)) != 1 or lo is None or hi is None:
            new_hi = None
        else:
            new_hi = _expand_bound(new_hi, index, hi if new_hi.coef(index) > 0 else lo)
    return VarRef.region(ref.base, new_lo, new_hi)


def expand_region(ref: VarRef, env: Optional[PredState]) -> VarRef:
    """Expand every exact-ranged index out of ``ref``.

    Scalars and regions pass through (regions get their bounds widened);
    constant-subscript elements become singleton regions; an element whose
    subscript is symbolic but mentions no exact-ranged name raises
    MissingRange.
    """
    if ref.kind == SCALAR:
        return ref
    if ref.kind == OPAQUE:
        return VarRef.whole(ref.base)
    cur = ref
    for _ in range(8):  # bounded: each round removes at least one name
        names = cur.names()
        ranged = sorted(n for n in names if _exact_fact(env, n) is not None)
        if not ranged:
            break
        iv = _exact_fact(env, ranged[0])
        cur = expand_over(cur, ranged[0], iv.lo, iv.hi)
    if cur.kind == ELEM:
        if cur.sub.names():
            raise MissingRange(ref.display())
        return VarRef.region(cur.base, cur.sub, cur.sub)
    return cur


def merge_regions(refs: Iterable[VarRef], env: Optional[PredState] = None) -> set[VarRef]:
    """Canonicalize a ref set: hull same-base regions when comparable.

    A whole-array region absorbs every other reference of its base.
    Incomparable regions of one base are kept side by side.
    """
    out: list[VarRef] = []
    from .refs import sorted_refs

    for ref in sorted_refs(set(refs)):
        if ref.kind != REGION:
            out.append(ref)
            continue
        merged = ref
        rest: list[VarRef] = []
        for other in out:
            if other.base != merged.base or other.kind != REGION:
                rest.append(other)
                continue
            if merged.is_whole() or other.is_whole():
                merged = VarRef.whole(merged.base)
                continue
            lo = _hull_lo(merged.lo, other.lo, env)
            hi = _hull_hi(merged.hi, other.hi, env)
            if lo is MISSING or hi is MISSING:
                rest.append(other)
            else:
                merged = VarRef.region(merged.base, lo, hi)
        rest.append(merged)
        out = rest
    result = set(out)
    # Whole-array regions absorb same-base leftovers (elements, opaque).
    wholes = {r.base for r in result if r.kind == REGION and r.is_whole()}
    return {
        r
        for r in result
        if r.kind == SCALAR or r.base not in wholes or (r.kind == REGION and r.is_whole())
    }


MISSING = object()


def _hull_lo(a: Optional[LinExpr], b: Optional[LinExpr], env: Optional[PredState]):
    if a is None or b is None:
        return None
    if a == b:
        return a
    if provably_le(a, b, env):
        return a
    if provably_le(b, a, env):
        return b
    return MISSING


def _hull_hi(a: Optional[LinExpr], b: Optional[LinExpr], env: Optional[PredState]):
    if a is None or b is None:
        return None
    if a == b:
        return a
    if provably_le(a, b, env):
        return b
    if provably_le(b, a, env):
        return a
    return MISSING
