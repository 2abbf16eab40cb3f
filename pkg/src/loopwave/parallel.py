"""Dependence testing and loop classification.

Two operations with label quads (I, O, D) commute when all three dependence
sets are empty:

* flow:   O(p1) meets I(p2) union (O(p2) minus D(p2))
* anti:   I(p1) meets O(p2)
* output: O(p1) meets D(p2)

Only flow (true) dependences fundamentally block parallel execution; anti
and output conflicts are storage reuse and can be compiled away by
privatization, copy-in snapshots, or renaming.  A loop is tested by
instantiating the same condition between an earlier iteration i and a later
iteration i' > i of its body summary, resolving subscript collisions with
the loop's index range and the interval facts in scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .graph import Role, StmtGraph
from .labels import LabelQuad, LabelStore
from .overlap import Overlap, may_overlap
from .predicates import (
    NEG,
    NONNEG,
    NONPOS,
    POS,
    ZERO,
    Interval,
    PredState,
    ReductionFact,
    sign_of,
)
from .refs import ELEM, OPAQUE, REGION, SCALAR, LinExpr, VarRef

FLOW = "flow"
ANTI = "anti"
OUTPUT = "output"

PARALLEL = "PARALLEL"
PARALLEL_WITH_TRANSFORMS = "PARALLEL_WITH_TRANSFORMS"
REDUCTION = "REDUCTION"
SEQUENTIAL = "SEQUENTIAL"


@dataclass(frozen=True)
class Witness:
    kind: str
    src: VarRef           # reference at the earlier operation / iteration
    dst: VarRef           # reference at the later operation / iteration
    src_vid: Optional[int] = None
    dst_vid: Optional[int] = None

    def display(self) -> str:
        s = f"{self.kind}: {self.src.display()} -> {self.dst.display()}"
        if self.src_vid is not None and self.dst_vid is not None:
            s += f" (v{self.src_vid} -> v{self.dst_vid})"
        return s


@dataclass
class DependenceReport:
    flow: list[Witness] = field(default_factory=list)
    anti: list[Witness] = field(default_factory=list)
    output: list[Witness] = field(default_factory=list)

    def empty(self) -> bool:
        return not (self.flow or self.anti or self.output)

    def all(self) -> list[Witness]:
        return self.flow + self.anti + self.output


@dataclass
class LoopVerdict:
    header: int
    verdict: str
    private_vars: set[str] = field(default_factory=set)
    copy_in: set[VarRef] = field(default_factory=set)
    reductions: list[ReductionFact] = field(default_factory=list)
    inhibitors: list[Witness] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Statement-level test.
# ---------------------------------------------------------------------------

def eq1_dependence(
    p1: LabelQuad, p2: LabelQuad, env: Optional[PredState] = None
) -> DependenceReport:
    """Dependence witnesses between two operations; p1 precedes p2."""
    report = DependenceReport()

    def collect(kind: str, srcs, dsts, bucket: list[Witness]) -> None:
        for a in sorted(srcs, key=VarRef.sort_key):
            for b in sorted(dsts, key=VarRef.sort_key):
                if may_overlap(a, b, env) != Overlap.DISJOINT:
                    bucket.append(Witness(kind, a, b))

    collect(FLOW, p1.o, set(p2.i) | (set(p2.o) - set(p2.d)), report.flow)
    collect(ANTI, p1.i, p2.o, report.anti)
    collect(OUTPUT, p1.o, p2.d, report.output)
    return report


# ---------------------------------------------------------------------------
# Loop-carried test.
# ---------------------------------------------------------------------------

def _carried_collision(
    a: VarRef,
    b: VarRef,
    index: str,
    step: Optional[int],
    env: PredState,
    variant: set[str],
) -> bool:
    """Can ``a`` at iteration i touch the cell of ``b`` at iteration i' > i?"""
    if a.base != b.base:
        return False
    if a.kind == SCALAR or b.kind == SCALAR:
        return True  # same scalar cell every iteration
    if a.kind in (OPAQUE, REGION) or b.kind in (OPAQUE, REGION):
        return True  # no per-iteration structure to reason with
    # Element vs element with linear subscripts.
    sa, sb = a.sub, b.sub
    if (sa.names() - {index}) & variant or (sb.names() - {index}) & variant:
        return True  # offsets change across iterations; no linear model
    ca, cb = sa.coef(index), sb.coef(index)
    if ca != cb:
        return True  # differing slopes: collisions generally satisfiable
    if ca == 0:
        # Fixed cells: collide across iterations iff the offsets can agree.
        return sign_of(sa - sb, env) not in (POS, NEG)
    if step is None or step == 0:
        return not (sa - sb).is_zero() and True or False
    # Same slope c: c*(i' - i)*step = off(a) - off(b), with i' - i >= 1.
    d = sa.drop(index) - sb.drop(index)
    need = ca * step  # required sign of d, scaled per iteration gap
    if d.is_const():
        if d.const == 0:
            return False
        if d.const % need != 0 if need != 0 else True:
            return False
        return d.const // need >= 1
    sign = sign_of(d, env)
    if need > 0:
        return sign not in (ZERO, NEG, NONPOS)
    return sign not in (ZERO, POS, NONNEG)


def loop_carried_test(header: int, store: LabelStore) -> DependenceReport:
    """Instantiate the dependence condition between iterations of one loop."""
    g = store.g
    info = g.loops[header]
    iter_q = store.aggregates[info.end]
    env = store.pred_at(header)
    step = info.step_const()
    variant = {
        r.base
        for r in iter_q.o
        if r.is_scalar()
    }
    report = DependenceReport()

    def attribute(ref: VarRef, *, write: bool) -> Optional[int]:
        for vid in info.body:
            bucket = store.local[vid].o if write else store.local[vid].i
            if ref in bucket:
                return vid
        return None

    def collect(kind: str, srcs, dsts, bucket, *, src_w: bool, dst_w: bool) -> None:
        for a in sorted(srcs, key=VarRef.sort_key):
            for b in sorted(dsts, key=VarRef.sort_key):
                if _carried_collision(a, b, info.index, step, env, variant):
                    bucket.append(
                        Witness(kind, a, b,
                                attribute(a, write=src_w), attribute(b, write=dst_w))
                    )

    flow_targets = set(iter_q.i) | (set(iter_q.o) - set(iter_q.d))
    collect(FLOW, iter_q.o, flow_targets, report.flow, src_w=True, dst_w=False)
    collect(ANTI, iter_q.i, iter_q.o, report.anti, src_w=False, dst_w=True)
    collect(OUTPUT, iter_q.o, iter_q.d, report.output, src_w=True, dst_w=True)
    return report


# ---------------------------------------------------------------------------
# Classification.
# ---------------------------------------------------------------------------

def loop_exit_live(header: int, store: LabelStore) -> set[VarRef]:
    """Values needed after the loop completes (union over exit targets)."""
    out: set[VarRef] = set()
    for t in store.g.loop_exit_targets(header):
        out |= store.live_in(t)
    return out


def _statically_empty(info) -> bool:
    lo, hi, s = info.lo_lin(), info.hi_lin(), info.step_const()
    if lo is None or hi is None or s is None or s == 0:
        return False
    if lo.is_const() and hi.is_const():
        return lo.const > hi.const if s > 0 else lo.const < hi.const
    return False


def classify_loop(header: int, store: LabelStore) -> LoopVerdict:
    """Classify one loop with supporting evidence.

    Pipeline: privatize dead scalars written every iteration, credit
    recognized reductions, snapshot arrays read before being overwritten,
    then judge by what survives - any remaining flow witness makes the
    loop sequential.
    """
    g = store.g
    info = g.loops[header]
    if _statically_empty(info):
        return LoopVerdict(header, PARALLEL)
    iter_q = store.aggregates[info.end]
    report = loop_carried_test(header, store)
    exit_live = loop_exit_live(header, store)
    exit_scalars = {r.base for r in exit_live if r.is_scalar()}
    d_scalars = {r.base for r in iter_q.d if r.is_scalar()}
    red_facts = store.loop_reductions.get(header, [])
    red_vars = {f.var for f in red_facts}

    private: set[str] = set()
    copy_in: set[VarRef] = set()
    survivors: list[Witness] = []

    def privatizable(name: str) -> bool:
        return name in d_scalars and name not in exit_scalars and name not in red_vars

    for w in report.all():
        scalar_pair = w.src.is_scalar() and w.dst.is_scalar()
        if scalar_pair and w.kind in (ANTI, OUTPUT) and privatizable(w.src.base):
            private.add(w.src.base)
            continue
        if scalar_pair and w.kind in (FLOW, ANTI) and w.src.base in red_vars:
            continue
        if w.kind == ANTI and not w.src.is_scalar():
            copy_in |= _read_footprint(w.src.base, header, store)
            continue
        survivors.append(w)

    if any(w.kind == FLOW for w in survivors):
        return LoopVerdict(header, SEQUENTIAL, private, copy_in,
                           list(red_facts), survivors)
    if red_facts:
        return LoopVerdict(header, REDUCTION, private, copy_in,
                           list(red_facts), survivors)
    if private or copy_in:
        return LoopVerdict(header, PARALLEL_WITH_TRANSFORMS, private, copy_in,
                           list(red_facts), survivors)
    return LoopVerdict(header, PARALLEL, private, copy_in, list(red_facts),
                       survivors)


def _read_footprint(base: str, header: int, store: LabelStore) -> set[VarRef]:
    """The whole-loop read region of one array, for copy-in evidence."""
    loop_q = store.aggregates[header]
    return {r for r in loop_q.i if r.base == base and not r.is_scalar()}


def classify_all(store: LabelStore) -> list[LoopVerdict]:
    return [classify_loop(h, store) for h in store.g.loop_headers()]
