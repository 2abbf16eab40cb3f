"""The three labelling passes and construct aggregation.

Per vertex the store keeps four reference sets:

* ``I`` - values read by the operation,
* ``O`` - locations the operation may write,
* ``D`` - locations the operation definitely writes (``D subset-of O``),
* ``F`` - values still needed after the operation (live-out).

The forward I/O/D wave additionally maintains *flowing* sets: accumulated
may-writes, accumulated definite writes (joined by intersection at branch
merges, so a location written on only one arm drops out), and the reads
exposed to the program entry.  The backward wave computes F with liveness
semantics, killing through D only - a conditional write never hides a value.
A separate forward wave runs the predicate transfer (interval facts plus
branch conditions), and a syntactic pass recognizes reduction updates.

Construct aggregation folds per-statement labels into whole-construct
labels: iteration summaries at ENDDO vertices and whole-loop summaries
(with indexed references expanded into array regions) at loop headers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import predicates as P
from .graph import (
    BACK,
    BR_FALSE,
    BR_TRUE,
    LOOP_BODY,
    LOOP_EXIT,
    ConstructNode,
    Role,
    StmtGraph,
    Usage,
)
from .lang import (
    Assign,
    Bin,
    Cmp,
    DoLoop,
    Elem,
    IfThenElse,
    Neg,
    Num,
    Print,
    Var,
    array_bases,
    cmp_text,
    expr_text,
    linexpr_of,
    scalar_names,
)
from .overlap import MissingRange, covers, expand_over, merge_regions
from .predicates import (
    BLANK,
    CondFact,
    Interval,
    PredState,
    ReductionFact,
    hull,
    widen,
)
from .refs import STDOUT, LinExpr, VarRef, display_set, sorted_refs
from .wave import WaveHooks, WaveStats, run_backward, run_forward


@dataclass
class LabelQuad:
    i: set[VarRef] = field(default_factory=set)
    o: set[VarRef] = field(default_factory=set)
    d: set[VarRef] = field(default_factory=set)
    f: set[VarRef] = field(default_factory=set)

    def copy(self) -> "LabelQuad":
        return LabelQuad(set(self.i), set(self.o), set(self.d), set(self.f))


class LabelStore:
    """All labels of one analysis run over one statement graph."""

    def __init__(self, g: StmtGraph, usage: list[Usage]):
        self.g = g
        self.usage = usage
        nv = g.nv
        self.local: list[LabelQuad] = [LabelQuad() for _ in range(nv)]
        self.seed_preds: list[PredState] = [PredState() for _ in range(nv)]
        # Flowing I/O/D state: per-edge contributions, folded on demand.
        self.dcontrib: list[dict[int, frozenset]] = [dict() for _ in range(nv)]
        self.ocontrib: list[dict[int, frozenset]] = [dict() for _ in range(nv)]
        self.econtrib: list[dict[int, frozenset]] = [dict() for _ in range(nv)]
        # Liveness (F).
        self.fset: list[set[VarRef]] = [set() for _ in range(nv)]
        self.fseen: list[set[int]] = [set() for _ in range(nv)]
        # Predicates.
        self.pred_in: list[Optional[PredState]] = [None] * nv
        self.pred_contrib: list[dict[int, tuple[PredState, bool]]] = [
            dict() for _ in range(nv)
        ]
        # Reductions.
        self.red_at: dict[int, ReductionFact] = {}
        self.red_join: dict[int, ReductionFact] = {}
        self.loop_reductions: dict[int, list[ReductionFact]] = {}
        # Construct summaries.
        self.aggregates: dict[int, LabelQuad] = {}
        self.stats: dict[str, WaveStats] = {}
        self.notes: list[str] = []
        self.predicates_enabled = True

    # -- flowing-state folds -------------------------------------------------

    def in_d(self, v: int) -> frozenset:
        nonempty = [c for c in self.dcontrib[v].values() if c]
        if not nonempty:
            return frozenset()
        out = nonempty[0]
        for c in nonempty[1:]:
            out = out & c
        return out

    def in_o(self, v: int) -> frozenset:
        out: frozenset = frozenset()
        for c in self.ocontrib[v].values():
            out = out | c
        return out

    def in_e(self, v: int) -> frozenset:
        out: frozenset = frozenset()
        for c in self.econtrib[v].values():
            out = out | c
        return out

    def out_d(self, v: int) -> frozenset:
        return self.in_d(v) | frozenset(self.local[v].d)

    def out_o(self, v: int) -> frozenset:
        return self.in_o(v) | frozenset(self.local[v].o)

    def out_e(self, v: int) -> frozenset:
        ind = self.in_d(v)
        exposed = {
            r
            for r in self.local[v].i
            if not any(covers(d, r) for d in ind)
        }
        return self.in_e(v) | frozenset(exposed)

    def flow_quad(self, v: int) -> LabelQuad:
        """Path-accumulated sets after the vertex executes."""
        return LabelQuad(
            set(self.out_e(v)), set(self.out_o(v)), set(self.out_d(v)),
            set(self.fset[v]),
        )

    # -- liveness helpers ------------------------------------------------------

    def effective_use(self, v: int) -> set[VarRef]:
        """Reads that generate liveness; the output stream does not flow."""
        return {r for r in self.local[v].i if r != STDOUT}

    def live_in(self, v: int) -> set[VarRef]:
        return self.effective_use(v) | (self.fset[v] - set(self.local[v].d))

    def pred_at(self, v: int) -> PredState:
        st = self.pred_in[v]
        return st if st is not None else BLANK

    # -- canonical snapshot (determinism / permutation tests) -----------------

    def snapshot(self):
        def keyset(refs) -> tuple:
            return tuple(r.display() for r in sorted_refs(refs))

        rows = []
        for v in range(self.g.nv):
            q = self.local[v]
            agg = self.aggregates.get(v)
            rows.append(
                (
                    keyset(q.i), keyset(q.o), keyset(q.d), keyset(q.f),
                    keyset(self.out_e(v)), keyset(self.out_o(v)), keyset(self.out_d(v)),
                    keyset(self.fset[v]),
                    tuple(self.pred_at(v).display_items()),
                    (keyset(agg.i), keyset(agg.o), keyset(agg.d), keyset(agg.f))
                    if agg
                    else None,
                )
            )
        reds = tuple(
            (h, tuple(f.display() for f in fs))
            for h, fs in sorted(self.loop_reductions.items())
        )
        return (tuple(rows), reds)


# ---------------------------------------------------------------------------
# Pass 0: seeding.
# ---------------------------------------------------------------------------

def seed_labels(g: StmtGraph, usage: list[Usage]) -> LabelStore:
    """Attach local I/O/D (and F at output statements) to every vertex.

    An ENDDO vertex mirrors the I/O/D sets of the final statement of its
    body: the loop-end carries one iteration's data, and the mirrored sets
    restate facts already reaching it, so every downstream pass is
    unaffected.  Loop headers spread the index range fact over their body,
    and condition vertices put their branch facts on the first vertex of
    each arm.
    """
    store = LabelStore(g, usage)
    for v in g.vertices:
        u = usage[v.vid]
        q = store.local[v.vid]
        q.i = set(u.reads)
        q.o = set(u.writes)
        q.d = set(u.definite)
        q.f = set(u.f_seed)
    for hv in sorted(g.loops):
        info = g.loops[hv]
        last = info.end - 1
        if last > hv:  # non-empty body
            src = store.local[last]
            dst = store.local[info.end]
            dst.i = set(src.i)
            dst.o = set(src.o)
            dst.d = set(src.d)
    _seed_predicates(g, store)
    return store


def _seed_predicates(g: StmtGraph, store: LabelStore) -> None:
    def add_fact(vid: int, name: str, iv: Interval) -> None:
        store.seed_preds[vid].facts[name] = iv

    def add_cond(vid: int, c: CondFact) -> None:
        store.seed_preds[vid].conds = store.seed_preds[vid].conds | {c}

    for hv, info in g.loops.items():
        lo, hi, s = info.lo_lin(), info.hi_lin(), info.step_const()
        if lo is not None and hi is not None and s:
            iv = Interval(lo, hi, s) if s > 0 else Interval(hi, lo, -s)
            for vid in info.body:
                add_fact(vid, info.index, iv)
    for cv, info in g.ifs.items():
        stmt = g.vertices[cv].stmt
        assert isinstance(stmt, IfThenElse)
        for value, first in ((True, info.then_vids[:1]), (False, [info.else_vid])):
            for vid in first:
                if vid is None:
                    continue
                fact = _branch_fact(stmt.cond, value)
                if isinstance(fact, tuple):
                    name, op, bound = fact
                    add_fact(vid, name, P.refine(None, op, bound))
                elif fact is not None:
                    add_cond(vid, fact)
    for v in g.vertices:
        if isinstance(v.stmt, Assign) and isinstance(v.stmt.target, Var) and v.role == Role.PLAIN:
            le = linexpr_of(v.stmt.rhs)
            if le is not None and le.is_const():
                for succ in g.fwd[v.vid]:
                    add_fact(succ, v.stmt.target.name, Interval(le, le, 1))


def _branch_fact(cond: Cmp, value: bool):
    """What one branch of a comparison teaches.

    Returns (name, op, bound) when the condition refines a scalar's
    interval, a CondFact to carry verbatim otherwise.
    """
    op = cond.op if value else P.NEGATED[cond.op]
    left, right = cond.left, cond.right
    if isinstance(right, Var) and not isinstance(left, Var):
        flip = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "/=": "/="}
        left, right, op = right, left, flip[op]
    if isinstance(left, Var):
        ble = linexpr_of(right)
        if ble is not None and left.name not in ble.names():
            return (left.name, op, ble)
    if value:
        display = cmp_text(cond)
    else:
        display = f"{expr_text(cond.left)} {P.NEGATED[cond.op]} {expr_text(cond.right)}"
    return CondFact(
        display,
        frozenset(scalar_names(cond.left) | scalar_names(cond.right)),
        frozenset(array_bases(cond.left) | array_bases(cond.right)),
    )


# ---------------------------------------------------------------------------
# Pass 1: forward I/O/D wave.
# ---------------------------------------------------------------------------

def iod_transfer(target: int, source: int, store: LabelStore) -> bool:
    """Push the source's flowing I/O/D sets along one edge."""
    sd, so, se = store.out_d(source), store.out_o(source), store.out_e(source)
    assert sd <= so, "definite writes escaped the may-write set"
    first = source not in store.dcontrib[target]
    old = (store.in_d(target), store.in_o(target), store.in_e(target))
    store.dcontrib[target][source] = sd
    store.ocontrib[target][source] = so
    store.econtrib[target][source] = se
    new = (store.in_d(target), store.in_o(target), store.in_e(target))
    return first or old != new


def run_iod_pass(store: LabelStore, *, max_passes: int = 64,
                 order=None, trace=None) -> WaveStats:
    g = store.g
    hooks = WaveHooks(action=lambda t, s: iod_transfer(t, s, store))
    stats = run_forward(g, hooks, max_passes=max_passes, order=order, trace=trace)
    store.stats["iod"] = stats
    return stats


# ---------------------------------------------------------------------------
# Pass 2: forward predicate wave.
# ---------------------------------------------------------------------------

def _apply_vertex_op(state: PredState, vid: int, store: LabelStore) -> PredState:
    v = store.g.vertices[vid]
    s = v.stmt
    if not (v.role == Role.PLAIN and isinstance(s, Assign)):
        return state
    out = state.copy()
    if isinstance(s.target, Elem):
        base = s.target.base
        out.conds = frozenset(c for c in out.conds if base not in c.bases)
        return out
    x = s.target.name
    old = out.facts.pop(x, None)
    # Facts and conditions that mention x become stale.
    for name in [n for n, iv in out.facts.items() if iv.mentions(x)]:
        del out.facts[name]
    out.conds = frozenset(c for c in out.conds if x not in c.names)
    le = linexpr_of(s.rhs)
    if le is None:
        return out
    cx = le.coef(x)
    if cx == 0:
        out.facts[x] = Interval(le, le, 1)
    elif cx == 1 and old is not None:
        delta = le - LinExpr.of_name(x)
        out.facts[x] = Interval(
            old.lo + delta if old.lo is not None else None,
            old.hi + delta if old.hi is not None else None,
            old.step,
        )
    elif cx == -1 and old is not None:
        delta = le + LinExpr.of_name(x)  # x' = -x + delta
        ref = P.reflect_fact(old)
        out.facts[x] = Interval(
            ref.lo + delta if ref.lo is not None else None,
            ref.hi + delta if ref.hi is not None else None,
            ref.step,
        )
    return out


def _apply_edge(state: PredState, source: int, target: int, store: LabelStore) -> PredState:
    g = store.g
    kind = g.edge_kind[(source, target)]
    if kind in (LOOP_BODY, LOOP_EXIT):
        info = g.loops[source]
        out = state.copy()
        idx = info.index
        out.facts.pop(idx, None)
        for name in [n for n, iv in out.facts.items() if iv.mentions(idx)]:
            del out.facts[name]
        out.conds = frozenset(c for c in out.conds if idx not in c.names)
        lo, hi, s = info.lo_lin(), info.hi_lin(), info.step_const()
        if kind == LOOP_BODY and lo is not None and hi is not None and s:
            if idx not in lo.names() and idx not in hi.names():
                out.facts[idx] = (
                    Interval(lo, hi, s) if s > 0 else Interval(hi, lo, -s)
                )
        if kind == LOOP_EXIT and s == 1 and hi is not None and idx not in hi.names():
            after = hi.shifted(1)
            out.facts[idx] = Interval(after, after, 1)
        return out
    if kind in (BR_TRUE, BR_FALSE):
        stmt = g.vertices[source].stmt
        assert isinstance(stmt, IfThenElse)
        fact = _branch_fact(stmt.cond, kind == BR_TRUE)
        out = state.copy()
        if isinstance(fact, tuple):
            name, op, bound = fact
            out.facts[name] = P.refine(out.facts.get(name), op, bound)
        elif fact is not None:
            out.conds = out.conds | {fact}
        return out
    return state


def _fold_pred(target: int, store: LabelStore) -> PredState:
    contribs = sorted(store.pred_contrib[target].items())
    acc: Optional[PredState] = None
    for _, (st, is_back) in contribs:
        if is_back:
            continue
        acc = st.copy() if acc is None else _meet_common(acc, st)
    for _, (st, is_back) in contribs:
        if not is_back:
            continue
        if acc is None:
            acc = st.copy()
        else:
            acc = _widen_merge(acc, st)
    return acc if acc is not None else PredState()


def _meet_common(a: PredState, b: PredState) -> PredState:
    facts = {
        name: hull(a.facts[name], b.facts[name])
        for name in a.facts.keys() & b.facts.keys()
    }
    facts = {n: iv for n, iv in facts.items()
             if iv.lo is not None or iv.hi is not None}
    return PredState(facts, a.conds & b.conds)


def _widen_merge(cur: PredState, back: PredState) -> PredState:
    facts = {}
    for name, iv in cur.facts.items():
        if name in back.facts:
            w = widen(iv, back.facts[name])
            if w.lo is not None or w.hi is not None:
                facts[name] = w
    return PredState(facts, cur.conds & back.conds)


def predicate_transfer(target: int, source: int, store: LabelStore) -> bool:
    """Flow interval and branch facts along one edge."""
    src_state = store.pred_at(source)
    out = _apply_vertex_op(src_state, source, store)
    out = _apply_edge(out, source, target, store)
    is_back = store.g.edge_kind[(source, target)] == BACK
    first = source not in store.pred_contrib[target]
    store.pred_contrib[target][source] = (out, is_back)
    old = store.pred_in[target]
    new = _fold_pred(target, store)
    store.pred_in[target] = new
    return first or old != new


def run_predicate_pass(store: LabelStore, *, max_passes: int = 64,
                       order=None, trace=None) -> WaveStats:
    g = store.g
    hooks = WaveHooks(action=lambda t, s: predicate_transfer(t, s, store))
    stats = run_forward(g, hooks, max_passes=max_passes, order=order, trace=trace)
    store.stats["predicates"] = stats
    return stats


# ---------------------------------------------------------------------------
# Pass 3: backward liveness wave (F sets).
# ---------------------------------------------------------------------------

def f_transfer(target: int, source: int, store: LabelStore) -> bool:
    """Pull the source's live-in set into the target's live-out set.

    The kill set is D, not O: a write that happens on only some executions
    cannot make the old value dead.
    """
    live_in = store.effective_use(source) | (
        store.fset[source] - set(store.local[source].d)
    )
    first = source not in store.fseen[target]
    store.fseen[target].add(source)
    old_size = len(store.fset[target])
    store.fset[target] |= live_in
    return first or len(store.fset[target]) != old_size


def run_liveness_pass(store: LabelStore, *, max_passes: int = 64,
                      order=None, trace=None) -> WaveStats:
    g = store.g
    for v in range(g.nv):
        store.fset[v] |= store.local[v].f
    hooks = WaveHooks(action=lambda t, s: f_transfer(t, s, store))
    # Every vertex starts marked so each publishes its local use-set in the
    # first sweep; with exit-only seeding a loop body's own reads would need
    # one extra trip around every cycle before reaching the loop end.
    stats = run_backward(g, hooks, seeds=range(g.nv), max_passes=max_passes,
                         order=order, trace=trace)
    store.stats["liveness"] = stats
    return stats


# ---------------------------------------------------------------------------
# Reduction recognition.
# ---------------------------------------------------------------------------

def _self_update(stmt: Assign) -> Optional[tuple[str, str, str]]:
    """Match ``z = z op e`` forms; returns (var, group, signed operand)."""
    if not isinstance(stmt.target, Var):
        return None
    z = stmt.target.name
    rhs = stmt.rhs
    if not isinstance(rhs, Bin):
        return None

    def clean(e) -> bool:
        return z not in scalar_names(e) and z not in array_bases(e)

    zvar = Var(z)
    if rhs.op == "+":
        if rhs.left == zvar and clean(rhs.right):
            return (z, P.SUM, expr_text(rhs.right))
        if rhs.right == zvar and clean(rhs.left):
            return (z, P.SUM, expr_text(rhs.left))
    elif rhs.op == "-":
        if rhs.left == zvar and clean(rhs.right):
            return (z, P.SUM, "-" + expr_text(rhs.right))
    elif rhs.op == "*":
        if rhs.left == zvar and clean(rhs.right):
            return (z, P.PRODUCT, expr_text(rhs.right))
        if rhs.right == zvar and clean(rhs.left):
            return (z, P.PRODUCT, expr_text(rhs.left))
    return None


def _guarded_extremum(g: StmtGraph, info) -> Optional[ReductionFact]:
    """Match ``IF (e REL z) THEN; z = e; ENDIF`` as a min/max update."""
    if len(info.then_vids) != 1 or info.else_vids:
        return None
    if info.else_vid is not None:
        return None
    w = info.then_vids[0]
    stmt = g.vertices[w].stmt
    if not (g.vertices[w].role == Role.PLAIN and isinstance(stmt, Assign)):
        return None
    if not isinstance(stmt.target, Var):
        return None
    z = stmt.target.name
    e = stmt.rhs
    if z in scalar_names(e) or z in array_bases(e):
        return None
    cond = g.vertices[info.cond].stmt.cond
    pairs = {
        ("<", "left"): P.MAX, ("<=", "left"): P.MAX,
        (">", "left"): P.MIN, (">=", "left"): P.MIN,
        (">", "right"): P.MAX, (">=", "right"): P.MAX,
        ("<", "right"): P.MIN, ("<=", "right"): P.MIN,
    }
    if cond.left == Var(z) and cond.right == e:
        op = pairs.get((cond.op, "left"))
    elif cond.right == Var(z) and cond.left == e:
        op = pairs.get((cond.op, "right"))
    else:
        return None
    if op is None:
        return None
    return ReductionFact(z, op, expr_text(e), guard_vid=info.cond)


def recognize_reductions(g: StmtGraph, store: LabelStore) -> LabelStore:
    """Attach reduction facts at update vertices and lift them per loop."""
    for v in g.vertices:
        if v.role == Role.PLAIN and isinstance(v.stmt, Assign):
            m = _self_update(v.stmt)
            if m:
                store.red_at[v.vid] = ReductionFact(m[0], m[1], m[2])
    for cv, info in g.ifs.items():
        fact = _guarded_extremum(g, info)
        if fact is not None:
            store.red_at[info.then_vids[0]] = fact
        # Signed merge at the join when both arms update the same scalar.
        then_facts = [store.red_at[w] for w in info.then_vids if w in store.red_at]
        else_facts = [store.red_at[w] for w in info.else_vids if w in store.red_at]
        if len(then_facts) == 1 and len(else_facts) == 1:
            a, b = then_facts[0], else_facts[0]
            if a.var == b.var and a.op == b.op:
                store.red_join[info.end] = ReductionFact(
                    a.var, a.op, _merge_operands([a.operand, b.operand])
                )
    for hv in sorted(g.loops):
        _lift_loop_reduction(g, store, hv)
    return store


def _merge_operands(ops: list[str]) -> str:
    uniq = sorted(set(ops))
    if len(uniq) == 2:
        plain = [o for o in uniq if not o.startswith("-")]
        signed = [o[1:] for o in uniq if o.startswith("-")]
        if len(plain) == 1 and signed == plain:
            return "+/-" + plain[0]
    return " | ".join(uniq)


def _lift_loop_reduction(g: StmtGraph, store: LabelStore, hv: int) -> None:
    info = g.loops[hv]
    body = info.body
    nested_indices = {
        g.loops[v].index for v in body if v in g.loops
    }
    # Candidate scalars written anywhere in the body.
    writers: dict[str, list[int]] = {}
    for vid in body:
        for ref in store.local[vid].o:
            if ref.is_scalar() and ref != STDOUT:
                writers.setdefault(ref.base, []).append(vid)
    for z, wvids in sorted(writers.items()):
        if z == info.index or z in nested_indices:
            continue
        facts = [store.red_at.get(w) for w in wvids]
        if any(f is None or f.var != z for f in facts):
            continue
        groups = {f.op for f in facts}
        if len(groups) != 1:
            continue
        allowed = set(wvids) | {f.guard_vid for f in facts if f.guard_vid >= 0}
        zref = VarRef.scalar(z)
        read_elsewhere = any(
            zref in store.local[vid].i and vid not in allowed for vid in body
        )
        if read_elsewhere:
            continue
        merged = ReductionFact(
            z, groups.pop(), _merge_operands([f.operand for f in facts])
        )
        store.loop_reductions.setdefault(hv, []).append(merged)


# ---------------------------------------------------------------------------
# Construct aggregation.
# ---------------------------------------------------------------------------

def _compose(acc: LabelQuad, nxt: LabelQuad) -> LabelQuad:
    exposed = {r for r in nxt.i if not any(covers(d, r) for d in acc.d)}
    return LabelQuad(acc.i | exposed, acc.o | nxt.o, acc.d | nxt.d, set())


def _expand_set(refs: set[VarRef], info, store: LabelStore) -> set[VarRef]:
    lo, hi, s = info.lo_lin(), info.hi_lin(), info.step_const()
    if s is not None and s < 0:
        lo, hi = hi, lo
    if s is None:
        lo = hi = None
    out: set[VarRef] = set()
    for r in refs:
        if info.index in r.names() or r.kind == "opaque":
            try:
                out.add(expand_over(r, info.index, lo, hi))
            except MissingRange:
                out.add(VarRef.whole(r.base))
                store.notes.append(
                    f"opaque subscript: {r.display()} widened to {r.base}(*)"
                )
        else:
            out.add(r)
    return out


def aggregate_constructs(g: StmtGraph, store: LabelStore) -> LabelStore:
    """Summarize loops and branches; results land in ``store.aggregates``.

    Loop headers get whole-loop quads (indexed refs expanded into regions,
    index added to O/D, bound reads added to I, and F = the region-expanded
    values live on loop entry).  ENDDO vertices get one iteration's quad.
    IF headers get union-I/union-O and the intersection of the arms' D.
    """

    def seq_quad(items: list) -> LabelQuad:
        acc = LabelQuad()
        for item in items:
            acc = _compose(acc, item_quad(item))
        return acc

    def item_quad(item) -> LabelQuad:
        if isinstance(item, ConstructNode):
            return store.aggregates[item.header]
        return store.local[item]

    def visit(node: ConstructNode) -> None:
        for item in node.items + node.then_items + (node.else_items or []):
            if isinstance(item, ConstructNode):
                visit(item)
        if node.kind == "if":
            info = g.ifs[node.header]
            qt = seq_quad(node.then_items)
            cond = store.local[node.header]
            if node.else_items is not None:
                qe = seq_quad(node.else_items)
                merged = LabelQuad(qt.i | qe.i, qt.o | qe.o, qt.d & qe.d, set())
            else:
                merged = LabelQuad(set(qt.i), set(qt.o), set(), set())
            store.aggregates[node.header] = LabelQuad(
                cond.i | merged.i, merged.o, merged.d, set()
            )
        elif node.kind == "loop":
            info = g.loops[node.header]
            q_iter = seq_quad(node.items)
            store.aggregates[info.end] = q_iter
            env = store.pred_at(node.header)
            idx = VarRef.scalar(info.index)
            loop_q = LabelQuad(
                merge_regions(_expand_set(q_iter.i, info, store), env)
                | set(store.local[node.header].i),
                merge_regions(_expand_set(q_iter.o, info, store), env) | {idx},
                merge_regions(_expand_set(q_iter.d, info, store), env) | {idx},
                merge_regions(_expand_set(store.live_in(node.header), info, store), env),
            )
            store.aggregates[node.header] = loop_q

    visit(g.tree)
    return store


# ---------------------------------------------------------------------------
# Orchestration.
# ---------------------------------------------------------------------------

def run_all(
    g: StmtGraph,
    usage: list[Usage],
    *,
    predicates: bool = True,
    max_passes: int = 64,
    forward_order=None,
    backward_order=None,
    trace: Optional[list] = None,
) -> LabelStore:
    """Seed labels, run the three waves, recognize reductions, aggregate."""
    store = seed_labels(g, usage)
    store.predicates_enabled = predicates
    run_iod_pass(store, max_passes=max_passes, order=forward_order, trace=trace)
    if predicates:
        run_predicate_pass(store, max_passes=max_passes, order=forward_order,
                           trace=trace)
        recognize_reductions(g, store)
    run_liveness_pass(store, max_passes=max_passes, order=backward_order,
                      trace=trace)
    aggregate_constructs(g, store)
    return store


# ---------------------------------------------------------------------------
# Store dump.
# ---------------------------------------------------------------------------

def vertex_labels(store: LabelStore, vid: int) -> LabelQuad:
    """The presentation quad for one vertex.

    Plain statements show their local sets; ENDIF joins show the flowing
    sets (the merged arms); ENDDO vertices show one iteration's summary;
    loop headers show the whole-loop summary.
    """
    v = store.g.vertices[vid]
    if v.role == Role.LOOP_HEADER and vid in store.aggregates:
        return store.aggregates[vid]
    if v.role == Role.LOOP_END and vid in store.aggregates:
        q = store.aggregates[vid].copy()
        q.f = set(store.fset[vid])
        return q
    if v.role == Role.IF_END:
        return store.flow_quad(vid)
    q = store.local[vid].copy()
    q.f = set(store.fset[vid])
    return q


def pred_labels(store: LabelStore, vid: int) -> list[str]:
    items = list(store.pred_at(vid).display_items())
    fact = store.red_at.get(vid) or store.red_join.get(vid)
    if fact:
        items.append(fact.display())
    v = store.g.vertices[vid]
    if v.role in (Role.LOOP_HEADER, Role.LOOP_END):
        header = vid if v.role == Role.LOOP_HEADER else store.g.loop_by_end(vid)
        for f in store.loop_reductions.get(header, []):
            items.append(f.display())
    return sorted(set(items))


def dump_labels(store: LabelStore) -> list[str]:
    """One diff-stable line per statement vertex."""
    lines = []
    for vid in store.g.statement_vids():
        v = store.g.vertices[vid]
        q = vertex_labels(store, vid)
        pr = pred_labels(store, vid)
        lines.append(
            f"v{vid:<3} {v.text:<28} I={display_set(q.i)} O={display_set(q.o)} "
            f"D={display_set(q.d)} F={display_set(q.f)} Pr={{{', '.join(pr)}}}"
        )
    return lines
