"""Statement graph: one vertex per statement, plus entry/exit.

Every DO loop contributes a header vertex and an ENDDO join vertex with a
back edge ENDDO->header; the loop's exit edge leaves from the header.  Every
IF contributes a condition vertex, an optional ELSE marker vertex, and an
ENDIF join vertex.  Vertices are numbered in source order starting at 1, so
statement k of the program text is vertex vk; vertex 0 is the synthetic
entry and the last vertex is the synthetic exit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

from .lang import (
    Assign,
    Cmp,
    DoLoop,
    Elem,
    IfThenElse,
    Print,
    Program,
    Stmt,
    Var,
    cmp_text,
    linexpr_of,
    stmt_head_text,
    walk_exprs,
)
from .refs import STDOUT, LinExpr, VarRef


class Role(enum.Enum):
    ENTRY = "entry"
    EXIT = "exit"
    PLAIN = "plain"
    LOOP_HEADER = "loop-header"
    LOOP_END = "loop-end"
    IF_COND = "if-cond"
    IF_ELSE = "if-else"
    IF_END = "if-end"


# Edge kinds drive branch refinement and loop-range facts in the
# predicate pass.
SEQ = "seq"
LOOP_BODY = "loop-body"
LOOP_EXIT = "loop-exit"
BACK = "back"
BR_TRUE = "br-true"
BR_FALSE = "br-false"


@dataclass
class Vertex:
    vid: int
    role: Role
    stmt: Optional[Stmt]
    text: str
    depth: int = 0                 # loop-nesting depth
    construct: Optional[int] = None  # header vid of the enclosing construct


@dataclass
class LoopInfo:
    header: int
    end: int
    index: str
    lo_expr: object
    hi_expr: object
    step_expr: object
    body: list[int] = field(default_factory=list)   # vids strictly inside
    depth: int = 1

    def lo_lin(self) -> Optional[LinExpr]:
        return linexpr_of(self.lo_expr)

    def hi_lin(self) -> Optional[LinExpr]:
        return linexpr_of(self.hi_expr)

    def step_const(self) -> Optional[int]:
        if self.step_expr is None:
            return 1
        le = linexpr_of(self.step_expr)
        if le is not None and le.is_const():
            return le.const
        return None


@dataclass
class IfInfo:
    cond: int
    end: int
    else_vid: Optional[int]
    then_vids: list[int] = field(default_factory=list)
    else_vids: list[int] = field(default_factory=list)


@dataclass
class ConstructNode:
    """Structural tree used by construct aggregation."""

    kind: str                      # "root" | "loop" | "if"
    header: Optional[int] = None
    items: list = field(default_factory=list)        # vid | ConstructNode
    then_items: list = field(default_factory=list)   # if only
    else_items: Optional[list] = None                # if only; None = no arm


class StmtGraph:
    def __init__(self, name: str = "<input>"):
        self.name = name
        self.vertices: list[Vertex] = []
        self.fwd: list[list[int]] = []
        self.bwd: list[list[int]] = []
        self.edge_kind: dict[tuple[int, int], str] = {}
        self.loops: dict[int, LoopInfo] = {}
        self.ifs: dict[int, IfInfo] = {}
        self.tree = ConstructNode("root")
        self.entry = 0
        self.exit = 0

    # -- construction ------------------------------------------------------

    def _add_vertex(self, role: Role, stmt: Optional[Stmt], text: str,
                    depth: int, construct: Optional[int]) -> int:
        vid = len(self.vertices)
        self.vertices.append(Vertex(vid, role, stmt, text, depth, construct))
        self.fwd.append([])
        self.bwd.append([])
        return vid

    def _connect(self, a: int, b: int, kind: str = SEQ) -> None:
        if b not in self.fwd[a]:
            self.fwd[a].append(b)
            self.bwd[b].append(a)
            self.edge_kind[(a, b)] = kind

    # -- queries -----------------------------------------------------------

    @property
    def nv(self) -> int:
        return len(self.vertices)

    def back_edges(self) -> set[tuple[int, int]]:
        return {e for e, k in self.edge_kind.items() if k == BACK}

    def statement_vids(self) -> list[int]:
        return [v.vid for v in self.vertices if v.role not in (Role.ENTRY, Role.EXIT)]

    def loop_headers(self) -> list[int]:
        return sorted(self.loops)

    def loop_exit_targets(self, header: int) -> list[int]:
        return [t for t in self.fwd[header] if self.edge_kind[(header, t)] == LOOP_EXIT]

    def loop_by_end(self, end_vid: int) -> int:
        for hv, info in self.loops.items():
            if info.end == end_vid:
                return hv
        raise KeyError(end_vid)

    def enclosing_loops(self, vid: int) -> list[LoopInfo]:
        """Loops containing this vertex, innermost first."""
        out = []
        cur = self.vertices[vid].construct
        while cur is not None:
            if cur in self.loops:
                out.append(self.loops[cur])
            cur = self.vertices[cur].construct
        return out

    def enclosing_index_names(self, vid: int) -> set[str]:
        return {li.index for li in self.enclosing_loops(vid)}

    def max_depth(self) -> int:
        return max((v.depth for v in self.vertices), default=0)


def build_graph(program: Program) -> StmtGraph:
    """Lower a parsed program into its statement graph.

    Statement AST nodes are annotated in place with their vertex ids.
    """
    g = StmtGraph(program.name)
    g.entry = g._add_vertex(Role.ENTRY, None, "<entry>", 0, None)

    def lower_body(stmts: list[Stmt], depth: int, construct: Optional[int],
                   items: list) -> tuple[Optional[int], Optional[int]]:
        """Emit vertices/edges for a statement list.

        Returns (head vid, tail vid) of the chain, or (None, None) when
        the list is empty.  ``items`` receives the construct-tree entries.
        """
        head = None
        tail = None
        for s in stmts:
            h, t = lower_stmt(s, depth, construct, items)
            if head is None:
                head = h
            if tail is not None:
                g._connect(tail, h)
            tail = t
        return head, tail

    def lower_stmt(s: Stmt, depth: int, construct: Optional[int],
                   items: list) -> tuple[int, int]:
        if isinstance(s, (Assign, Print)):
            vid = g._add_vertex(Role.PLAIN, s, stmt_head_text(s), depth, construct)
            s.vid = vid
            items.append(vid)
            return vid, vid
        if isinstance(s, DoLoop):
            hv = g._add_vertex(Role.LOOP_HEADER, s, stmt_head_text(s), depth, construct)
            s.vid = hv
            node = ConstructNode("loop", hv)
            items.append(node)
            bh, bt = lower_body(s.body, depth + 1, hv, node.items)
            ev = g._add_vertex(Role.LOOP_END, s, "ENDDO", depth + 1, hv)
            s.end_vid = ev
            if bh is None:
                g._connect(hv, ev, LOOP_BODY)
            else:
                g._connect(hv, bh, LOOP_BODY)
                g._connect(bt, ev)
            g._connect(ev, hv, BACK)
            info = LoopInfo(hv, ev, s.index, s.lo, s.hi, s.step, depth=depth + 1)
            info.body = list(range(hv + 1, ev + 1))
            g.loops[hv] = info
            return hv, hv  # control continues from the header's exit edge
        if isinstance(s, IfThenElse):
            cv = g._add_vertex(Role.IF_COND, s, stmt_head_text(s), depth, construct)
            s.vid = cv
            node = ConstructNode("if", cv)
            items.append(node)
            th, tt = lower_body(s.then_body, depth, cv, node.then_items)
            else_vid = None
            eh = et = None
            if s.else_body is not None:
                else_vid = g._add_vertex(Role.IF_ELSE, s, "ELSE", depth, cv)
                s.else_vid = else_vid
                node.else_items = []
                eh, et = lower_body(s.else_body, depth, cv, node.else_items)
            ev = g._add_vertex(Role.IF_END, s, "ENDIF", depth, cv)
            s.end_vid = ev
            if th is None:
                g._connect(cv, ev, BR_TRUE)
            else:
                g._connect(cv, th, BR_TRUE)
                g._connect(tt, ev)
            if else_vid is not None:
                g._connect(cv, else_vid, BR_FALSE)
                if eh is None:
                    g._connect(else_vid, ev)
                else:
                    g._connect(else_vid, eh)
                    g._connect(et, ev)
            else:
                g._connect(cv, ev, BR_FALSE)
            info = IfInfo(cv, ev, else_vid)
            info.then_vids = list(range(cv + 1, (else_vid or ev)))
            info.else_vids = list(range(else_vid + 1, ev)) if else_vid else []
            g.ifs[cv] = info
            return cv, ev
        raise TypeError(s)

    head, tail = lower_body(program.statements, 0, None, g.tree.items)
    g.exit = g._add_vertex(Role.EXIT, None, "<exit>", 0, None)
    g._connect(g.entry, head if head is not None else g.exit)
    if tail is not None:
        g._connect(tail, g.exit)
    # Sequencing connected each loop header to the statement after the
    # loop with a plain edge; relabel those as the loops' exit edges.
    for hv in g.loops:
        for t in g.fwd[hv]:
            if g.edge_kind[(hv, t)] == SEQ:
                g.edge_kind[(hv, t)] = LOOP_EXIT
    return g


# ---------------------------------------------------------------------------
# Local usage facts.
# ---------------------------------------------------------------------------

@dataclass
class Usage:
    """Raw per-vertex data usage, before any propagation."""

    reads: list[VarRef] = field(default_factory=list)
    writes: list[VarRef] = field(default_factory=list)
    definite: list[VarRef] = field(default_factory=list)
    f_seed: list[VarRef] = field(default_factory=list)


def ref_of_elem(e: Elem) -> VarRef:
    le = linexpr_of(e.sub)
    if le is None:
        return VarRef.opaque(e.base)
    return VarRef.elem(e.base, le)


def _expr_reads(e, index_names: set[str]) -> list[VarRef]:
    """References read by evaluating ``e``.

    Array elements contribute the element itself plus the scalar names in
    their subscript, except enclosing loop indices (index traffic is
    accounted for at the loop level).
    """
    out: list[VarRef] = []
    seen: set[VarRef] = set()

    def add(r: VarRef) -> None:
        if r not in seen:
            seen.add(r)
            out.append(r)

    for node in walk_exprs(e):
        if isinstance(node, Var):
            if node.name not in index_names:
                add(VarRef.scalar(node.name))
        elif isinstance(node, Elem):
            add(ref_of_elem(node))
            for n in sorted(set(n for n in _sub_names(node)) - index_names):
                add(VarRef.scalar(n))
    return out


def _sub_names(node: Elem) -> set[str]:
    names: set[str] = set()
    for n in walk_exprs(node.sub):
        if isinstance(n, Var):
            names.add(n.name)
    return names


def seed_usage(g: StmtGraph) -> list[Usage]:
    """Local read/write facts for every vertex."""
    usage = [Usage() for _ in range(g.nv)]
    for v in g.vertices:
        u = usage[v.vid]
        idx_names = g.enclosing_index_names(v.vid)
        s = v.stmt
        if v.role == Role.PLAIN and isinstance(s, Assign):
            u.reads = _expr_reads(s.rhs, idx_names)
            if isinstance(s.target, Var):
                tref = VarRef.scalar(s.target.name)
            else:
                tref = ref_of_elem(s.target)
                for n in sorted(_sub_names(s.target) - idx_names):
                    extra = VarRef.scalar(n)
                    if extra not in u.reads:
                        u.reads.append(extra)
            u.writes = [tref]
            u.definite = [tref]
        elif v.role == Role.PLAIN and isinstance(s, Print):
            for a in s.args:
                for r in _expr_reads(a, idx_names):
                    if r not in u.reads:
                        u.reads.append(r)
            u.f_seed = list(u.reads)
            if STDOUT not in u.reads:
                u.reads.append(STDOUT)
            u.writes = [STDOUT]
            # The stream is appended to, never fully replaced: not a kill.
        elif v.role == Role.LOOP_HEADER:
            assert isinstance(s, DoLoop)
            for e in filter(None, (s.lo, s.hi, s.step)):
                for r in _expr_reads(e, idx_names):
                    if r not in u.reads:
                        u.reads.append(r)
            u.writes = [VarRef.scalar(s.index)]
            u.definite = [VarRef.scalar(s.index)]
        elif v.role == Role.IF_COND:
            assert isinstance(s, IfThenElse)
            u.reads = _expr_reads(s.cond.left, idx_names)
            for r in _expr_reads(s.cond.right, idx_names):
                if r not in u.reads:
                    u.reads.append(r)
    return usage
