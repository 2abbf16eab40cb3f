"""Reference interpreter and brute-force oracles used by the test suite.

The interpreter executes programs sequentially with exact integer
arithmetic, logging every memory touch.  Dynamic loop-carried flow
dependences extracted from a trace are the ground truth that static
verdicts are judged against.  A classic round-robin liveness solver and an
iteration-reordering harness provide independent checks for the F sets and
for recognized reductions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .graph import StmtGraph
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
    Program,
    Stmt,
    Var,
)
from .refs import VarRef

Frames = tuple[tuple[int, int], ...]   # (loop header vid, trip number) stack
Cell = tuple                            # ("S",) scalar | ("Y", 7) array cell


@dataclass(frozen=True)
class Event:
    seq: int
    vid: int
    frames: Frames
    cell: Cell
    kind: str          # "r" | "w"
    value: int


@dataclass
class RunResult:
    outputs: list[tuple[int, ...]]
    scalars: dict[str, int]
    arrays: dict[str, dict[int, int]]
    trace: list[Event]


class OutOfBounds(Exception):
    def __init__(self, name: str, index: int, vid: Optional[int] = None):
        super().__init__(f"subscript {name}({index}) outside the provided array")
        self.name = name
        self.index = index
        self.vid = vid


class UnboundVariable(Exception):
    def __init__(self, name: str):
        super().__init__(f"variable {name} is not bound by the inputs")
        self.name = name


class InvalidStep(Exception):
    pass


def _as_array(value) -> dict[int, int]:
    if isinstance(value, dict):
        return {int(k): int(v) for k, v in value.items()}
    return {i + 1: int(v) for i, v in enumerate(value)}


OrderFn = Callable[[int], Sequence[int]]


def interpret(
    program: Program,
    inputs: dict,
    *,
    loop_orders: Optional[dict[int, OrderFn]] = None,
    collect_trace: bool = True,
    max_steps: int = 2_000_000,
) -> RunResult:
    """Big-step sequential execution with a full memory trace.

    ``inputs`` binds scalars to ints and arrays to lists (1-based) or
    ``{index: value}`` dicts.  Statement vertices must have been assigned
    (``build_graph`` annotates the AST), so trace events carry vertex ids.
    ``loop_orders`` optionally remaps the trip order of chosen loops.
    """
    scalars: dict[str, int] = {}
    arrays: dict[str, dict[int, int]] = {}
    for name, value in inputs.items():
        if isinstance(value, (list, tuple, dict)):
            arrays[name.upper()] = _as_array(value)
        else:
            scalars[name.upper()] = int(value)
    outputs: list[tuple[int, ...]] = []
    trace: list[Event] = []
    frames: list[tuple[int, int]] = []
    state = {"seq": 0, "steps": 0}

    def log(vid: int, cell: Cell, kind: str, value: int) -> None:
        if collect_trace:
            trace.append(Event(state["seq"], vid, tuple(frames), cell, kind, value))
        state["seq"] += 1

    def tick() -> None:
        state["steps"] += 1
        if state["steps"] > max_steps:
            raise RuntimeError("interpreter step budget exceeded")

    def read_scalar(name: str, vid: int) -> int:
        if name not in scalars:
            raise UnboundVariable(name)
        v = scalars[name]
        log(vid, (name,), "r", v)
        return v

    def read_cell(base: str, idx: int, vid: int) -> int:
        arr = arrays.get(base)
        if arr is None:
            raise UnboundVariable(base)
        if idx not in arr:
            raise OutOfBounds(base, idx, vid)
        v = arr[idx]
        log(vid, (base, idx), "r", v)
        return v

    def write_scalar(name: str, value: int, vid: int) -> None:
        scalars[name] = value
        log(vid, (name,), "w", value)

    def write_cell(base: str, idx: int, value: int, vid: int) -> None:
        arr = arrays.get(base)
        if arr is None:
            raise UnboundVariable(base)
        if idx not in arr:
            raise OutOfBounds(base, idx, vid)
        arr[idx] = value
        log(vid, (base, idx), "w", value)

    def eval_expr(e, vid: int) -> int:
        tick()
        if isinstance(e, Num):
            return e.value
        if isinstance(e, Var):
            return read_scalar(e.name, vid)
        if isinstance(e, Elem):
            idx = eval_expr(e.sub, vid)
            return read_cell(e.base, idx, vid)
        if isinstance(e, Neg):
            return -eval_expr(e.operand, vid)
        if isinstance(e, Bin):
            a = eval_expr(e.left, vid)
            b = eval_expr(e.right, vid)
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
            if b == 0:
                raise ZeroDivisionError(f"division by zero at v{vid}")
            q = abs(a) // abs(b)          # truncate toward zero
            return q if (a >= 0) == (b >= 0) else -q
        raise TypeError(e)

    def eval_cmp(c: Cmp, vid: int) -> bool:
        a = eval_expr(c.left, vid)
        b = eval_expr(c.right, vid)
        return {
            "<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b,
            "==": a == b, "/=": a != b,
        }[c.op]

    def exec_body(stmts: list[Stmt]) -> None:
        for s in stmts:
            exec_stmt(s)

    def exec_stmt(s: Stmt) -> None:
        tick()
        vid = s.vid if s.vid is not None else -1
        if isinstance(s, Assign):
            value = eval_expr(s.rhs, vid)
            if isinstance(s.target, Var):
                write_scalar(s.target.name, value, vid)
            else:
                idx = eval_expr(s.target.sub, vid)
                write_cell(s.target.base, idx, value, vid)
        elif isinstance(s, Print):
            values = tuple(eval_expr(a, vid) for a in s.args)
            # Appending to the stream reads its prior state.
            log(vid, ("STDOUT",), "r", len(outputs))
            outputs.append(values)
            log(vid, ("STDOUT",), "w", len(outputs))
        elif isinstance(s, IfThenElse):
            if eval_cmp(s.cond, vid):
                exec_body(s.then_body)
            elif s.else_body is not None:
                exec_body(s.else_body)
        elif isinstance(s, DoLoop):
            lo = eval_expr(s.lo, vid)
            hi = eval_expr(s.hi, vid)
            step = eval_expr(s.step, vid) if s.step is not None else 1
            if step == 0:
                raise InvalidStep(f"zero loop step at v{vid}")
            trips = max(0, (hi - lo) // step + 1)
            order: Sequence[int] = range(trips)
            if loop_orders and vid in loop_orders:
                order = loop_orders[vid](trips)
            for trip in order:
                # The index update belongs to the iteration it starts.
                frames.append((vid, trip))
                write_scalar(s.index, lo + trip * step, vid)
                exec_body(s.body)
                frames.pop()
            write_scalar(s.index, lo + trips * step, vid)
        else:
            raise TypeError(s)

    exec_body(program.statements)
    return RunResult(outputs, scalars, arrays, trace)


# ---------------------------------------------------------------------------
# Dynamic loop-carried flow dependences.
# ---------------------------------------------------------------------------

def dynamic_flow_deps(
    trace: list[Event],
    header_vid: int,
    *,
    exclude_scalars: frozenset[str] = frozenset(),
) -> list[tuple[Event, Event]]:
    """(write, read) pairs crossing iterations of the given loop.

    A pair qualifies when both events run under the same activation of the
    loop, the read's trip is later than the write's, they touch the same
    cell, and no other write to that cell happened in between.
    """
    last_write: dict[tuple[Frames, Cell], Event] = {}
    pairs: list[tuple[Event, Event]] = []
    for ev in trace:
        frame_idx = next(
            (k for k, fr in enumerate(ev.frames) if fr[0] == header_vid), None
        )
        if frame_idx is None:
            continue
        activation = ev.frames[:frame_idx]
        trip = ev.frames[frame_idx][1]
        key = (activation, ev.cell)
        if ev.kind == "w":
            last_write[key] = ev
            continue
        prev = last_write.get(key)
        if prev is None:
            continue
        prev_trip = next(fr for fr in prev.frames if fr[0] == header_vid)[1]
        if prev_trip < trip:
            if len(ev.cell) == 1 and ev.cell[0] in exclude_scalars:
                continue
            pairs.append((prev, ev))
    return pairs


# ---------------------------------------------------------------------------
# Independent liveness solver.
# ---------------------------------------------------------------------------

def liveness_oracle(
    g: StmtGraph,
    use: list[set[VarRef]],
    defs: list[set[VarRef]],
    f_seed: list[set[VarRef]],
) -> list[set[VarRef]]:
    """Round-robin live-out computation: iterate full sweeps until stable."""
    live_out: list[set[VarRef]] = [set(f_seed[v]) for v in range(g.nv)]
    changed = True
    while changed:
        changed = False
        for v in range(g.nv - 1, -1, -1):
            acc = set(f_seed[v])
            for s in g.fwd[v]:
                acc |= use[s] | (live_out[s] - defs[s])
            if acc != live_out[v]:
                live_out[v] = acc
                changed = True
    return live_out


# ---------------------------------------------------------------------------
# Reduction reorder harness.
# ---------------------------------------------------------------------------

def reduction_reorder_check(
    program: Program,
    header_vid: int,
    inputs: dict,
    red_vars: set[str],
    *,
    trials: int = 50,
    seed: int = 0,
) -> bool:
    """Do the reduction results survive arbitrary iteration orders?

    Runs the program with the chosen loop's iterations in source order,
    reversed, and ``trials`` random permutations; passes iff every named
    variable ends with identical values across all runs (exact integers).
    """
    rng = random.Random(seed)

    def run(order_fn: Optional[OrderFn]) -> dict[str, int]:
        orders = {header_vid: order_fn} if order_fn else None
        result = interpret(program, inputs, loop_orders=orders, collect_trace=False)
        return {z: result.scalars.get(z) for z in red_vars}

    baseline = run(None)
    if run(lambda trips: list(reversed(range(trips)))) != baseline:
        return False
    for _ in range(trials):
        def shuffled(trips: int, _rng=rng) -> list[int]:
            order = list(range(trips))
            _rng.shuffle(order)
            return order

        if run(shuffled) != baseline:
            return False
    return True
