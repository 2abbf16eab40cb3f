"""Abstract syntax for the mini-language.

Statements: assignment, counted DO loop, block IF/THEN/ELSE, PRINT.
Expressions: integer constants, scalars, single-subscript array elements,
unary minus and the four integer operators.  Keywords and identifiers are
case-insensitive; identifiers are normalized to upper case at parse time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .refs import LinExpr


# --- expressions -----------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Elem:
    base: str
    sub: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str  # + - * /
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Var, Elem, Neg, Bin]


@dataclass(frozen=True)
class Cmp:
    op: str  # < <= > >= == /=
    left: Expr
    right: Expr


# --- statements ------------------------------------------------------------

@dataclass
class Assign:
    target: Union[Var, Elem]
    rhs: Expr
    line: int = field(default=0, compare=False)
    vid: Optional[int] = field(default=None, compare=False)


@dataclass
class DoLoop:
    index: str
    lo: Expr
    hi: Expr
    step: Optional[Expr]
    body: list["Stmt"]
    line: int = field(default=0, compare=False)
    vid: Optional[int] = field(default=None, compare=False)
    end_vid: Optional[int] = field(default=None, compare=False)


@dataclass
class IfThenElse:
    cond: Cmp
    then_body: list["Stmt"]
    else_body: Optional[list["Stmt"]]  # None: no ELSE arm at all
    line: int = field(default=0, compare=False)
    vid: Optional[int] = field(default=None, compare=False)
    else_vid: Optional[int] = field(default=None, compare=False)
    end_vid: Optional[int] = field(default=None, compare=False)


@dataclass
class Print:
    args: list[Expr]
    line: int = field(default=0, compare=False)
    vid: Optional[int] = field(default=None, compare=False)


Stmt = Union[Assign, DoLoop, IfThenElse, Print]


@dataclass
class Program:
    statements: list[Stmt]
    name: str = "<input>"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Program) and self.statements == other.statements


# --- pretty printing -------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def expr_text(e: Expr, prec: int = 0) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Elem):
        return f"{e.base}({expr_text(e.sub)})"
    if isinstance(e, Neg):
        inner = expr_text(e.operand, 3)
        s = f"-{inner}"
        return f"({s})" if prec >= 2 else s
    if isinstance(e, Bin):
        p = _PREC[e.op]
        s = f"{expr_text(e.left, p)} {e.op} {expr_text(e.right, p + 1)}"
        return f"({s})" if p < prec else s
    raise TypeError(e)


def cmp_text(c: Cmp) -> str:
    return f"{expr_text(c.left)} {c.op} {expr_text(c.right)}"


def stmt_head_text(s: Stmt) -> str:
    """One-line header text for the statement (loop/if bodies excluded)."""
    if isinstance(s, Assign):
        return f"{expr_text(s.target)} = {expr_text(s.rhs)}"
    if isinstance(s, DoLoop):
        t = f"DO {s.index} = {expr_text(s.lo)}, {expr_text(s.hi)}"
        if s.step is not None:
            t += f", {expr_text(s.step)}"
        return t
    if isinstance(s, IfThenElse):
        return f"IF ({cmp_text(s.cond)}) THEN"
    if isinstance(s, Print):
        return "PRINT *, " + ", ".join(expr_text(a) for a in s.args)
    raise TypeError(s)


def pretty(program: Program) -> str:
    lines: list[str] = []

    def emit(stmts: list[Stmt], depth: int) -> None:
        pad = "  " * depth
        for s in stmts:
            lines.append(pad + stmt_head_text(s))
            if isinstance(s, DoLoop):
                emit(s.body, depth + 1)
                lines.append(pad + "ENDDO")
            elif isinstance(s, IfThenElse):
                emit(s.then_body, depth + 1)
                if s.else_body is not None:
                    lines.append(pad + "ELSE")
                    emit(s.else_body, depth + 1)
                lines.append(pad + "ENDIF")

    emit(program.statements, 0)
    return "\n".join(lines) + ("\n" if lines else "")


# --- expression analysis ---------------------------------------------------

def linexpr_of(e: Expr) -> Optional[LinExpr]:
    """Integer-linear view of an expression, or None when nonlinear."""
    if isinstance(e, Num):
        return LinExpr.of_const(e.value)
    if isinstance(e, Var):
        return LinExpr.of_name(e.name)
    if isinstance(e, Neg):
        inner = linexpr_of(e.operand)
        return None if inner is None else -inner
    if isinstance(e, Bin):
        left = linexpr_of(e.left)
        right = linexpr_of(e.right)
        if left is None or right is None:
            return None
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            if left.is_const():
                return right.scaled(left.const)
            if right.is_const():
                return left.scaled(right.const)
            return None
        return None  # division is never treated as linear
    return None  # Elem


def walk_exprs(e: Expr):
    """Yield every node of an expression tree, preorder."""
    yield e
    if isinstance(e, Neg):
        yield from walk_exprs(e.operand)
    elif isinstance(e, Bin):
        yield from walk_exprs(e.left)
        yield from walk_exprs(e.right)
    elif isinstance(e, Elem):
        yield from walk_exprs(e.sub)


def scalar_names(e: Expr) -> set[str]:
    """All scalar names an expression mentions (subscripts included)."""
    return {n.name for n in walk_exprs(e) if isinstance(n, Var)}


def array_bases(e: Expr) -> set[str]:
    return {n.base for n in walk_exprs(e) if isinstance(n, Elem)}


def iter_stmts(stmts: list[Stmt]):
    """Yield every statement, loop and branch bodies included, preorder."""
    for s in stmts:
        yield s
        if isinstance(s, DoLoop):
            yield from iter_stmts(s.body)
        elif isinstance(s, IfThenElse):
            yield from iter_stmts(s.then_body)
            if s.else_body is not None:
                yield from iter_stmts(s.else_body)
