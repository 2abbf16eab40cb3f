"""Seeded random program generator for property tests.

Emits grammar-valid structured source: loop nests up to depth 3, at most
~20 statements, subscripts restricted so that the standard input binding
(N in [1,8], scalars in [-4,4], arrays padded by 8 cells on both sides)
never leaves array bounds.
"""

from __future__ import annotations

import random

OFFSETS = ["K", "M"]          # never assigned: safe inside subscripts
ASSIGNED = ["T", "U", "S", "W"]
SCALARS = OFFSETS + ASSIGNED
ARRAYS = ["A", "B", "X", "Y"]
INDICES = ["I", "J", "L"]
RELOPS = ["<", "<=", ">", ">=", "==", "/="]


def gen_program(rng: random.Random, *, max_depth: int = 3, max_stmts: int = 20) -> str:
    budget = {"left": rng.randint(6, max_stmts)}

    def take() -> bool:
        if budget["left"] <= 0:
            return False
        budget["left"] -= 1
        return True

    def subscript(depth: int) -> str:
        idx = INDICES[depth - 1]
        roll = rng.random()
        if roll < 0.45:
            return idx
        if roll < 0.75:
            return f"{idx} + {rng.randint(0, 3)}"
        if roll < 0.85:
            return f"{idx} + {rng.choice(OFFSETS)}"
        if roll < 0.93:
            return str(rng.randint(1, 4))
        return f"{idx} * 2"  # exercises the non-unit-coefficient path

    def operand(depth: int) -> str:
        roll = rng.random()
        if depth > 0 and roll < 0.5:
            return f"{rng.choice(ARRAYS)}({subscript(depth)})"
        if roll < 0.75:
            return rng.choice(SCALARS)
        return str(rng.randint(-3, 4))

    def expr(depth: int) -> str:
        a = operand(depth)
        if rng.random() < 0.5:
            return a
        op = rng.choice(["+", "-", "*"])
        return f"{a} {op} {operand(depth)}"

    def condition(depth: int) -> str:
        left = operand(depth)
        return f"{left} {rng.choice(RELOPS)} {rng.randint(-2, 3)}"

    def statement(depth: int, lines: list[str], pad: str) -> None:
        roll = rng.random()
        if roll < 0.12 and depth < max_depth and budget["left"] > 2:
            loop(depth, lines, pad)
        elif roll < 0.24 and budget["left"] > 2:
            branch(depth, lines, pad)
        elif roll < 0.34 and depth > 0:
            z = rng.choice(ASSIGNED)
            op = rng.choice(["+", "-", "*"])
            lines.append(f"{pad}{z} = {z} {op} {operand(depth)}")
        elif roll < 0.42 and depth > 0:
            target = f"{rng.choice(ARRAYS)}({subscript(depth)})"
            lines.append(f"{pad}{target} = {expr(depth)}")
        elif roll < 0.5:
            lines.append(f"{pad}{rng.choice(ASSIGNED)} = {expr(depth)}")
        elif roll < 0.56 and depth == 0:
            lines.append(f"{pad}PRINT *, {rng.choice(SCALARS)}")
        elif depth > 0:
            target = f"{rng.choice(ARRAYS)}({subscript(depth)})"
            lines.append(f"{pad}{target} = {expr(depth)}")
        else:
            lines.append(f"{pad}{rng.choice(ASSIGNED)} = {expr(depth)}")

    def loop(depth: int, lines: list[str], pad: str) -> None:
        idx = INDICES[depth]
        if rng.random() < 0.8:
            header = f"DO {idx} = 1, N"
        else:
            lo = rng.randint(1, 2)
            header = f"DO {idx} = {lo}, {rng.randint(lo, 4)}"
        lines.append(pad + header)
        body_n = rng.randint(1, 3)
        for _ in range(body_n):
            if not take():
                break
            statement(depth + 1, lines, pad + "  ")
        lines.append(pad + "ENDDO")

    def branch(depth: int, lines: list[str], pad: str) -> None:
        lines.append(f"{pad}IF ({condition(depth)}) THEN")
        if take():
            statement(depth, lines, pad + "  ")
        if rng.random() < 0.5:
            lines.append(pad + "ELSE")
            if take():
                statement(depth, lines, pad + "  ")
        lines.append(pad + "ENDIF")

    lines: list[str] = []
    while take():
        statement(0, lines, "")
    return "\n".join(lines) + "\n"


def gen_inputs(rng: random.Random, pad: int = 10) -> dict:
    """Bind every name the generator can emit; arrays absorb all offsets."""
    n = rng.randint(1, 8)
    inputs: dict = {"N": n}
    for s in SCALARS + INDICES:
        inputs[s] = rng.randint(-4, 4)
    for a in ARRAYS:
        inputs[a] = {
            i: rng.randint(-4, 4) for i in range(1 - pad, max(n, 8) + pad + 1)
        }
    return inputs
