"""Lexer and recursive-descent parser for the mini-language.

Input is UTF-8 text, one statement per line; ``!`` starts a comment that
runs to the end of the line.  Keywords and identifiers are case-insensitive
(identifiers are normalized to upper case).  Relational operators are
``<  <=  >  >=  ==  /=``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

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

KEYWORDS = {"DO", "ENDDO", "IF", "THEN", "ELSE", "ENDIF", "PRINT"}

_TOKEN_RE = re.compile(
    r"""(?P<ws>[ \t\r]+)
      | (?P<comment>![^\n]*)
      | (?P<newline>\n)
      | (?P<num>\d+)
      | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
      | (?P<relop><=|>=|==|/=|<|>)
      | (?P<op>[-+*/(),=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str       # NUM IDENT RELOP OP NEWLINE EOF (IDENT keywords keep kind KW)
    text: str
    line: int
    col: int


class MiniSyntaxError(Exception):
    """Parse failure with a source position."""

    def __init__(self, message: str, line: int, col: int, program: str = "<input>"):
        super().__init__(f"{program}:{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.program = program


@dataclass(frozen=True)
class SourceProgram:
    text: str
    name: str = "<input>"


def tokenize(text: str, name: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise MiniSyntaxError(f"unexpected character {text[pos]!r}", line, col, name)
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "newline":
            tokens.append(Token("NEWLINE", "\n", line, col))
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(lexeme)
        else:
            if kind == "ident":
                up = lexeme.upper()
                tokens.append(Token("KW" if up in KEYWORDS else "IDENT", up, line, col))
            elif kind == "num":
                tokens.append(Token("NUM", lexeme, line, col))
            elif kind == "relop":
                tokens.append(Token("RELOP", lexeme, line, col))
            else:
                tokens.append(Token("OP", lexeme, line, col))
            col += len(lexeme)
        pos = m.end()
    tokens.append(Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], name: str):
        self.tokens = tokens
        self.pos = 0
        self.name = name

    # -- token plumbing --

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        raise MiniSyntaxError(message, tok.line, tok.col, self.name)

    def expect_op(self, text: str) -> Token:
        t = self.peek()
        if t.kind == "OP" and t.text == text:
            return self.next()
        self.error(f"expected {text!r}", t)

    def expect_kw(self, word: str) -> Token:
        t = self.peek()
        if t.kind == "KW" and t.text == word:
            return self.next()
        self.error(f"expected {word}", t)

    def expect_ident(self) -> Token:
        t = self.peek()
        if t.kind == "IDENT":
            return self.next()
        self.error("expected identifier", t)

    def skip_newlines(self) -> None:
        while self.peek().kind == "NEWLINE":
            self.next()

    def end_statement(self) -> None:
        t = self.peek()
        if t.kind in ("NEWLINE", "EOF"):
            self.skip_newlines()
            return
        self.error(f"unexpected {t.text!r} after statement", t)

    def at_kw(self, *words: str) -> bool:
        t = self.peek()
        return t.kind == "KW" and t.text in words

    # -- expressions --

    def parse_expr(self, in_subscript: bool = False) -> object:
        node = self.parse_term(in_subscript)
        while self.peek().kind == "OP" and self.peek().text in "+-":
            op = self.next().text
            node = Bin(op, node, self.parse_term(in_subscript))
        return node

    def parse_term(self, in_subscript: bool) -> object:
        node = self.parse_factor(in_subscript)
        while self.peek().kind == "OP" and self.peek().text in "*/":
            op = self.next().text
            node = Bin(op, node, self.parse_factor(in_subscript))
        return node

    def parse_factor(self, in_subscript: bool) -> object:
        t = self.peek()
        if t.kind == "OP" and t.text == "-":
            self.next()
            return Neg(self.parse_factor(in_subscript))
        if t.kind == "OP" and t.text == "(":
            self.next()
            node = self.parse_expr(in_subscript)
            self.expect_op(")")
            return node
        if t.kind == "NUM":
            self.next()
            return Num(int(t.text))
        if t.kind == "IDENT":
            self.next()
            if self.peek().kind == "OP" and self.peek().text == "(":
                if in_subscript:
                    self.error("array element not allowed inside a subscript", t)
                self.next()
                sub = self.parse_expr(in_subscript=True)
                self.expect_op(")")
                return Elem(t.text, sub)
            return Var(t.text)
        self.error("expected expression", t)

    def parse_cmp(self) -> Cmp:
        left = self.parse_expr()
        t = self.peek()
        if t.kind != "RELOP":
            self.error("expected comparison operator", t)
        self.next()
        right = self.parse_expr()
        return Cmp(t.text, left, right)

    # -- statements --

    def parse_body(self, until: tuple[str, ...], opener: Token, what: str) -> list[Stmt]:
        body: list[Stmt] = []
        while True:
            self.skip_newlines()
            t = self.peek()
            if t.kind == "EOF":
                self.error(
                    f"{what} starting at line {opener.line} is never closed "
                    f"(expected {' or '.join(until)})",
                    t,
                )
            if self.at_kw(*until):
                return body
            if self.at_kw("ENDDO", "ENDIF", "ELSE"):
                self.error(f"{t.text} without a matching opener", t)
            body.append(self.parse_statement())

    def parse_statement(self) -> Stmt:
        t = self.peek()
        if t.kind == "KW" and t.text == "DO":
            return self.parse_do()
        if t.kind == "KW" and t.text == "IF":
            return self.parse_if()
        if t.kind == "KW" and t.text == "PRINT":
            return self.parse_print()
        if t.kind == "IDENT":
            return self.parse_assign()
        self.error("expected a statement", t)

    def parse_do(self) -> DoLoop:
        opener = self.expect_kw("DO")
        index = self.expect_ident().text
        self.expect_op("=")
        lo = self.parse_expr()
        self.expect_op(",")
        hi = self.parse_expr()
        step = None
        if self.peek().kind == "OP" and self.peek().text == ",":
            self.next()
            step = self.parse_expr()
        self.end_statement()
        body = self.parse_body(("ENDDO",), opener, "DO loop")
        self.expect_kw("ENDDO")
        self.end_statement()
        return DoLoop(index, lo, hi, step, body, line=opener.line)

    def parse_if(self) -> IfThenElse:
        opener = self.expect_kw("IF")
        self.expect_op("(")
        cond = self.parse_cmp()
        self.expect_op(")")
        self.expect_kw("THEN")
        self.end_statement()
        then_body = self.parse_body(("ELSE", "ENDIF"), opener, "IF block")
        else_body = None
        if self.at_kw("ELSE"):
            self.next()
            self.end_statement()
            else_body = self.parse_body(("ENDIF",), opener, "IF block")
        self.expect_kw("ENDIF")
        self.end_statement()
        return IfThenElse(cond, then_body, else_body, line=opener.line)

    def parse_print(self) -> Print:
        opener = self.expect_kw("PRINT")
        if self.peek().kind == "OP" and self.peek().text == "*":
            self.next()
            self.expect_op(",")
        args = [self.parse_expr()]
        while self.peek().kind == "OP" and self.peek().text == ",":
            self.next()
            args.append(self.parse_expr())
        self.end_statement()
        return Print(args, line=opener.line)

    def parse_assign(self) -> Assign:
        t = self.expect_ident()
        target: object = Var(t.text)
        if self.peek().kind == "OP" and self.peek().text == "(":
            self.next()
            sub = self.parse_expr(in_subscript=True)
            self.expect_op(")")
            target = Elem(t.text, sub)
        self.expect_op("=")
        rhs = self.parse_expr()
        self.end_statement()
        return Assign(target, rhs, line=t.line)

    def parse_program(self, name: str) -> Program:
        stmts: list[Stmt] = []
        while True:
            self.skip_newlines()
            t = self.peek()
            if t.kind == "EOF":
                return Program(stmts, name)
            if self.at_kw("ENDDO", "ENDIF", "ELSE"):
                self.error(f"{t.text} without a matching opener", t)
            stmts.append(self.parse_statement())


def parse_program(src) -> Program:
    """Parse source text (str or SourceProgram) into a Program."""
    if isinstance(src, SourceProgram):
        text, name = src.text, src.name
    else:
        text, name = src, "<input>"
    tokens = tokenize(text, name)
    return _Parser(tokens, name).parse_program(name)
