"""Recursive-descent parser for the expression text grammar.

Grammar (EBNF)::

    expr     = term { ("+" | "-") term } ;
    term     = unary { ("*" | "/") unary } ;
    unary    = ("+" | "-") unary | power ;
    power    = primary [ "^" exponent ] ;
    exponent = ["-"] integer | "(" ["-"] integer ")" ;
    primary  = number | identifier | func "(" expr ")" | "(" expr ")" ;
    func     = "sqrt" | "sin" | "cos" ;
    number   = digit { digit } [ "." { digit } ] ;
    identifier = "x1" | "x2" | "m" | { "d" } ( "u1" | "u2" ) ;

``u1, u2`` are velocity components, each leading ``d`` is one more
parameter derivative (``du1`` is u-dot, ``ddu1`` is u-double-dot).
Numbers are read exactly (``0.1`` is the rational 1/10).  ``-a^2`` means
``-(a^2)``.  Whitespace is ignored.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .algebra import (
    MAX_JET_LEVEL,
    Expression,
    JetVariable,
    Parameter,
    cos,
    sin,
    sqrt,
)

_FUNCS = {"sqrt": sqrt, "sin": sin, "cos": cos}
_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")
_IDENT = re.compile(r"^(?:x([12])|(d*)u([12]))$")

M = Parameter("m")


class ExpressionSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnknownIdentifier(ExpressionSyntaxError):
    pass


def identifier_atom(name: str):
    """Map a grammar identifier to its JetVariable or Parameter; raise on unknown names."""
    if name == "m":
        return M
    match = _IDENT.match(name)
    if match is None:
        raise UnknownIdentifier(f"unknown identifier {name!r}", 0, name)
    if match.group(1):
        return JetVariable(-1, int(match.group(1)))
    level = len(match.group(2))
    if level > MAX_JET_LEVEL:
        raise UnknownIdentifier(f"identifier {name!r} exceeds jet level {MAX_JET_LEVEL}", 0, name)
    return JetVariable(level, int(match.group(3)))


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:  # only trailing whitespace left
            break
        start = match.start(match.lastindex)
        kind = ("num", "ident", "op")[match.lastindex - 1]
        tokens.append((kind, match.group(match.lastindex), start))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value or kind != "op":
            raise ExpressionSyntaxError(f"expected {value!r}, found {val or 'end of input'!r}", pos, self.text)

    def error(self, msg):
        _, val, pos = self.peek()
        raise ExpressionSyntaxError(f"{msg}, found {val or 'end of input'!r}", pos, self.text)

    def parse(self) -> Expression:
        e = self.expr()
        if self.peek()[0] != "end":
            self.error("unexpected token")
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "*":
                e = e * rhs
            else:
                if rhs.is_zero_canonical():
                    raise ExpressionSyntaxError("division by zero", pos, self.text)
                e = e / rhs
        return e

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in ("+", "-"):
            self.take()
            e = self.unary()
            return -e if val == "-" else e
        return self.power()

    def power(self):
        base = self.primary()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            n = self.exponent()
            if n < 0 and base.is_zero_canonical():
                raise ExpressionSyntaxError("zero raised to a negative power", pos, self.text)
            return base ** n
        return base

    def exponent(self) -> int:
        paren = False
        if self.peek()[1] == "(":
            self.take()
            paren = True
        sign = 1
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        kind, val, pos = self.take()
        if kind != "num" or not val.isdigit():
            raise ExpressionSyntaxError("exponent must be an integer", pos, self.text)
        if paren:
            self.expect(")")
        return sign * int(val)

    def primary(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Expression.constant(Fraction(val))
        if kind == "ident":
            if val in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _FUNCS[val](arg)
            try:
                return Expression.variable(identifier_atom(val))
            except UnknownIdentifier as exc:
                raise UnknownIdentifier(str(exc.args[0]).split(" at position")[0], pos, self.text) from None
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ExpressionSyntaxError(f"unexpected {val or 'end of input'!r}", pos, self.text)


def parse(text: str) -> Expression:
    """Parse ``text`` into a canonical Expression."""
    return _Parser(text).parse()
