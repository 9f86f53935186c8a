from .algebra import (
    MAX_JET_LEVEL,
    ONE,
    ZERO,
    Expression,
    JetOrderError,
    JetVariable,
    MissingAssignment,
    NegativeRadicand,
    Parameter,
    as_expression,
    compile_many,
    cos,
    sin,
    sqrt,
)
from .parser import M, ExpressionSyntaxError, UnknownIdentifier, identifier_atom, parse
from .zero import ZeroDecision, is_zero, probe_points, probe_residual, probe_seed


def partial(e, v):
    """Partial derivative of ``e`` by ``v`` (a JetVariable, Parameter or identifier name)."""
    if isinstance(v, str):
        v = identifier_atom(v)
    return e.diff(v)


def evaluate(e, point):
    return e.evaluate(point)


def X(i: int) -> Expression:
    return Expression.variable(JetVariable(-1, i))


def U(i: int, level: int = 0) -> Expression:
    return Expression.variable(JetVariable(level, i))


def var(name: str) -> Expression:
    return Expression.variable(identifier_atom(name))


MASS = Expression.variable(M)

__all__ = [
    "MAX_JET_LEVEL", "ONE", "ZERO", "Expression", "JetOrderError", "JetVariable", "MissingAssignment",
    "NegativeRadicand", "Parameter", "as_expression", "compile_many", "cos", "sin", "sqrt", "M", "MASS",
    "ExpressionSyntaxError", "UnknownIdentifier", "identifier_atom", "parse", "ZeroDecision", "is_zero",
    "probe_points", "probe_residual", "probe_seed", "partial", "evaluate", "X", "U", "var",
]
