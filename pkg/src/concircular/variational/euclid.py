"""Euclidean-chart building blocks (g = identity) for symbolic work."""

from __future__ import annotations

from ..conventions import eps
from ..expr import MASS, U, X, Expression, sqrt

IDX = (1, 2)


def u(level: int = 0) -> tuple[Expression, Expression]:
    return (U(1, level), U(2, level))


def x() -> tuple[Expression, Expression]:
    return (X(1), X(2))


def dot(a, b) -> Expression:
    return a[0] * b[0] + a[1] * b[1]


def cross(a, b) -> Expression:
    """eps_ij a^i b^j."""
    return sum((a[i - 1] * b[j - 1] * eps(i, j) for i in IDX for j in IDX if eps(i, j)), Expression.constant(0))


def speed() -> Expression:
    return sqrt(dot(u(), u()))


def signed_curvature() -> Expression:
    """L_II = eps_ij u^i du^j / |u|^3."""
    return cross(u(), u(1)) / speed() ** 3


def curvature() -> Expression:
    """Unsigned Frenet curvature k = |u ^ du| / |u|^3."""
    c = cross(u(), u(1))
    return sqrt(c * c) / speed() ** 3


def length(m: Expression = MASS) -> Expression:
    return -m * speed()


def lagrangian(m: Expression = MASS) -> Expression:
    """L = eps_ij u^i du^j/|u|^3 - m|u|."""
    return signed_curvature() + length(m)


def theorem_source(m: Expression = MASS) -> tuple[Expression, Expression]:
    """E_i = eps_ij ddu^j/|u|^3 - 3 (du.u)/|u|^5 eps_ij du^j + m(|u|^2 du_i - (du.u) u_i)/|u|^3."""
    uu, du, ddu = u(), u(1), u(2)
    r = speed()
    out = []
    for i in IDX:
        e = Expression.constant(0)
        for j in IDX:
            if eps(i, j):
                e = e + eps(i, j) * (ddu[j - 1] / r ** 3 - 3 * dot(du, uu) / r ** 5 * du[j - 1])
        e = e + m * (dot(uu, uu) * du[i - 1] - dot(du, uu) * uu[i - 1]) / r ** 3
        out.append(e)
    return tuple(out)
