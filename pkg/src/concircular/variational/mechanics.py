"""Parametric homogeneity: fundamental fields, Zermelo conditions, momenta, Hamiltonian."""

from __future__ import annotations

from dataclasses import dataclass

from ..expr import ZERO, Expression, JetVariable, U, ZeroDecision, as_expression, is_zero
from .forms import total_derivative

IDX = (1, 2)


class RouteDisagreement(RuntimeError):
    """The two Hamiltonian constructions differ: an engine bug, never expected."""


def _require_first_order(L: Expression):
    if L.jet_order() > 1:
        raise ValueError(f"Lagrangian must depend on at most du (jet order 1), got order {L.jet_order()}")


def zeta1(F) -> Expression:
    """u^i d/du^i + 2 du^i d/ddu^i."""
    F = as_expression(F)
    return sum((U(i) * F.diff(JetVariable(0, i)) + 2 * U(i, 1) * F.diff(JetVariable(1, i)) for i in IDX), ZERO)


def zeta2(F) -> Expression:
    """u^i d/ddu^i."""
    F = as_expression(F)
    return sum((U(i) * F.diff(JetVariable(1, i)) for i in IDX), ZERO)


@dataclass(frozen=True)
class ZermeloReport:
    passes_3: bool
    passes_4: bool
    zeta1: Expression
    zeta2: Expression

    @property
    def passes(self) -> bool:
        return self.passes_3 or self.passes_4


def zermelo_check(L) -> ZermeloReport:
    """passes_3: zeta1 L = zeta2 L = 0.  passes_4: zeta1 L = L and zeta2 L = 0."""
    L = as_expression(L)
    _require_first_order(L)
    z1, z2 = zeta1(L), zeta2(L)
    z2_zero = is_zero(z2).value
    return ZermeloReport(
        passes_3=z2_zero and is_zero(z1).value,
        passes_4=z2_zero and is_zero(z1 - L).value,
        zeta1=z1,
        zeta2=z2,
    )


def momenta(L) -> tuple[tuple[Expression, Expression], tuple[Expression, Expression]]:
    """(p2, p1) with p2_i = dL/ddu^i and p1_i = dL/du^i - d_T p2_i."""
    L = as_expression(L)
    _require_first_order(L)
    p2 = tuple(L.diff(JetVariable(1, i)) for i in IDX)
    p1 = tuple(L.diff(JetVariable(0, i)) - total_derivative(p2[i - 1]) for i in IDX)
    return p2, p1


def hamiltonian_from_momenta(L) -> Expression:
    p2, p1 = momenta(L)
    return sum((p2[i - 1] * U(i, 1) + p1[i - 1] * U(i) for i in IDX), ZERO) - L


def hamiltonian_from_fields(L) -> Expression:
    """H = zeta1 L - d_T(zeta2 L) - L.

    Expanding the momenta gives p2.du + p1.u = zeta1 L - d_T(u^i dL/ddu^i), hence
    the minus sign; with zeta2 L = 0 (every parameter-invariant case) the term drops.
    """
    L = as_expression(L)
    _require_first_order(L)
    return zeta1(L) - total_derivative(zeta2(L)) - L


def hamiltonian(L, check: bool = True) -> Expression:
    """Hamiltonian by the fundamental-field formula, cross-checked against the momenta route."""
    L = as_expression(L)
    H = hamiltonian_from_fields(L)
    if check:
        diff = H - hamiltonian_from_momenta(L)
        decision: ZeroDecision = is_zero(diff)
        if not decision:
            raise RouteDisagreement(f"Hamiltonian routes differ (residual {decision.max_residual:g})")
    return H
