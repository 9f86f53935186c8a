"""Euler-Poisson coefficient pattern and the generalized Helmholtz conditions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product

from ..expr import ZERO, Expression, JetVariable, U, is_zero
from .forms import SourceForm

IDX = (1, 2)
HALF = Fraction(1, 2)


def xv(i):
    return JetVariable(-1, i)


def uv(i, level=0):
    return JetVariable(level, i)


@dataclass(frozen=True)
class EulerPoissonCoefficients:
    """(A, B, q) with E_i = A_ij ddu^j + (du.d_u A_ij) du^j + B_ij du^j + q_i.

    A and B are 2x2 tuples of Expressions, q a 2-tuple; all in (x, u) only.
    """

    A: tuple
    B: tuple
    q: tuple

    def a(self, i, j) -> Expression:
        return self.A[i - 1][j - 1]

    def b(self, i, j) -> Expression:
        return self.B[i - 1][j - 1]

    def qq(self, i) -> Expression:
        return self.q[i - 1]

    def reassemble(self) -> SourceForm:
        out = []
        for i in IDX:
            e = self.qq(i)
            for j in IDX:
                dA = sum((U(p, 1) * self.a(i, j).diff(uv(p)) for p in IDX), ZERO)
                e = e + self.a(i, j) * U(j, 2) + dA * U(j, 1) + self.b(i, j) * U(j, 1)
            out.append(e)
        return SourceForm(tuple(out))

    def with_B(self, fn) -> "EulerPoissonCoefficients":
        return EulerPoissonCoefficients(self.A, tuple(tuple(fn(i, j, self.b(i, j)) for j in IDX) for i in IDX), self.q)


@dataclass
class PatternReport:
    conformant: bool
    nonlinear_in_acceleration: bool = False
    residual_nonzero: bool = False
    A_not_antisymmetric: bool = False
    higher_order: bool = False
    messages: list = field(default_factory=list)


def extract_coefficients(eps: SourceForm) -> tuple[EulerPoissonCoefficients, PatternReport]:
    report = PatternReport(True)
    if eps.jet_order() > 2:
        report.higher_order = True
        report.messages.append(f"jet order {eps.jet_order()} exceeds 2")
    acc = [uv(j, 2) for j in IDX]
    vel = [uv(j, 1) for j in IDX]
    A = []
    for i in IDX:
        row = []
        for j in IDX:
            a = eps[i - 1].diff(acc[j - 1])
            if a.jet_order() >= 1:
                report.nonlinear_in_acceleration = a.jet_order() >= 2 or report.nonlinear_in_acceleration
                report.messages.append(f"A_{i}{j} depends on derivatives of u")
            row.append(a)
        A.append(tuple(row))
    zero_acc = {v: 0 for v in acc}
    zero_vel = {v: 0 for v in vel}
    rest = [eps[i - 1].subs(zero_acc) for i in IDX]
    q = tuple(r.subs(zero_vel) for r in rest)
    B = tuple(tuple(rest[i - 1].diff(vel[j - 1]).subs(zero_vel) for j in IDX) for i in IDX)
    # second u-dot derivatives of B must vanish for the pattern; residual catches it
    c = EulerPoissonCoefficients(tuple(A), B, q)
    if report.nonlinear_in_acceleration:
        report.messages.append("source form is nonlinear in the acceleration")
    else:
        back = c.reassemble()
        for i in IDX:
            if not is_zero(eps[i - 1] - back[i - 1]):
                report.residual_nonzero = True
                report.messages.append(f"pattern residual of E_{i} is not zero")
    for i, j in ((1, 1), (1, 2), (2, 2)):
        if not is_zero(c.a(i, j) + c.a(j, i)):
            report.A_not_antisymmetric = True
            report.messages.append(f"A_{i}{j} + A_{j}{i} is not zero")
    report.conformant = not (report.nonlinear_in_acceleration or report.residual_nonzero
                             or report.A_not_antisymmetric or report.higher_order)
    return c, report


# ---------------------------------------------------------------------------
# Helmholtz conditions


def D1(f: Expression) -> Expression:
    """u^p d/dx^p."""
    return sum((U(p) * f.diff(xv(p)) for p in IDX), ZERO)


def _alt2(fn, i, j) -> Expression:
    return (fn(i, j) - fn(j, i)) * HALF


def _sym2(fn, i, j) -> Expression:
    return (fn(i, j) + fn(j, i)) * HALF


def _perm_sign(p) -> int:
    sign = 1
    p = list(p)
    for a in range(len(p)):
        for b in range(a + 1, len(p)):
            if p[a] > p[b]:
                sign = -sign
    return sign


def _alt3(fn, i, j, l) -> Expression:
    idx = (i, j, l)
    total = ZERO
    for p in permutations(range(3)):
        total = total + fn(*(idx[k] for k in p)) * _perm_sign(p)
    return total * Fraction(1, 6)


HELMHOLTZ_NAMES = ("A-skew", "a", "b", "c", "d", "e")


def helmholtz_residuals(c: EulerPoissonCoefficients) -> dict:
    """Component residuals of the six conditions, keyed by name then index tuple."""
    A, B, q = c.a, c.b, c.qq

    def du(f, i):
        return f.diff(uv(i))

    def dx(f, i):
        return f.diff(xv(i))

    out = {name: {} for name in HELMHOLTZ_NAMES}
    for i, j, l in product(IDX, repeat=3):
        out["A-skew"][(i, j, l)] = _alt3(lambda a, b, cc: du(A(b, cc), a), i, j, l)
        out["b"][(i, j, l)] = (2 * _alt2(lambda a, b: du(B(b, l), a), i, j)
                               - 4 * _alt2(lambda a, b: dx(A(b, l), a), i, j)
                               + dx(A(i, j), l)
                               + 2 * D1(du(A(i, j), l)))
        out["d"][(i, j, l)] = (2 * du(_alt2(lambda a, b: du(q(b), a), i, j), l)
                               - 4 * _alt2(lambda a, b: dx(B(b, l), a), i, j)
                               + D1(D1(du(A(i, j), l)))
                               + 6 * D1(_alt3(lambda a, b, cc: dx(A(b, cc), a), i, j, l)))
    for i, j in product(IDX, repeat=2):
        out["a"][(i, j)] = 2 * _alt2(B, i, j) - 3 * D1(A(i, j))
        out["c"][(i, j)] = _sym2(lambda a, b: du(q(b), a), i, j) - D1(_sym2(B, i, j))
        out["e"][(i, j)] = (4 * _alt2(lambda a, b: dx(q(b), a), i, j)
                            - 2 * D1(_alt2(lambda a, b: du(q(b), a), i, j))
                            - D1(D1(D1(A(i, j)))))
    return out
