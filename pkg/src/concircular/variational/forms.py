"""Differential forms on the jet chart and Tulczyjew's operators d_T, i_r, delta."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping

from ..expr import ZERO, Expression, JetVariable, as_expression

Basis = tuple  # strictly increasing tuple of JetVariable (by sort_key)


def _sort_with_sign(items: Iterable[JetVariable]) -> tuple[int, Basis]:
    """Sort basis 1-forms; return (sign of permutation, sorted tuple), sign 0 on repeats."""
    items = list(items)
    sign = 1
    # insertion sort counting transpositions
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1].sort_key > items[j].sort_key:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(items, items[1:]):
        if a == b:
            return 0, ()
    return sign, tuple(items)


def _accumulate(out: dict, basis: Basis, coef: Expression):
    if coef.is_zero_canonical():
        return
    prev = out.get(basis)
    total = coef if prev is None else prev + coef
    if total.is_zero_canonical():
        out.pop(basis, None)
    else:
        out[basis] = total


def raise_var(v: JetVariable) -> JetVariable:
    """Total-derivative image of a coordinate: x -> u, u -> du, ..."""
    return v.raised()


def lower_var(v: JetVariable, r: int) -> JetVariable | None:
    level = v.level - r
    return JetVariable(level, v.index) if level >= -1 else None


def total_derivative(f) -> Expression:
    """d_T f = sum over coordinates v of (d_T v) * df/dv."""
    f = as_expression(f)
    out = ZERO
    for v in sorted(f.jet_variables(), key=lambda a: a.sort_key):
        out = out + f.diff(v) * Expression.variable(raise_var(v))
    return out


class DifferentialForm:
    """Homogeneous form sum_B c_B dB, with B an increasing tuple of jet coordinates.

    Degree-2 coefficients are stored once per unordered pair (the antisymmetric
    partner is implicit); :meth:`component` returns the signed value for any order.
    """

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree: int, coeffs: Mapping[Basis, Expression] | None = None):
        self.degree = degree
        self.coeffs: dict = {}
        for basis, c in (coeffs or {}).items():
            if len(basis) != degree:
                raise ValueError(f"basis {basis} does not have degree {degree}")
            sign, b = _sort_with_sign(basis)
            if sign:
                _accumulate(self.coeffs, b, as_expression(c) * sign)

    @classmethod
    def function(cls, f) -> "DifferentialForm":
        return cls(0, {(): as_expression(f)})

    @classmethod
    def _raw(cls, degree, coeffs) -> "DifferentialForm":
        out = cls.__new__(cls)
        out.degree = degree
        out.coeffs = coeffs
        return out

    # access -----------------------------------------------------------------
    def component(self, *basis: JetVariable) -> Expression:
        sign, b = _sort_with_sign(basis)
        if not sign:
            return ZERO
        c = self.coeffs.get(b)
        if c is None:
            return ZERO
        return c if sign > 0 else -c

    @property
    def scalar(self) -> Expression:
        if self.degree != 0:
            raise ValueError("scalar() on a form of positive degree")
        return self.coeffs.get((), ZERO)

    def is_zero_canonical(self) -> bool:
        return not self.coeffs

    def basis_levels(self) -> int:
        return max((v.level for b in self.coeffs for v in b), default=-1)

    def jet_order(self) -> int:
        return max((c.jet_order() for c in self.coeffs.values()), default=-1)

    def __eq__(self, other):
        return isinstance(other, DifferentialForm) and self.degree == other.degree and self.coeffs == other.coeffs

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for b, c in sorted(self.coeffs.items(), key=lambda t: [v.sort_key for v in t[0]]):
            wedge = "^".join("d" + v.name for v in b)
            parts.append(f"({c.to_text()})" + (f" {wedge}" if wedge else ""))
        return " + ".join(parts)

    # algebra ----------------------------------------------------------------
    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        if self.degree != other.degree:
            raise ValueError("adding forms of different degree")
        out = dict(self.coeffs)
        for b, c in other.coeffs.items():
            _accumulate(out, b, c)
        return DifferentialForm._raw(self.degree, out)

    def __neg__(self):
        return DifferentialForm._raw(self.degree, {b: -c for b, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> "DifferentialForm":
        f = as_expression(f)
        out = {}
        for b, c in self.coeffs.items():
            _accumulate(out, b, c * f)
        return DifferentialForm._raw(self.degree, out)

    def wedge(self, other: "DifferentialForm") -> "DifferentialForm":
        out: dict = {}
        for b1, c1 in self.coeffs.items():
            for b2, c2 in other.coeffs.items():
                sign, b = _sort_with_sign(b1 + b2)
                if sign:
                    _accumulate(out, b, c1 * c2 * sign)
        return DifferentialForm._raw(self.degree + other.degree, out)

    # operators --------------------------------------------------------------
    def d(self) -> "DifferentialForm":
        """Exterior derivative (m is a constant parameter, not a coordinate)."""
        out: dict = {}
        for b, c in self.coeffs.items():
            for v in sorted(c.jet_variables(), key=lambda a: a.sort_key):
                sign, nb = _sort_with_sign((v,) + b)
                if sign:
                    _accumulate(out, nb, c.diff(v) * sign)
        return DifferentialForm._raw(self.degree + 1, out)

    def total_derivative(self) -> "DifferentialForm":
        """d_T extended to forms as a derivation commuting with d."""
        out: dict = {}
        for b, c in self.coeffs.items():
            _accumulate(out, b, total_derivative(c))
            for k, v in enumerate(b):
                sign, nb = _sort_with_sign(b[:k] + (raise_var(v),) + b[k + 1:])
                if sign:
                    _accumulate(out, nb, c * sign)
        return DifferentialForm._raw(self.degree, out)

    def i(self, r: int) -> "DifferentialForm":
        """Degree-zero derivation i_r; i_0 multiplies by the degree."""
        if r == 0:
            return self.scale(self.degree)
        out: dict = {}
        for b, c in self.coeffs.items():
            for k, v in enumerate(b):
                low = lower_var(v, r)
                if low is None:
                    continue
                # factor (k+1)!/(k-r+1)! with k the jet level of v
                factor = factorial(v.level + 1) // factorial(v.level - r + 1)
                sign, nb = _sort_with_sign(b[:k] + (low,) + b[k + 1:])
                if sign:
                    _accumulate(out, nb, c * (sign * factor))
        return DifferentialForm._raw(self.degree, out)


def i_r(form: DifferentialForm, r: int) -> DifferentialForm:
    return form.i(r)


def lagrange_derivative(form) -> DifferentialForm:
    """delta = sum_r (-1)^r / r! d_T^r i_r d, summed until i_r vanishes."""
    if isinstance(form, Expression) or not isinstance(form, DifferentialForm):
        form = DifferentialForm.function(form)
    eta = form.d()
    top = eta.basis_levels() + 1
    total = eta.i(0)
    for r in range(1, top + 1):
        term = eta.i(r)
        for _ in range(r):
            term = term.total_derivative()
        total = total + term.scale(Fraction((-1) ** r, factorial(r)))
    return total


@dataclass(frozen=True)
class SourceForm:
    """epsilon = E_i dx^i with components of jet order <= 2."""

    E: tuple

    def __post_init__(self):
        comps = tuple(as_expression(e) for e in self.E)
        if len(comps) != 2:
            raise ValueError("a source form has exactly two components")
        object.__setattr__(self, "E", comps)

    @classmethod
    def from_form(cls, form: DifferentialForm) -> "SourceForm":
        if form.degree != 1:
            raise ValueError("source form must have degree 1")
        extra = [b for b in form.coeffs if b[0].level != -1]
        if extra:
            raise ValueError(f"not semi-basic: components on {extra}")
        return cls(tuple(form.component(JetVariable(-1, i)) for i in (1, 2)))

    def to_form(self) -> DifferentialForm:
        return DifferentialForm(1, {(JetVariable(-1, i + 1),): e for i, e in enumerate(self.E)})

    def __getitem__(self, i):
        return self.E[i]

    def jet_order(self) -> int:
        return max(e.jet_order() for e in self.E)

    def subs(self, mapping) -> "SourceForm":
        return SourceForm(tuple(e.subs(mapping) for e in self.E))

    def __sub__(self, other: "SourceForm") -> "SourceForm":
        return SourceForm(tuple(a - b for a, b in zip(self.E, other.E)))

    def __repr__(self):
        return f"SourceForm(E1={self.E[0].to_text()!r}, E2={self.E[1].to_text()!r})"


def euler_poisson(L) -> SourceForm:
    """Source form delta(L) of a Lagrangian."""
    return SourceForm.from_form(lagrange_derivative(DifferentialForm.function(L)))
