"""Inverse-problem criteria on a source form: variationality, Helmholtz, symmetry,
first integrals and inclusion of straight lines; and the theorem checklist."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..conventions import eps
from ..expr import MASS, ZERO, Expression, JetVariable, U, as_expression, is_zero
from . import euclid
from .coefficients import (
    HELMHOLTZ_NAMES,
    EulerPoissonCoefficients,
    PatternReport,
    extract_coefficients,
    helmholtz_residuals,
)
from .forms import DifferentialForm, SourceForm, euler_poisson, lagrange_derivative, total_derivative

IDX = (1, 2)


class NonInvertibleA(ValueError):
    pass


class NonconformantPattern(ValueError):
    def __init__(self, report: PatternReport):
        self.report = report
        super().__init__("; ".join(report.messages) or "source form does not fit the Euler-Poisson pattern")


@dataclass
class CheckItem:
    name: str
    passed: bool
    max_residual: float = 0.0
    path: str = "symbolic"
    detail: str = ""


@dataclass
class CheckReport:
    title: str
    items: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(it.passed for it in self.items)

    def add(self, name, decisions, detail=""):
        """Record a check that passes iff every is_zero decision is true."""
        decisions = list(decisions)
        passed = all(d.value for d in decisions)
        res = max((d.max_residual for d in decisions), default=0.0)
        path = "probe" if any(d.path == "probe" for d in decisions) else "symbolic"
        self.items.append(CheckItem(name, passed, res, path, detail))
        return passed

    def failed(self) -> list:
        return [it.name for it in self.items if not it.passed]

    def __getitem__(self, name) -> CheckItem:
        for it in self.items:
            if it.name == name:
                return it
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "items": [
                {"name": it.name, "passed": it.passed, "max_residual": it.max_residual, "path": it.path,
                 **({"detail": it.detail} if it.detail else {})}
                for it in self.items
            ],
        }

    def to_text(self) -> str:
        lines = [f"{self.title}: {'PASS' if self.passed else 'FAIL'}"]
        for it in self.items:
            extra = f"  ({it.detail})" if it.detail else ""
            lines.append(f"  [{'pass' if it.passed else 'FAIL'}] {it.name:<28} path={it.path:<8} "
                         f"max|res|={it.max_residual:.3g}{extra}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VariationalityResult:
    passed: bool
    residual: DifferentialForm
    max_residual: float

    def __bool__(self):
        return self.passed


def variationality_check(eps_form: SourceForm) -> VariationalityResult:
    """delta(epsilon) = 0, coefficient by coefficient."""
    res = lagrange_derivative(eps_form.to_form())
    decisions = [is_zero(c) for c in res.coeffs.values()]
    return VariationalityResult(all(d.value for d in decisions), res,
                                max((d.max_residual for d in decisions), default=0.0))


def helmholtz_check(c: EulerPoissonCoefficients) -> CheckReport:
    report = CheckReport("helmholtz")
    residuals = helmholtz_residuals(c)
    for name in HELMHOLTZ_NAMES:
        comps = residuals[name]
        decisions = {k: is_zero(v) for k, v in comps.items()}
        bad = [k for k, d in decisions.items() if not d.value]
        detail = ""
        if bad:
            detail = "nonzero at " + ", ".join("".join(map(str, k)) + "=" + comps[k].to_text() for k in bad)
        report.add(name, decisions.values(), detail)
    return report


# ---------------------------------------------------------------------------
# shell substitution, symmetry and first integrals


def shell_acceleration(c: EulerPoissonCoefficients) -> tuple[Expression, Expression]:
    """ddu = -A^{-1}[(du.d_u)A du + B du + q]."""
    det = c.a(1, 1) * c.a(2, 2) - c.a(1, 2) * c.a(2, 1)
    if is_zero(det):
        raise NonInvertibleA("coefficient matrix A is singular; the shell cannot be solved for the acceleration")
    rhs = []
    for i in IDX:
        r = c.qq(i)
        for j in IDX:
            dA = sum((U(p, 1) * c.a(i, j).diff(JetVariable(0, p)) for p in IDX), ZERO)
            r = r + (dA + c.b(i, j)) * U(j, 1)
        rhs.append(r)
    inv = ((c.a(2, 2), -c.a(1, 2)), (-c.a(2, 1), c.a(1, 1)))
    return tuple(-(inv[i][0] * rhs[0] + inv[i][1] * rhs[1]) / det for i in range(2))


def _shell_map(eps_form: SourceForm) -> dict:
    c, report = extract_coefficients(eps_form)
    if not report.conformant:
        raise NonconformantPattern(report)
    acc = shell_acceleration(c)
    return {JetVariable(2, i): acc[i - 1] for i in IDX}


def restrict_to_shell(f, eps_form: SourceForm) -> Expression:
    return as_expression(f).subs(_shell_map(eps_form))


@dataclass(frozen=True)
class SymmetryGenerator:
    """Translation chi^i d/dx^i, or rotation varpi e^{ij}(x_i d/dx^j + u_i d/du^j + ...)."""

    kind: str
    chi: tuple = (0, 0)
    varpi: object = 0

    @classmethod
    def translation(cls, chi1, chi2) -> "SymmetryGenerator":
        return cls("translation", chi=(as_expression(chi1), as_expression(chi2)))

    @classmethod
    def rotation(cls, varpi=1) -> "SymmetryGenerator":
        return cls("rotation", varpi=as_expression(varpi))

    def coefficient(self, v: JetVariable) -> Expression:
        """Prolonged component along d/dv (same e^{ij} at every jet level)."""
        if self.kind == "translation":
            return self.chi[v.index - 1] if v.level == -1 else ZERO
        j = v.index
        return sum((self.varpi * eps(i, j) * Expression.variable(JetVariable(v.level, i)) for i in IDX if eps(i, j)),
                   ZERO)

    def apply(self, f: Expression) -> Expression:
        return sum((self.coefficient(v) * f.diff(v) for v in sorted(f.jet_variables(), key=lambda a: a.sort_key)),
                   ZERO)


def symmetry_check(eps_form: SourceForm, g: SymmetryGenerator):
    """X(E_l) restricted to E = 0 vanishes for l = 1, 2."""
    shell = _shell_map(eps_form)
    return [is_zero(g.apply(e).subs(shell)) for e in eps_form.E]


def first_integral_check(eps_form: SourceForm, f):
    """d_T f restricted to E = 0 vanishes."""
    return is_zero(total_derivative(as_expression(f)).subs(_shell_map(eps_form)))


def line_inclusion_check(eps_form: SourceForm):
    """E_l with du = ddu = 0 vanishes."""
    zero = {JetVariable(k, i): 0 for k in (1, 2) for i in IDX}
    return [is_zero(e.subs(zero)) for e in eps_form.E]


# ---------------------------------------------------------------------------
# the theorem checklist


def equation_checklist(eps_form: SourceForm, title: str = "checklist") -> CheckReport:
    """All theorem hypotheses plus the proof-conclusion invariants, on any source form."""
    report = CheckReport(title)
    c, pattern = extract_coefficients(eps_form)
    if not pattern.conformant:
        raise NonconformantPattern(pattern)
    var = variationality_check(eps_form)
    report.items.append(CheckItem("variationality", var.passed, var.max_residual))
    for it in helmholtz_check(c).items:
        it.name = f"helmholtz-{it.name}"
        report.items.append(it)
    report.add("symmetry-translation-x1", symmetry_check(eps_form, SymmetryGenerator.translation(1, 0)))
    report.add("symmetry-translation-x2", symmetry_check(eps_form, SymmetryGenerator.translation(0, 1)))
    report.add("symmetry-rotation", symmetry_check(eps_form, SymmetryGenerator.rotation(1)))
    report.add("first-integral-k", [first_integral_check(eps_form, euclid.curvature())])
    report.add("line-inclusion", line_inclusion_check(eps_form))

    uu, du = euclid.u(), euclid.u(1)
    r2 = euclid.dot(uu, uu)
    udu = euclid.dot(uu, du)
    dA = []
    rotA = []
    for i in IDX:
        for j in IDX:
            a = c.a(i, j)
            deriv = sum((du[p - 1] * a.diff(JetVariable(0, p)) for p in IDX), ZERO)
            dA.append(is_zero(deriv + 3 * udu / r2 * a))
            rotA.append(is_zero(sum((eps(k, l) * uu[k - 1] * a.diff(JetVariable(0, l))
                                     for k in IDX for l in IDX if eps(k, l)), ZERO)))
    report.add("dA=3A", dA)
    report.add("rotA=0", rotA)
    report.add("uB=0", [is_zero(sum((uu[p - 1] * c.b(p, l) for p in IDX), ZERO)) for l in IDX])
    report.add("B-symmetric", [is_zero(c.b(1, 2) - c.b(2, 1))])
    scaled = c.a(1, 2) * euclid.speed() ** 3
    report.add("A12*|u|^3-constant",
               [is_zero(scaled.diff(JetVariable(k, i))) for k in (-1, 0) for i in IDX])
    return report


def verify_theorem(m=MASS) -> CheckReport:
    """Theorem checklist on its own source form plus delta(L) = E for the Lagrangian."""
    m = as_expression(m)
    E = SourceForm(euclid.theorem_source(m))
    report = equation_checklist(E, title=f"theorem (m={m.to_text()})")
    dL = euler_poisson(euclid.lagrangian(m))
    report.add("delta(L)=E", [is_zero(a - b) for a, b in zip(dL.E, E.E)])
    return report


def checklist_for_coefficients(c: EulerPoissonCoefficients, title="checklist") -> CheckReport:
    return equation_checklist(c.reassemble(), title)
