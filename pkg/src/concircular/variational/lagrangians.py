"""Named Lagrangians and source forms in the Euclidean chart."""

from __future__ import annotations

from fractions import Fraction

from ..expr import MASS, M, Expression, as_expression, parse
from . import euclid
from .coefficients import EulerPoissonCoefficients, extract_coefficients
from .forms import SourceForm

LAGRANGIAN_PRESETS = ("eq1", "curvature", "signed-curvature", "length", "curvature-times-length", "free-particle")


def lagrangian_preset(name: str, m=MASS) -> Expression:
    m = as_expression(m)
    if name == "eq1":
        return euclid.lagrangian(m)
    if name == "curvature":
        return euclid.curvature()
    if name == "signed-curvature":
        return euclid.signed_curvature()
    if name == "length":
        return euclid.length(m)
    if name == "curvature-times-length":
        return euclid.curvature() * euclid.speed()
    if name == "free-particle":
        return parse("(u1^2 + u2^2)/2")
    raise KeyError(f"unknown Lagrangian preset {name!r}; choose from {', '.join(LAGRANGIAN_PRESETS)}")


def resolve_lagrangian(text: str, m=MASS) -> Expression:
    """Preset name or expression text."""
    if text in LAGRANGIAN_PRESETS:
        return lagrangian_preset(text, m)
    L = parse(text)
    m = as_expression(m)
    return L if m == MASS else L.subs({M: m})


def theorem_source(m=MASS) -> SourceForm:
    return SourceForm(euclid.theorem_source(as_expression(m)))


def theorem_coefficients(m=MASS) -> EulerPoissonCoefficients:
    c, _ = extract_coefficients(theorem_source(m))
    return c


# seeded perturbations of the theorem's coefficients --------------------------


def perturb_b_antisymmetric(c: EulerPoissonCoefficients, amount=Fraction(1, 10)) -> EulerPoissonCoefficients:
    """B_12 -> B_12 + amount, giving B an antisymmetric part amount/2."""
    return c.with_B(lambda i, j, b: b + amount if (i, j) == (1, 2) else b)


def perturb_a_exponent(c: EulerPoissonCoefficients) -> EulerPoissonCoefficients:
    """A_ij = eps_ij/|u|^3 -> eps_ij/|u|^2."""
    r = euclid.speed()
    A = tuple(tuple(a * r for a in row) for row in c.A)
    return EulerPoissonCoefficients(A, c.B, c.q)


def perturb_q_velocity(c: EulerPoissonCoefficients) -> EulerPoissonCoefficients:
    """q = 0 -> q_i = u_i."""
    return EulerPoissonCoefficients(c.A, c.B, tuple(q + ui for q, ui in zip(c.q, euclid.u())))


def perturb_b_scaled(c: EulerPoissonCoefficients) -> EulerPoissonCoefficients:
    """B -> (1 + x^1) B, breaking translation invariance."""
    s = 1 + euclid.x()[0]
    return c.with_B(lambda i, j, b: b * s)


PERTURBATIONS = {
    "b-antisymmetric": perturb_b_antisymmetric,
    "a-exponent": perturb_a_exponent,
    "q-velocity": perturb_q_velocity,
    "b-scaled": perturb_b_scaled,
}


SOURCE_PRESETS = ("theorem", *(f"theorem+{k}" for k in PERTURBATIONS))


def source_preset(name: str, m=MASS) -> SourceForm:
    if name == "theorem":
        return theorem_source(m)
    if name.startswith("theorem+") and name[8:] in PERTURBATIONS:
        return PERTURBATIONS[name[8:]](theorem_coefficients(m)).reassemble()
    raise KeyError(f"unknown equation preset {name!r}; choose from {', '.join(SOURCE_PRESETS)}")
