"""Symbolic 2-D metrics and their Levi-Civita connection and curvature.

Index conventions
-----------------
``christoffel[i][l][j]`` is Gamma^i_{lj}.  ``dchristoffel[k][i][l][j]`` is
d_k Gamma^i_{lj}.  The curvature array used by the force and the spin
identity is ``curvature[j][i][p][l] = R_{ji,p}^l`` with

    R_{ji,p}^l = CURVATURE_SIGN * Rstd^l_{pji},
    Rstd^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
                   + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb},

antisymmetric in (j, i).  The sign is fixed so that the covariant Euler-Poisson
equation is the first variation of its Lagrangian on curved charts (checked
against a discrete action in the test suite).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import numpy as np

from ..expr import ZERO, Expression, JetVariable, X, compile_many, is_zero, parse, sin

IDX = (0, 1)
CURVATURE_SIGN = -1
SIGNATURES = ("riemannian", "lorentzian")


class MetricError(ValueError):
    pass


class DomainError(ValueError):
    """Evaluation point outside the chart (pole of the sphere chart, x2 <= 0, degenerate metric)."""


@dataclass(frozen=True)
class Metric2D:
    """g_ij(x1, x2) as a symmetric 2x2 matrix of Expressions."""

    g: tuple
    signature: str = "riemannian"
    name: str = "custom"
    guard: tuple = field(default=(), compare=False)  # (kind, coordinate index, threshold)

    def __post_init__(self):
        g = tuple(tuple(self.g[i][j] for j in IDX) for i in IDX)
        object.__setattr__(self, "g", g)
        if self.signature not in SIGNATURES:
            raise MetricError(f"signature must be one of {SIGNATURES}")
        if not is_zero(g[0][1] - g[1][0]):
            raise MetricError("metric matrix is not symmetric: g12 != g21")
        for row in g:
            for e in row:
                bad = [v for v in e.jet_variables() if v.level != -1]
                if bad or e.free_variables() - e.jet_variables():
                    raise MetricError("metric components may depend on x1, x2 only")

    # symbolic pieces ----------------------------------------------------------
    @cached_property
    def det(self) -> Expression:
        g = self.g
        return g[0][0] * g[1][1] - g[0][1] * g[1][0]

    @cached_property
    def inverse(self) -> tuple:
        g, d = self.g, self.det
        return ((g[1][1] / d, -g[0][1] / d), (-g[1][0] / d, g[0][0] / d))

    @cached_property
    def christoffel(self) -> tuple:
        """Gamma^i_{lj} = 1/2 g^{ik}(d_l g_kj + d_j g_kl - d_k g_lj)."""
        dg = [[[self.g[a][b].diff(JetVariable(-1, k + 1)) for b in IDX] for a in IDX] for k in IDX]
        out = []
        for i in IDX:
            rows = []
            for l in IDX:
                row = []
                for j in IDX:
                    s = ZERO
                    for k in IDX:
                        s = s + self.inverse[i][k] * (dg[l][k][j] + dg[j][k][l] - dg[k][l][j])
                    row.append(s * Fraction(1, 2))
                rows.append(tuple(row))
            out.append(tuple(rows))
        return tuple(out)

    @cached_property
    def dchristoffel(self) -> tuple:
        G = self.christoffel
        return tuple(tuple(tuple(tuple(G[i][l][j].diff(JetVariable(-1, k + 1)) for j in IDX) for l in IDX)
                           for i in IDX) for k in IDX)

    def riemann_standard(self, a, b, c, d) -> Expression:
        """Rstd^a_{bcd} (0-based indices)."""
        G, dG = self.christoffel, self.dchristoffel
        out = dG[c][a][d][b] - dG[d][a][c][b]
        for e in IDX:
            out = out + G[a][c][e] * G[e][d][b] - G[a][d][e] * G[e][c][b]
        return out

    @cached_property
    def curvature(self) -> tuple:
        """curvature[j][i][p][l] = R_{ji,p}^l."""
        return tuple(tuple(tuple(tuple(self.riemann_standard(l, p, j, i) * CURVATURE_SIGN for l in IDX)
                                 for p in IDX) for i in IDX) for j in IDX)

    @cached_property
    def gauss_curvature(self) -> Expression:
        """K = g_{1e} Rstd^e_{212} / det g, independent of the R-sign convention."""
        return (self.g[0][0] * self.riemann_standard(0, 1, 0, 1)
                + self.g[0][1] * self.riemann_standard(1, 1, 0, 1)) / self.det

    def cache(self) -> "GeometryCache":
        return GeometryCache(self)


def _guard_check(metric: Metric2D, x1: float, x2: float):
    for kind, k, thr in metric.guard:
        xk = (x1, x2)[k]
        if kind == "sin" and abs(math.sin(xk)) <= thr:
            raise DomainError(f"sphere chart excludes poles: |sin x{k + 1}| <= {thr:g} at x{k + 1}={xk:g}")
        if kind == "positive" and xk <= thr:
            raise DomainError(f"half-plane chart requires x{k + 1} > {thr:g}, got {xk:g}")


class GeometryCache:
    """Compiled numeric evaluators for metric, inverse, Christoffel, their derivatives and R."""

    def __init__(self, metric: Metric2D):
        self.metric = metric
        m = metric
        self._exprs = (
            [m.g[i][j] for i in IDX for j in IDX]
            + [m.inverse[i][j] for i in IDX for j in IDX]
            + [m.det]
            + [m.christoffel[i][l][j] for i in IDX for l in IDX for j in IDX]
            + [m.dchristoffel[k][i][l][j] for k in IDX for i in IDX for l in IDX for j in IDX]
            + [m.curvature[j][i][p][l] for j in IDX for i in IDX for p in IDX for l in IDX]
        )
        self._fn = compile_many(self._exprs, [JetVariable(-1, 1), JetVariable(-1, 2)])
        self.is_flat = all(e.is_zero_canonical() for e in self._exprs[9:])
        self._constant = None
        if all(not e.free_variables() for e in self._exprs):
            self._constant = self._evaluate(0.0, 0.0)

    def at(self, x) -> "PointGeometry":
        x1, x2 = float(x[0]), float(x[1])
        _guard_check(self.metric, x1, x2)
        if self._constant is not None:
            return self._constant
        return self._evaluate(x1, x2)

    def _evaluate(self, x1: float, x2: float) -> "PointGeometry":
        try:
            vals = self._fn(x1, x2)
        except (ZeroDivisionError, ValueError) as exc:
            raise DomainError(f"metric evaluation failed at x=({x1:g}, {x2:g}): {exc}") from None
        v = np.array(vals, dtype=float)
        det = v[8]
        if not np.isfinite(v).all() or abs(det) < 1e-300:
            raise DomainError(f"degenerate metric at x=({x1:g}, {x2:g})")
        if self.metric.signature == "riemannian" and (det <= 0 or v[0] <= 0):
            raise DomainError(f"metric not positive definite at x=({x1:g}, {x2:g})")
        return PointGeometry(
            g=v[0:4].reshape(2, 2),
            ginv=v[4:8].reshape(2, 2),
            sqrt_det=float(np.sqrt(abs(det))),
            gamma=v[9:17].reshape(2, 2, 2),
            dgamma=v[17:33].reshape(2, 2, 2, 2),
            curvature=v[33:49].reshape(2, 2, 2, 2),
            flat=self.is_flat,
        )


@dataclass(frozen=True)
class PointGeometry:
    g: object
    ginv: object
    sqrt_det: float
    gamma: object      # [i, l, j] = Gamma^i_{lj}
    dgamma: object     # [k, i, l, j] = d_k Gamma^i_{lj}
    curvature: object  # [j, i, p, l] = R_{ji,p}^l
    flat: bool = False


# ---------------------------------------------------------------------------
# presets and files


def euclidean() -> Metric2D:
    one, zero = Expression.constant(1), Expression.constant(0)
    return Metric2D(((one, zero), (zero, one)), name="euclidean")


def sphere(radius=1) -> Metric2D:
    """Round sphere of the given radius in the (theta, phi) = (x1, x2) chart."""
    R = Fraction(radius) if not isinstance(radius, float) else Fraction(radius).limit_denominator(10**9)
    if R <= 0:
        raise MetricError("sphere radius must be positive")
    R2 = Expression.constant(R * R)
    s = sin(X(1))
    return Metric2D(((R2, ZERO), (ZERO, R2 * s * s)), name=f"sphere({radius})", guard=(("sin", 0, 1e-6),))


def hyperbolic() -> Metric2D:
    """Poincare half-plane g = diag(1/x2^2, 1/x2^2)."""
    h = 1 / (X(2) * X(2))
    return Metric2D(((h, ZERO), (ZERO, h)), name="hyperbolic", guard=(("positive", 1, 1e-6),))


PRESETS = ("euclidean", "sphere(R)", "hyperbolic")


def load_metric(source: str) -> Metric2D:
    """Preset name (``euclidean``, ``sphere``, ``sphere(2)``, ``hyperbolic``) or path to a JSON metric file."""
    src = source.strip()
    low = src.lower()
    if low == "euclidean":
        return euclidean()
    if low in ("hyperbolic", "hyperbolic-half-plane", "half-plane"):
        return hyperbolic()
    if low == "sphere":
        return sphere(1)
    if low.startswith("sphere(") and low.endswith(")"):
        try:
            R = Fraction(low[7:-1])
        except ValueError:
            raise MetricError(f"bad sphere radius in {source!r}") from None
        return sphere(R)
    path = Path(src)
    if path.exists():
        return metric_from_file(path)
    raise MetricError(f"unknown metric {source!r}: expected one of {', '.join(PRESETS)} or an existing file")


def metric_from_file(path) -> Metric2D:
    """JSON object with expression strings g11, g12, g21, g22 and optional signature."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MetricError(f"metric file {path}: invalid JSON ({exc})") from None
    return metric_from_mapping(data, name=str(path))


def metric_from_mapping(data: dict, name: str = "custom") -> Metric2D:
    missing = [k for k in ("g11", "g12", "g21", "g22") if k not in data]
    if missing:
        raise MetricError(f"metric is missing fields {missing}")
    comps = {k: parse(str(data[k])) for k in ("g11", "g12", "g21", "g22")}
    return Metric2D(((comps["g11"], comps["g12"]), (comps["g21"], comps["g22"])),
                    signature=data.get("signature", "riemannian"), name=name)
