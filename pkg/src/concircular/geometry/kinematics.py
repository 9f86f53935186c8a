"""Numeric covariant kinematics of a chart state (x, u, du).

Conventions (eps is the symbol from :mod:`concircular.conventions`):

* w = du + Gamma(u, u) is the covariant derivative of the velocity;
* Hodge star of a vector, giving a covector: (*a)_i = -sqrt|g| eps_ij a^j;
* Hodge star of a bivector: *(a ^ c) = sqrt|g| eps_ij a^i c^j;
* |a ^ c| = |*(a ^ c)|, and the bivector (a ^ c)^{pi} = a^p c^i - a^i c^p.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..conventions import EPS_ARRAY
from .metric import GeometryCache, PointGeometry

MIN_SPEED = 1e-12
_ZERO2 = np.zeros(2)


class ZeroVelocity(ValueError):
    pass


class GeodesicState(ValueError):
    """u ^ w = 0: the spin tensor is undefined."""


@dataclass(frozen=True)
class PointState:
    x: np.ndarray
    u: np.ndarray
    du: np.ndarray

    @classmethod
    def of(cls, x, u, du) -> "PointState":
        return cls(np.asarray(x, dtype=float), np.asarray(u, dtype=float), np.asarray(du, dtype=float))


def dot(pg: PointGeometry, a, c) -> float:
    if pg.flat:
        return float(a @ c)
    return float(a @ pg.g @ c)


def speed(pg: PointGeometry, u) -> float:
    v2 = dot(pg, u, u)
    if v2 <= MIN_SPEED ** 2:
        raise ZeroVelocity(f"velocity norm {np.sqrt(max(v2, 0.0)):.3g} below {MIN_SPEED:g}")
    return float(np.sqrt(v2))


def gamma_contract(pg: PointGeometry, a, c) -> np.ndarray:
    """Gamma^i_{lj} a^l c^j."""
    if pg.flat:
        return _ZERO2
    return (pg.gamma @ c) @ a


def covariant_velocity_derivative(pg: PointGeometry, s: PointState) -> np.ndarray:
    return s.du + gamma_contract(pg, s.u, s.u)


def star_vector(pg: PointGeometry, a) -> np.ndarray:
    """(*a)_i = -sqrt|g| eps_ij a^j (covector)."""
    return -pg.sqrt_det * (EPS_ARRAY @ a)


def star_vector_inverse(pg: PointGeometry, c) -> np.ndarray:
    """Vector a with *a = c (eps squares to -1)."""
    return (EPS_ARRAY @ c) / pg.sqrt_det


def star_bivector(pg: PointGeometry, a, c) -> float:
    """*(a ^ c) = sqrt|g| eps_ij a^i c^j."""
    return float(pg.sqrt_det * (a @ EPS_ARRAY @ c))


def wedge_norm(pg: PointGeometry, a, c) -> float:
    return abs(star_bivector(pg, a, c))


def bivector(a, c) -> np.ndarray:
    return np.outer(a, c) - np.outer(c, a)


def bivector_dot(pg: PointGeometry, a, c, v, w) -> float:
    """(a ^ c).(v ^ w) = (a.v)(c.w) - (c.v)(a.w)."""
    return dot(pg, a, v) * dot(pg, c, w) - dot(pg, c, v) * dot(pg, a, w)


def frenet_curvature_at(pg: PointGeometry, s: PointState) -> float:
    v = speed(pg, s.u)
    w = covariant_velocity_derivative(pg, s)
    return wedge_norm(pg, s.u, w) / v ** 3


def signed_curvature_at(pg: PointGeometry, s: PointState) -> float:
    v = speed(pg, s.u)
    w = covariant_velocity_derivative(pg, s)
    return star_bivector(pg, s.u, w) / v ** 3


def sigma_at(pg: PointGeometry, u) -> np.ndarray:
    """sigma^l_j = R_{ji,p}^l u^i u^p, returned as array [l, j]."""
    return np.einsum("jipl,i,p->lj", pg.curvature, u, u)


def force_at(pg: PointGeometry, u) -> np.ndarray:
    """R_j = sqrt|g|/|u|^3 eps_il R_{jn,p}^l u^i u^p u^n (covector)."""
    v = speed(pg, u)
    if pg.flat:
        return _ZERO2
    # curvature[j, n, p, l] u^n u^p -> [j, l], then contract l with eps_il u^i
    m = np.tensordot(np.tensordot(pg.curvature, u, axes=([1], [0])), u, axes=([1], [0]))
    return pg.sqrt_det / v ** 3 * (m @ (u @ EPS_ARRAY))


def spin_at(pg: PointGeometry, s: PointState) -> np.ndarray:
    v = speed(pg, s.u)
    w = covariant_velocity_derivative(pg, s)
    n = wedge_norm(pg, s.u, w)
    if n == 0.0 or n <= 1e-14 * v * np.linalg.norm(w) * pg.sqrt_det:
        raise GeodesicState("spin tensor undefined on a geodesic state (u ^ w = 0)")
    return bivector(s.u, w) / (v * n)


def lowered_curvature(pg: PointGeometry) -> np.ndarray:
    """R_{lj,pi} = R_{lj,p}^m g_mi, as array [l, j, p, i]."""
    return np.einsum("ljpm,mi->ljpi", pg.curvature, pg.g)


# ---------------------------------------------------------------------------
# convenience wrappers taking a GeometryCache


def frenet_curvature(state: PointState, cache: GeometryCache) -> float:
    return frenet_curvature_at(cache.at(state.x), state)


def concircular_force(state: PointState, cache: GeometryCache) -> np.ndarray:
    return force_at(cache.at(state.x), state.u)


def spin_tensor(state: PointState, cache: GeometryCache) -> np.ndarray:
    return spin_at(cache.at(state.x), state)


def sigma(state: PointState, cache: GeometryCache) -> np.ndarray:
    return sigma_at(cache.at(state.x), state.u)
