"""Right-hand sides of the third-order equations, solved for the coordinate acceleration.

Both equations are linear in the covariant jerk w' = Dw/dsigma.  We solve for w'
and convert back with

    ddu^i = w'^i - Gamma^i_{lj} u^l w^j - d_k Gamma^i_{lj} u^k u^l u^j - 2 Gamma^i_{lj} du^l u^j.
"""

from __future__ import annotations

import numpy as np

from ..geometry.kinematics import (
    PointState,
    covariant_velocity_derivative,
    dot,
    force_at,
    gamma_contract,
    speed,
    star_bivector,
    star_vector,
    star_vector_inverse,
)
from ..geometry.metric import GeometryCache, PointGeometry

GAUGES = ("arc-length", "variational")


def _lower(pg: PointGeometry, a) -> np.ndarray:
    return pg.g @ a


def _connection_terms(pg: PointGeometry, s: PointState) -> np.ndarray:
    """Gamma(u, w) + dGamma(u, u, u) + 2 Gamma(du, u), so that w' = ddu + this."""
    if pg.flat:
        return np.zeros(2)
    w = covariant_velocity_derivative(pg, s)
    u = s.u
    dG = ((np.tensordot(u, pg.dgamma, axes=([0], [0])) @ u) @ u)
    return gamma_contract(pg, u, w) + dG + 2 * gamma_contract(pg, s.du, u)


def covariant_jerk(pg: PointGeometry, s: PointState, ddu) -> np.ndarray:
    """w' from the coordinate second derivative ddu."""
    return ddu + _connection_terms(pg, s)


def coordinate_jerk(pg: PointGeometry, s: PointState, wprime) -> np.ndarray:
    """ddu from w' (inverse of :func:`covariant_jerk`)."""
    return wprime - _connection_terms(pg, s)


def _myeq_rest(pg: PointGeometry, s: PointState, m: float) -> np.ndarray:
    """All terms of E^R except -*w'/|u|^3."""
    v = speed(pg, s.u)
    w = covariant_velocity_derivative(pg, s)
    uw = dot(pg, s.u, w)
    return (3 * uw / v ** 5 * star_vector(pg, w)
            + m * (v * v * _lower(pg, w) - uw * _lower(pg, s.u)) / v ** 3
            - force_at(pg, s.u))


def myeq_expression(pg: PointGeometry, s: PointState, ddu, m: float) -> np.ndarray:
    """E^R_i = -(*w')_i/|u|^3 + 3(u.w)/|u|^5 (*w)_i + m((u.u)w_i - (w.u)u_i)/|u|^3 - R_i."""
    v = speed(pg, s.u)
    wp = covariant_jerk(pg, s, np.asarray(ddu, dtype=float))
    return -star_vector(pg, wp) / v ** 3 + _myeq_rest(pg, s, m)


def myeq_wprime(pg: PointGeometry, s: PointState, m: float) -> np.ndarray:
    v = speed(pg, s.u)
    return star_vector_inverse(pg, v ** 3 * _myeq_rest(pg, s, m))


def rhs_euler_poisson_at(pg: PointGeometry, s: PointState, m: float) -> np.ndarray:
    return coordinate_jerk(pg, s, myeq_wprime(pg, s, m))


def geocircle_wprime(pg: PointGeometry, s: PointState, gauge: str, m: float = 0.0) -> np.ndarray:
    """w' = lam/v^2 u + 3(u.w)/v^2 w - 3(u.w)^2/v^4 u with lam = u.w' fixed by the gauge."""
    v = speed(pg, s.u)
    w = covariant_velocity_derivative(pg, s)
    uw = dot(pg, s.u, w)
    if gauge == "arc-length":
        lam = -dot(pg, w, w)
    elif gauge == "variational":
        force_vec = pg.ginv @ force_at(pg, s.u)
        star = star_bivector(pg, s.u, w) * (m / v) - star_bivector(pg, s.u, force_vec)
        lam = v ** 3 * star + 3 * uw * uw / v ** 2
    else:
        raise ValueError(f"unknown gauge {gauge!r}; choose from {GAUGES}")
    return lam / v ** 2 * s.u + 3 * uw / v ** 2 * w - 3 * uw * uw / v ** 4 * s.u


def rhs_geocircle_at(pg: PointGeometry, s: PointState, gauge: str, m: float = 0.0) -> np.ndarray:
    return coordinate_jerk(pg, s, geocircle_wprime(pg, s, gauge, m))


def geocircle_residual(pg: PointGeometry, s: PointState, ddu) -> np.ndarray:
    """v^3 times the geodesic-circle equation, which leaves u.w' free."""
    v = speed(pg, s.u)
    w = covariant_velocity_derivative(pg, s)
    uw = dot(pg, s.u, w)
    wp = covariant_jerk(pg, s, np.asarray(ddu, dtype=float))
    return wp - dot(pg, s.u, wp) / v ** 2 * s.u - 3 * uw / v ** 2 * w + 3 * uw * uw / v ** 4 * s.u


# ---------------------------------------------------------------------------
# GeometryCache wrappers


def rhs_euler_poisson(state: PointState, cache: GeometryCache, m: float) -> np.ndarray:
    return rhs_euler_poisson_at(cache.at(state.x), state, m)


def rhs_geocircle(state: PointState, cache: GeometryCache, gauge: str, m: float = 0.0) -> np.ndarray:
    return rhs_geocircle_at(cache.at(state.x), state, gauge, m)


def myeq_residual(state: PointState, cache: GeometryCache, ddu, m: float) -> np.ndarray:
    return myeq_expression(cache.at(state.x), state, ddu, m)
