"""Explicit Runge-Kutta integration of the third-order system y = (x, u, du)."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from ..geometry.kinematics import PointState, ZeroVelocity, frenet_curvature_at, speed
from ..geometry.metric import DomainError, GeometryCache
from .equations import GAUGES, myeq_expression, rhs_euler_poisson_at, rhs_geocircle_at

STEP_FLOOR = 1e-12
MAX_SPEED = 1e8
METHODS = ("rk4", "rk45")
EQUATIONS = ("myeq", "geocircle")


class IntegrationError(RuntimeError):
    """Run stopped early; ``trajectory`` holds every accepted sample up to the failure."""

    def __init__(self, message: str, trajectory: "Trajectory | None" = None):
        super().__init__(message)
        self.trajectory = trajectory


class DomainExit(IntegrationError):
    pass


class StepFloorReached(IntegrationError):
    pass


@dataclass(frozen=True)
class KinematicState:
    sigma: float
    x: tuple
    u: tuple
    du: tuple

    def __post_init__(self):
        for name in ("x", "u", "du"):
            v = tuple(float(c) for c in getattr(self, name))
            if len(v) != 2:
                raise ValueError(f"{name} must have two components")
            object.__setattr__(self, name, v)
        if self.u == (0.0, 0.0):
            raise ValueError("initial velocity must be nonzero")

    @classmethod
    def from_vector(cls, sigma: float, y) -> "KinematicState":
        return cls(sigma, y[0:2], y[2:4], y[4:6])

    def vector(self) -> np.ndarray:
        return np.array(self.x + self.u + self.du, dtype=float)

    def point(self) -> PointState:
        return PointState.of(self.x, self.u, self.du)


@dataclass(frozen=True)
class IntegrationSettings:
    method: str = "rk4"
    step: float = 1e-3
    tol: float = 1e-10
    max_steps: int = 1000
    t_end: float | None = None
    equation: str = "myeq"
    gauge: str = "arc-length"
    m: float = 1.0
    max_step: float = 0.1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.equation not in EQUATIONS:
            raise ValueError(f"equation must be one of {EQUATIONS}")
        if self.gauge not in GAUGES:
            raise ValueError(f"gauge must be one of {GAUGES}")
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError("step must be positive")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise ValueError("tol must be positive")
        if self.max_steps < 0:
            raise ValueError("max_steps must be nonnegative")
        if self.m < 0 or not math.isfinite(self.m):
            raise ValueError("m must be a nonnegative number")
        if self.t_end is not None and not self.t_end > 0:
            raise ValueError("t_end must be positive")


@dataclass
class Trajectory:
    sigma: np.ndarray
    y: np.ndarray          # (n, 6): x1 x2 u1 u2 du1 du2
    k: np.ndarray
    H: np.ndarray
    residual: np.ndarray
    s: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.sigma)

    @property
    def x(self):
        return self.y[:, 0:2]

    @property
    def u(self):
        return self.y[:, 2:4]

    @property
    def du(self):
        return self.y[:, 4:6]

    @property
    def samples(self) -> list:
        return [KinematicState.from_vector(t, row) for t, row in zip(self.sigma, self.y)]

    def k_drift(self) -> float:
        return float(np.max(np.abs(self.k - self.k[0])))

    def h_plus_k(self) -> float:
        return float(np.max(np.abs(self.H + self.k)))

    def max_residual(self) -> float:
        return float(np.max(self.residual))


# ---------------------------------------------------------------------------
# right-hand side and diagnostics


class System:
    """First-order system for one equation on one metric."""

    def __init__(self, cache: GeometryCache, settings: IntegrationSettings):
        self.cache = cache
        self.settings = settings
        self._hamiltonian = euclidean_hamiltonian() if is_identity_metric(cache) else None

    def acceleration(self, pg, ps: PointState) -> np.ndarray:
        st = self.settings
        if st.equation == "myeq":
            return rhs_euler_poisson_at(pg, ps, st.m)
        return rhs_geocircle_at(pg, ps, st.gauge, st.m)

    def __call__(self, t: float, y: np.ndarray) -> np.ndarray:
        pg = self.cache.at(y[0:2])
        ps = PointState(y[0:2], y[2:4], y[4:6])
        return np.concatenate((y[2:4], y[4:6], self.acceleration(pg, ps)))

    def diagnostics(self, y: np.ndarray, ddu=None) -> tuple[float, float, float, float]:
        """(k, H, sup |E^R|, speed) at a state; ``ddu`` may be passed when already known."""
        pg = self.cache.at(y[0:2])
        ps = PointState(y[0:2], y[2:4], y[4:6])
        k = frenet_curvature_at(pg, ps)
        if ddu is None:
            ddu = self.acceleration(pg, ps)
        res = float(np.max(np.abs(myeq_expression(pg, ps, ddu, self.settings.m))))
        if self._hamiltonian is not None:
            H = self._hamiltonian(*ps.u, *ps.du, self.settings.m)
        else:
            # covariant analogue: the same homogeneity argument gives H = -k
            H = -k
        return k, H, res, speed(pg, ps.u)


def is_identity_metric(cache: GeometryCache) -> bool:
    g = cache.metric.g
    return all(g[i][j].constant_value() == (1 if i == j else 0) for i in (0, 1) for j in (0, 1))


@lru_cache(maxsize=1)
def euclidean_hamiltonian():
    """Compiled H(u, du, m) of L = k - m|u| in the Euclidean chart, from the symbolic engine."""
    from ..variational import hamiltonian, lagrangian_preset

    L = lagrangian_preset("curvature") + lagrangian_preset("length")
    H = hamiltonian(L)
    return H.lambdify(["u1", "u2", "du1", "du2", "m"])


# ---------------------------------------------------------------------------
# steppers


def _rk4_step(f: Callable, t: float, y: np.ndarray, h: float, k1: np.ndarray) -> np.ndarray:
    k2 = f(t + h / 2, y + h / 2 * k1)
    k3 = f(t + h / 2, y + h / 2 * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


# Dormand-Prince 5(4) tableau
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


def _dp_step(f: Callable, t: float, y: np.ndarray, h: float, k1: np.ndarray):
    ks = [k1]
    for i in range(1, 7):
        yi = y + h * sum(a * k for a, k in zip(_DP_A[i], ks))
        ks.append(f(t + _DP_C[i] * h, yi))
    # stage 7 sits at the 5th-order solution (FSAL), so yi is y5 and ks[-1] its derivative
    err = h * ((_DP_B5 - _DP_B4) @ np.array(ks))
    return yi, err, ks[-1]


# ---------------------------------------------------------------------------


def integrate(cache: GeometryCache, init: KinematicState, settings: IntegrationSettings) -> Trajectory:
    """Integrate from ``init``; stops after max_steps accepted steps or at t_end."""
    system = System(cache, settings)
    ts = [init.sigma]
    ys = [init.vector()]
    diag = []

    def partial(reason_cls, msg):
        traj = _finish(ts[: len(diag)], ys[: len(diag)], diag, settings, cache, init)
        return reason_cls(msg, traj)

    try:
        diag.append(system.diagnostics(ys[0]))
    except (DomainError, ZeroVelocity) as exc:
        raise DomainExit(f"initial state invalid: {exc}", None) from None

    t, y = init.sigma, ys[0]
    h = settings.step
    k1 = None
    steps = 0
    while steps < settings.max_steps:
        if settings.t_end is not None and t >= init.sigma + settings.t_end - 1e-14:
            break
        if settings.t_end is not None:
            h = min(h, init.sigma + settings.t_end - t)
        try:
            if settings.method == "rk4":
                if k1 is None:
                    k1 = system(t, y)
                y_new = _rk4_step(system, t, y, h, k1)
                t_new = t + h
                # the derivative at the new point serves as next k1 and feeds the diagnostics
                k_last = system(t_new, y_new)
            else:
                if k1 is None:
                    k1 = system(t, y)
                y_new, err, k_last = _dp_step(system, t, y, h, k1)
                scale = settings.tol + settings.tol * np.maximum(np.abs(y), np.abs(y_new))
                enorm = float(np.sqrt(np.mean((err / scale) ** 2)))
                if not np.isfinite(enorm) or enorm > 1.0:
                    factor = 0.2 if not np.isfinite(enorm) else max(0.2, 0.9 * enorm ** -0.2)
                    h *= factor
                    if h < STEP_FLOOR:
                        raise partial(StepFloorReached, f"step size fell below {STEP_FLOOR:g} at sigma={t:.12g}")
                    continue
                t_new = t + h
                grow = 5.0 if enorm == 0 else min(5.0, 0.9 * enorm ** -0.2)
                h_next = min(h * grow, settings.max_step)
            d = system.diagnostics(y_new, k_last[4:6])
        except (DomainError, ZeroVelocity) as exc:
            # an adaptive trial step may overshoot the chart; retry smaller before giving up
            if settings.method == "rk45" and h > 1e3 * STEP_FLOOR:
                h *= 0.25
                continue
            raise partial(DomainExit, f"left the chart domain near sigma={t:.12g}: {exc}") from None
        if not (np.all(np.isfinite(y_new)) and np.all(np.isfinite(d))) or d[3] > MAX_SPEED:
            raise partial(DomainExit, f"solution blew up after sigma={t:.12g} (speed beyond {MAX_SPEED:g})")
        t, y, k1 = t_new, y_new, k_last
        if settings.method == "rk45":
            h = h_next
        ts.append(t)
        ys.append(y)
        diag.append(d)
        steps += 1
    return _finish(ts, ys, diag, settings, cache, init)


def _finish(ts, ys, diag, settings, cache, init) -> Trajectory:
    ts = np.array(ts, dtype=float)
    d = np.array(diag, dtype=float).reshape(-1, 4)
    speeds = d[:, 3]
    s = np.concatenate(([0.0], np.cumsum(0.5 * (speeds[1:] + speeds[:-1]) * np.diff(ts)))) if len(ts) else ts
    return Trajectory(
        sigma=ts,
        y=np.array(ys, dtype=float).reshape(-1, 6),
        k=d[:, 0],
        H=d[:, 1],
        residual=d[:, 2],
        s=s,
        meta={"metric": cache.metric.name, "settings": asdict(settings), "init": asdict(init)},
    )
