"""Drift of the geodesic curvature k along Euler-Poisson trajectories on the sphere and half-plane."""

import math

import numpy as np

from concircular.geometry import hyperbolic, sphere, star_vector
from concircular.geometry.kinematics import speed
from concircular.integrator import IntegrationError, IntegrationSettings, KinematicState, integrate


def circle_state(cache, x, v, kappa):
    pg = cache.at(x)
    e = np.array([0.0, 1.0])
    u = v * e / speed(pg, e)
    n = pg.ginv @ star_vector(pg, u)
    w = kappa * v * v * n / speed(pg, n)
    return KinematicState(0.0, x, u, w - np.einsum("ilj,l,j->i", pg.gamma, u, u))


def geodesic_state(cache, x, u):
    u = np.asarray(u, dtype=float)
    return KinematicState(0.0, x, u, -np.einsum("ilj,l,j->i", cache.at(x).gamma, u, u))


def report(label, cache, init, t_end):
    cfg = IntegrationSettings(method="rk45", tol=1e-10, t_end=t_end, max_steps=10 ** 6, m=1.0)
    try:
        t = integrate(cache, init, cfg)
        note = ""
    except IntegrationError as exc:
        t, note = exc.trajectory, f"  stopped: {exc}"
    print(f"{label:38s} samples={len(t):5d} s={t.s[-1]:7.3f} k0={t.k[0]:+.6f} "
          f"drift={t.k_drift():.2e} max k={t.k.max():.2e}{note}")


def main():
    S, H = sphere(1).cache(), hyperbolic().cache()
    for v in (2.5, 2.625):
        report(f"sphere circle v={v}", S, circle_state(S, (1.2, 0.3), v, -2.0), 12 / v)
    report("sphere circle at the equator", S, circle_state(S, (math.pi / 2, 0.0), 2.5, -2.0), 12 / 2.5)
    for v in (1.5, 1.575):
        report(f"half-plane circle v={v}", H, circle_state(H, (0.0, 1.0), v, -2.0), 12 / v)
    report("sphere geodesic", S, geodesic_state(S, (1.2, 0.3), (0.6, 0.8)), 0.9)
    report("half-plane geodesic", H, geodesic_state(H, (0.0, 1.0), (0.8, 0.6)), 2.0)
    # the opposite orientation reaches unbounded speed in finite parameter time
    report("sphere circle, opposite orientation", S, circle_state(S, (1.2, 0.3), 2.5, 2.0), 12 / 2.5)


if __name__ == "__main__":
    main()
