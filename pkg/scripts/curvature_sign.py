"""Which sign of the curvature term makes the curved Euler-Poisson equation the variation of the action."""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

import oracles  # noqa: E402
from concircular.geometry import PointState, force_at, hyperbolic, sphere  # noqa: E402
from concircular.integrator.equations import myeq_expression  # noqa: E402


def path_factory(x0):
    def path(t):
        x = np.array([x0[0] + 0.3 * np.sin(t) + 0.1 * t, x0[1] + 0.5 * t + 0.1 * np.cos(2 * t)])
        u = np.array([0.3 * np.cos(t) + 0.1, 0.5 - 0.2 * np.sin(2 * t)])
        du = np.array([-0.3 * np.sin(t), -0.4 * np.cos(2 * t)])
        ddu = np.array([-0.3 * np.cos(t), 0.8 * np.sin(2 * t)])
        return x, u, du, ddu
    return path


def main(m=0.7):
    direction = np.array([0.3, -0.7])
    for name, cache, gsym, x0 in (("sphere", sphere(1).cache(), oracles.sphere_sympy(), (1.0, 0.3)),
                                  ("half-plane", hyperbolic().cache(), oracles.hyperbolic_sympy(), (0.2, 1.3))):
        geo = oracles.SympyGeometry(gsym)
        path = path_factory(x0)
        tf = np.linspace(0.4, 1.6, 4001)
        vals, flipped = [], []
        for t in tf:
            x, u, du, ddu = path(t)
            pg = cache.at(x)
            E = myeq_expression(pg, PointState.of(x, u, du), ddu, m)
            eta = oracles.bump(t, 1.0, 0.6) * direction
            vals.append(E @ eta)
            flipped.append((E + 2 * force_at(pg, u)) @ eta)
        print(f"{name}: contraction, chosen sign {np.trapezoid(vals, tf):+.6f}; "
              f"opposite sign {np.trapezoid(flipped, tf):+.6f}")
        for h in (4e-3, 2e-3, 1e-3):
            T = np.arange(0.0, 2.0 + h / 2, h)
            X = np.array([path(t)[0] for t in T])
            eta = oracles.bump(T, 1.0, 0.6)[:, None] * direction
            print(f"  h={h:g}: discrete variation {oracles.curved_discrete_variation(geo, X, h, eta, m):+.6f}")


if __name__ == "__main__":
    main()
