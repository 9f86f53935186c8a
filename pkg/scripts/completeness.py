"""Geodesic circles in the variational gauge satisfy the Euler-Poisson equation pointwise."""

import argparse

from concircular.geometry import load_metric
from concircular.integrator import IntegrationSettings, KinematicState, integrate, write_csv


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--metric", default="sphere(1)")
    p.add_argument("--ic", default="1.2,0.3,0.75,2.5,0,0")
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--out", default=None)
    args = p.parse_args()

    ic = [float(v) for v in args.ic.split(",")]
    cache = load_metric(args.metric).cache()
    init = KinematicState(0.0, ic[0:2], ic[2:4], ic[4:6])
    for gauge in ("variational", "arc-length"):
        t = integrate(cache, init, IntegrationSettings(method="rk45", tol=1e-10, t_end=args.t_end, max_steps=10 ** 6,
                                                       equation="geocircle", gauge=gauge, m=args.m))
        print(f"{gauge:12s} samples={len(t):5d} s={t.s[-1]:.3f} k-drift={t.k_drift():.2e} "
              f"sup residual={t.max_residual():.2e}")
        if args.out and gauge == "variational":
            write_csv(t, args.out)


if __name__ == "__main__":
    main()
