"""Unit circle under the Euler-Poisson equation of k - m|u|: conservation of k and H + k."""

import argparse
import time

import numpy as np

from concircular.geometry import euclidean
from concircular.integrator import IntegrationSettings, KinematicState, circle_fit, integrate, write_csv


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--steps", type=int, default=20000)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--out", default=None, help="optional CSV path")
    args = p.parse_args()

    start = time.perf_counter()
    traj = integrate(euclidean().cache(), KinematicState(0.0, (0, 0), (1, 0), (0, 1)),
                     IntegrationSettings(method="rk4", step=args.step, max_steps=args.steps, m=1.0))
    elapsed = time.perf_counter() - start
    centre, radius, rms = circle_fit(traj.x)
    print(f"samples        {len(traj)}")
    print(f"max |k - 1|    {np.max(np.abs(traj.k - 1)):.3e}")
    print(f"max |H + k|    {traj.h_plus_k():.3e}")
    print(f"circle fit     centre=({centre[0]:.3e}, {centre[1]:.3e}) radius={radius:.12f} rms={rms:.3e}")
    print(f"arc length     {traj.s[-1]:.6f}")
    print(f"seconds        {elapsed:.2f}")
    if args.out:
        write_csv(traj, args.out)


if __name__ == "__main__":
    main()
