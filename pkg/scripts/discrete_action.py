"""First variation of the discretised action against the contraction of the source form."""

import math
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

import oracles  # noqa: E402
from concircular.expr import JetVariable  # noqa: E402
from concircular.variational import theorem_source  # noqa: E402

JET_ARGS = [JetVariable(0, 1), JetVariable(0, 2), JetVariable(1, 1), JetVariable(1, 2),
            JetVariable(2, 1), JetVariable(2, 2)]


def main(m=1.0, seed=7, hs=(1e-2, 5e-3, 2.5e-3, 1.25e-3)):
    source = [e.lambdify(JET_ARGS, "numpy") for e in theorem_source(m).E]
    path = oracles.SeededPath(seed)
    rng = np.random.default_rng(seed)
    lagrangian = lambda u, du: oracles.eq1_lagrangian_numeric(u, du, m)  # noqa: E731
    errs = []
    for n in range(20):
        amp, centre, width = rng.normal(size=2), rng.uniform(0.3, 0.7), rng.uniform(0.1, 0.2)
        exact = oracles.source_contraction(path, source, amp, centre, width)
        row = [abs(oracles.discrete_variation(path, lagrangian, h, amp, centre, width) - exact) for h in hs]
        errs.append(row)
        orders = " ".join(f"{math.log2(a / b):5.2f}" for a, b in zip(row, row[1:]))
        print(f"{n:2d} exact={exact:+.4e} err(h_min)={row[-1]:.2e} orders {orders}")
    rms = np.sqrt(np.mean(np.array(errs) ** 2, axis=0))
    print("rms orders", " ".join(f"{math.log2(a / b):.3f}" for a, b in zip(rms, rms[1:])))


if __name__ == "__main__":
    main()
