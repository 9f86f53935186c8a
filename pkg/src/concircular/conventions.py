"""Orientation and index conventions shared by the symbolic and numeric layers.

The Levi-Civita symbol is fixed as eps_12 = -1, eps_21 = +1.  With this
orientation the Euler-Poisson equation of ``eps_ij u^i du^j/|u|^3 - m|u|``
has the unit-speed circle through u = (1, 0), du = (0, 1) as an extremal
for m = 1 (the opposite orientation turns that state into a spiral).
The contravariant symbol e^{ij} has the same numeric entries.
"""

import numpy as np

EPS = ((0, -1), (1, 0))
EPS_ARRAY = np.array(EPS, dtype=float)


def eps(i: int, j: int) -> int:
    """eps_ij for 1-based indices."""
    return EPS[i - 1][j - 1]
