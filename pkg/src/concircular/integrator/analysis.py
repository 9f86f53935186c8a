"""Post-processing of sampled trajectories."""

import numpy as np


def circle_fit(points) -> tuple[np.ndarray, float, float]:
    """Algebraic (Kasa) least-squares circle: returns (centre, radius, rms radial error)."""
    p = np.asarray(points, dtype=float)
    M = np.column_stack((p[:, 0], p[:, 1], np.ones(len(p))))
    rhs = -(p[:, 0] ** 2 + p[:, 1] ** 2)
    (D, E, F), *_ = np.linalg.lstsq(M, rhs, rcond=None)
    centre = np.array([-D / 2, -E / 2])
    radius = float(np.sqrt(centre @ centre - F))
    rms = float(np.sqrt(np.mean((np.linalg.norm(p - centre, axis=1) - radius) ** 2)))
    return centre, radius, rms
