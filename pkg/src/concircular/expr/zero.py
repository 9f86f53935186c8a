"""Zero testing: exact canonical path first, seeded numeric probing as fallback.

The canonical form decides zero exactly for rational expressions.  With
square roots or trig atoms present a nonzero canonical numerator may still
vanish identically (e.g. ``sqrt(a)*sqrt(b) - sqrt(a*b)``), so the
expression is then probed at ``n_points`` seeded random points.

False accepts: a nonzero analytic function can only pass if all probe
points land within ``tol`` of its zero set.  For the rational-in-radicals
class used here that set has measure zero, so with 1000 independent points
the false-accept probability is negligible unless the function is itself
smaller than ``tol`` on the whole probe box.
"""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass

import numpy as np

from .algebra import Expression, JetVariable, NegativeRadicand, Parameter

PROBE_POINTS = 1000
PROBE_TOL = 1e-10
DEFAULT_SEED = 20240611
_seed: ContextVar[int] = ContextVar("probe_seed", default=DEFAULT_SEED)


@contextmanager
def probe_seed(seed: int):
    """Use ``seed`` for every probe inside the block (context-local, thread safe)."""
    token = _seed.set(int(seed))
    try:
        yield
    finally:
        _seed.reset(token)


@dataclass(frozen=True)
class ZeroDecision:
    value: bool
    path: str  # "symbolic" or "probe"
    max_residual: float = 0.0

    def __bool__(self):
        return self.value


def probe_points(variables, n: int = PROBE_POINTS, seed: int | None = None) -> dict:
    """Seeded random assignment for ``variables``.

    Velocity u has norm in [0.5, 2] and a uniform direction, positions lie in
    [0.5, 1.5] (inside the sphere and half-plane charts), higher jet levels in
    [-1, 1] and the mass in [0.5, 3].
    """
    seed = _seed.get() if seed is None else seed
    rng = np.random.default_rng(seed)
    radius = rng.uniform(0.5, 2.0, n)
    angle = rng.uniform(0.0, 2 * np.pi, n)
    base = {
        JetVariable(0, 1): radius * np.cos(angle),
        JetVariable(0, 2): radius * np.sin(angle),
        JetVariable(-1, 1): rng.uniform(0.5, 1.5, n),
        JetVariable(-1, 2): rng.uniform(0.5, 1.5, n),
        Parameter("m"): rng.uniform(0.5, 3.0, n),
    }
    out = {}
    for v in sorted(variables, key=lambda a: a.sort_key):
        if v in base:
            out[v] = base[v]
        else:
            # independent stream per variable so adding a variable never shifts the others
            sub = np.random.default_rng([seed, *map(abs, hash_key(v))])
            out[v] = sub.uniform(-1.0, 1.0, n)
    return out


def hash_key(v) -> tuple:
    if isinstance(v, JetVariable):
        return (v.level + 2, v.index)
    return tuple(ord(c) for c in v.name)


def probe_residual(e: Expression, n: int = PROBE_POINTS, seed: int | None = None) -> float:
    """Max |e| over the probe points (nan-valued points are skipped)."""
    pts = probe_points(e.free_variables(), n, seed)
    with np.errstate(all="ignore"):
        try:
            vals = np.broadcast_to(np.asarray(e.evaluate(pts), dtype=float), (n,))
        except NegativeRadicand:
            vals = _pointwise(e, pts, n)
    finite = vals[np.isfinite(vals)]
    if finite.size < n // 2:
        return float("inf")
    return float(np.max(np.abs(finite))) if finite.size else 0.0


def _pointwise(e, pts, n):
    out = np.full(n, np.nan)
    for k in range(n):
        try:
            out[k] = e.evaluate({v: a[k] for v, a in pts.items()})
        except (NegativeRadicand, ZeroDivisionError):
            pass
    return out


def is_zero(e: Expression, n: int = PROBE_POINTS, tol: float = PROBE_TOL, seed: int | None = None) -> ZeroDecision:
    """Decide whether ``e`` vanishes identically on the probe domain."""
    if e.is_zero_canonical():
        return ZeroDecision(True, "symbolic", 0.0)
    if not e.has_transcendentals():
        # canonical rational form is exact: nonzero numerator means nonzero function
        return ZeroDecision(False, "symbolic", probe_residual(e, 16, seed))
    r = probe_residual(e, n, seed)
    return ZeroDecision(r < tol, "probe", r)
