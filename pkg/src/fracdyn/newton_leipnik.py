"""The Newton-Leipnik vector field, its Jacobian, and equilibrium location.

The system is

    du1/dt = -a*u1 + u2 + 10*u2*u3
    du2/dt = -u1 - 0.4*u2 + 5*u1*u3
    du3/dt = alpha*u3 - 5*u1*u2

with fixed coupling coefficients 10, 5, 5 and damping 0.4; only `a` and
`alpha` are free parameters.  It is equivariant under
S(u1, u2, u3) = (-u1, -u2, u3), so nontrivial equilibria come in pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SystemParams:
    """Model parameters; `d` holds per-component diffusivities for the
    spatially extended variant (ignored by the pointwise operations)."""

    a: float = 0.4
    alpha: float = 0.175
    d: tuple = (0.1, 0.1, 0.1)

    def __post_init__(self):
        for name in ("a", "alpha"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValueError(f"{name} must be a finite number, got {v!r}")
        d = tuple(float(x) for x in self.d)
        if len(d) != 3:
            raise ValueError(f"d must have 3 entries, got {len(d)}")
        for x in d:
            if not math.isfinite(x) or x < 0.0:
                raise ValueError(f"diffusivities must be finite and >= 0, got {x!r}")
        object.__setattr__(self, "d", d)


def vector_field(p: SystemParams, u) -> np.ndarray:
    """Right-hand side f(u).  `u` may be shape (3,) or (3, n): the field is
    applied nodewise along the trailing axis."""
    u = np.asarray(u, dtype=float)
    u1, u2, u3 = u[0], u[1], u[2]
    return np.stack([
        -p.a * u1 + u2 + 10.0 * u2 * u3,
        -u1 - 0.4 * u2 + 5.0 * u1 * u3,
        p.alpha * u3 - 5.0 * u1 * u2,
    ])


def jacobian(p: SystemParams, u) -> np.ndarray:
    """Jacobian of the vector field at a single state, shape (3, 3)."""
    u = np.asarray(u, dtype=float).ravel()
    if u.shape != (3,):
        raise ValueError(f"expected a single 3-state, got shape {u.shape}")
    u1, u2, u3 = u
    return np.array([
        [-p.a, 1.0 + 10.0 * u3, 10.0 * u2],
        [-1.0 + 5.0 * u3, -0.4, 5.0 * u1],
        [-5.0 * u2, -5.0 * u1, p.alpha],
    ])


def divergence(p: SystemParams) -> float:
    """Trace of the Jacobian; state-independent for this field."""
    return p.alpha - p.a - 0.4


def volume_factor(p: SystemParams, t: float) -> float:
    """Phase-volume contraction factor exp(divergence * t) at time t >= 0."""
    if not (t >= 0.0):
        raise ValueError(f"t must be >= 0, got {t!r}")
    return math.exp(divergence(p) * t)


_RESIDUAL_LIMIT = 1e-8


@dataclass(frozen=True)
class Equilibrium:
    """A root of the vector field together with its residual norm."""

    point: np.ndarray
    residual: float

    def __post_init__(self):
        pt = np.asarray(self.point, dtype=float).ravel()
        if pt.shape != (3,) or not np.isfinite(pt).all():
            raise ValueError("equilibrium point must be a finite 3-vector")
        pt.flags.writeable = False
        object.__setattr__(self, "point", pt)
        if not (0.0 <= self.residual <= _RESIDUAL_LIMIT):
            raise ValueError(
                f"residual {self.residual:g} exceeds limit {_RESIDUAL_LIMIT:g}"
            )


@dataclass(frozen=True)
class EquilibriaResult:
    points: tuple = field(default=())
    complete: bool = True  # False if any Newton run failed to converge

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def coordinates(self) -> np.ndarray:
        return np.array([eq.point for eq in self.points])


# Default Newton seeds: a small lattice around the attractor region plus the
# symmetry images of a few off-axis points.  The canonical parameter set has
# five roots; extra seeds only cost a handful of iterations each.
_DEFAULT_SEEDS = [
    (x, y, z)
    for x in (-0.3, 0.0, 0.3)
    for y in (-0.3, 0.0, 0.3)
    for z in (-0.3, 0.0, 0.3)
] + [
    (-0.03, 0.12, -0.11), (0.03, -0.12, -0.11),
    (0.24, 0.03, 0.21), (-0.24, -0.03, 0.21),
]


def equilibria(p: SystemParams, seeds=None, tol: float = 1e-12) -> EquilibriaResult:
    """Locate equilibria by damped Newton iteration from a seed set.

    Returns the distinct converged roots (deduplicated at 1e-6 separation)
    in a deterministic order: sorted by u3, then u1, then u2.  `complete`
    is False if any seed failed to converge, signalling that the root list
    may be missing members.
    """
    if seeds is None:
        seeds = _DEFAULT_SEEDS
    found = [np.zeros(3)]  # the origin is a root for every parameter set
    complete = True
    for seed in seeds:
        root = _newton_root(p, np.asarray(seed, dtype=float), tol)
        if root is None:
            complete = False
            continue
        if all(np.max(np.abs(root - r)) > 1e-6 for r in found):
            found.append(root)
    found.sort(key=lambda r: (round(r[2], 9), round(r[0], 9), round(r[1], 9)))
    pts = tuple(
        Equilibrium(point=r, residual=float(np.linalg.norm(vector_field(p, r))))
        for r in found
    )
    return EquilibriaResult(points=pts, complete=complete)


def _newton_root(p, x, tol, max_iter=100):
    fx = vector_field(p, x)
    norm = np.linalg.norm(fx)
    for _ in range(max_iter):
        if norm <= tol:
            return x
        try:
            step = np.linalg.solve(jacobian(p, x), -fx)
        except np.linalg.LinAlgError:
            return None
        # backtracking: halve until the residual actually drops
        lam = 1.0
        for _ in range(25):
            x_new = x + lam * step
            f_new = vector_field(p, x_new)
            n_new = np.linalg.norm(f_new)
            if np.isfinite(n_new) and n_new < norm:
                break
            lam *= 0.5
        else:
            return None
        x, fx, norm = x_new, f_new, n_new
    return x if norm <= tol else None
