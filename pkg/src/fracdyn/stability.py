"""Linear stability tools for fractional-order systems.

Two conditions are implemented.  For a commensurate order delta in (0, 1],
an equilibrium with Jacobian J is asymptotically stable iff every eigenvalue
satisfies |arg(lambda)| > delta*pi/2 (strictly).  For incommensurate rational
orders l_i/m_i the same geometry applies to the roots of the generalised
characteristic polynomial det(diag(s^(m*delta_i)) - J) with the sharper
sector bound pi/(2m), m = lcm(m_i).

A third group of helpers covers the diffusion-coupled linear error system
used for master-slave synchronisation: per spatial Fourier mode the closed
loop reduces to a 3x3 block whose eigenvalues are available in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as npoly

from .fractional import as_order
from .newton_leipnik import SystemParams


@dataclass
class StabilityReport:
    """Eigenvalue geometry of one Jacobian.

    `worst_arg` is min_i |arg(lambda_i)| and `margin` = (2/pi)*worst_arg,
    so the commensurate system of order delta is stable iff delta < margin.
    A margin above 1 means stable even in the integer-order limit.
    """

    eigenvalues: np.ndarray
    worst_arg: float
    margin: float
    stable_at: dict = field(default_factory=dict)

    def is_stable(self, order) -> bool:
        delta = as_order(order)
        ok = bool(self.worst_arg > delta * math.pi / 2.0)
        self.stable_at[delta] = ok
        return ok


def matignon_margin(jac) -> StabilityReport:
    """Eigenvalues of `jac` and the widest stable order range they allow."""
    jac = np.asarray(jac, dtype=float)
    if jac.shape != (3, 3) or not np.isfinite(jac).all():
        raise ValueError(f"expected a finite 3x3 Jacobian, got shape {jac.shape}")
    eig = np.linalg.eigvals(jac)
    worst = float(np.min(np.abs(np.angle(eig))))
    return StabilityReport(
        eigenvalues=eig[np.argsort(np.abs(np.angle(eig)))],
        worst_arg=worst,
        margin=2.0 * worst / math.pi,
    )


@dataclass(frozen=True)
class DengResult:
    """Outcome of the rational-order sector test.  `coeffs` holds the
    ascending coefficients of the characteristic polynomial so callers can
    audit root residuals."""

    stable: bool
    min_arg: float
    bound: float  # pi/(2m)
    m: int
    degree: int
    roots: np.ndarray
    coeffs: np.ndarray


def deng_stable(jac, orders) -> DengResult:
    """Sector test for incommensurate rational orders.

    `orders` must be three exact rationals in (0, 1] (Fraction, int, or a
    string like "17/20"); floats are rejected because the test depends on
    the exact common denominator.  With m = lcm(m_i) and a_i = m*delta_i,
    the polynomial

        P(s) = det(diag(s^a_1, s^a_2, s^a_3) - J)

    has degree a_1+a_2+a_3, and the equilibrium is asymptotically stable iff
    every root satisfies |arg(s)| > pi/(2m).  Roots come from the companion
    matrix of P, whose cost grows like the cube of the degree; m is capped
    at 1000.
    """
    jac = np.asarray(jac, dtype=float)
    if jac.shape != (3, 3) or not np.isfinite(jac).all():
        raise ValueError(f"expected a finite 3x3 Jacobian, got shape {jac.shape}")
    fracs = [_as_fraction(o) for o in orders]
    if len(fracs) != 3:
        raise ValueError(f"expected 3 orders, got {len(fracs)}")
    for f in fracs:
        if not (0 < f <= 1):
            raise ValueError(f"orders must lie in (0, 1], got {f}")
    m = math.lcm(*(f.denominator for f in fracs))
    if m > 1000:
        raise ValueError(f"common denominator {m} exceeds the cap of 1000")
    a = [int(f * m) for f in fracs]

    def mono(power: int, const: float) -> np.ndarray:
        # ascending coefficients of s^power - const
        c = np.zeros(power + 1)
        c[0] = -const
        c[power] = 1.0
        return c

    J = jac
    p1, p2, p3 = mono(a[0], J[0, 0]), mono(a[1], J[1, 1]), mono(a[2], J[2, 2])
    det = npoly.polymul(npoly.polymul(p1, p2), p3)
    det = _polysub(det, J[1, 2] * J[2, 1] * p1)
    det = _polysub(det, J[0, 1] * J[1, 0] * p3)
    det = _polysub(det, J[0, 2] * J[2, 0] * p2)
    const = J[0, 1] * J[1, 2] * J[2, 0] + J[0, 2] * J[1, 0] * J[2, 1]
    det[0] -= const
    roots = npoly.polyroots(det)
    if np.min(np.abs(roots)) < 1e-10:
        raise ValueError("characteristic polynomial has a root at the origin; "
                         "the sector test cannot classify this equilibrium")
    args = np.abs(np.angle(roots))
    order_idx = np.argsort(args)
    min_arg = float(args[order_idx[0]])
    bound = math.pi / (2.0 * m)
    return DengResult(
        stable=bool(min_arg > bound),
        min_arg=min_arg,
        bound=bound,
        m=m,
        degree=len(det) - 1,
        roots=roots[order_idx],
        coeffs=det,
    )


def _as_fraction(o) -> Fraction:
    if isinstance(o, float):
        raise TypeError(
            f"order {o!r} is a float; pass an exact rational (Fraction or "
            f"'l/m' string) since the test depends on the exact denominator"
        )
    return Fraction(o)


def _polysub(p, q):
    n = max(len(p), len(q))
    out = np.zeros(n)
    out[: len(p)] += p
    out[: len(q)] -= q
    return out


def neumann_spectrum(length: float, n_max: int) -> np.ndarray:
    """Laplacian eigenvalues (i*pi/L)^2, i = 0..n_max, for zero-flux
    boundaries on [0, L] (eigenfunctions cos(i*pi*x/L))."""
    if not (length > 0.0) or not math.isfinite(length):
        raise ValueError(f"length must be positive and finite, got {length!r}")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    i = np.arange(n_max + 1, dtype=float)
    return (i * math.pi / length) ** 2


@dataclass(frozen=True)
class ModeEigen:
    """Closed-form eigenvalues of one spatial mode of the linear error
    system.  xi1, xi2 solve

        xi^2 + ((d1+d2)*lam + 0.8)*xi + (d1*d2*lam^2 + 0.4*(d1+d2)*lam + 1.16) = 0,

    with discriminant (d1-d2)^2*lam^2 - 4, and xi3 = -d3*lam - 0.4 is always
    real.  The constants 0.8, 1.16, 0.4 come from the damping of the linear
    error field (both transverse channels damped at rate 0.4, unit rotational
    coupling), which the controller arranges at the canonical bifurcation
    parameter a = 0.4.
    """

    lam: float
    xi1: complex
    xi2: complex
    xi3: float

    def all_eigenvalues(self):
        return (self.xi1, self.xi2, complex(self.xi3))


def sync_mode_eigen(p: SystemParams, lam: float) -> ModeEigen:
    if not (lam >= 0.0) or not math.isfinite(lam):
        raise ValueError(f"mode eigenvalue must be >= 0 and finite, got {lam!r}")
    d1, d2, d3 = p.d
    b = (d1 + d2) * lam + 0.8
    disc = (d1 - d2) ** 2 * lam ** 2 - 4.0
    root = np.sqrt(complex(disc))
    return ModeEigen(
        lam=float(lam),
        xi1=complex(0.5 * (-b + root)),
        xi2=complex(0.5 * (-b - root)),
        xi3=float(-d3 * lam - 0.4),
    )


@dataclass(frozen=True)
class ModeCheck:
    index: int
    lam: float
    eigen: ModeEigen
    min_arg: float
    complex_branch: bool  # discriminant < 0, conjugate pair
    ok: bool


@dataclass(frozen=True)
class SyncModeReport:
    """Modewise sector check for the synchronisation error system.

    `satisfied` means every checked mode meets |arg(xi)| > delta*pi/2 and
    `worst` is the mode with the smallest margin.  Modes on the real branch
    (lam >= 2/|d1-d2|) need no checking: their roots are real and strictly
    negative (trace < 0, determinant > 0), so |arg| = pi.  `truncated`
    flags the d1 != d2 case where n_max stops short of the real-branch
    threshold, i.e. some complex-branch modes were not enumerated; with
    d1 = d2 every mode is on the complex branch and `all_modes_complex`
    is set instead.  Omitted high modes are always at least as stable as
    the retained ones because Re(xi) decreases monotonically in lam.
    """

    satisfied: bool
    delta: float
    bound: float  # delta*pi/2
    modes: tuple
    worst: ModeCheck
    n_max: int
    truncated: bool
    all_modes_complex: bool


def sync_condition_check(p: SystemParams, order, length: float,
                         n_max: int = 64) -> SyncModeReport:
    delta = as_order(order)
    bound = delta * math.pi / 2.0
    lams = neumann_spectrum(length, n_max)
    d1, d2, _ = p.d
    checks = []
    for i, lam in enumerate(lams):
        me = sync_mode_eigen(p, float(lam))
        args = [abs(np.angle(x)) for x in me.all_eigenvalues()]
        min_arg = float(min(args))
        checks.append(ModeCheck(
            index=i,
            lam=float(lam),
            eigen=me,
            min_arg=min_arg,
            complex_branch=bool((d1 - d2) ** 2 * lam ** 2 < 4.0),
            ok=bool(min_arg > bound),
        ))
    truncated = bool(d1 != d2
                     and (d1 - d2) ** 2 * lams[-1] ** 2 < 4.0)
    return SyncModeReport(
        satisfied=all(c.ok for c in checks),
        delta=delta,
        bound=bound,
        modes=tuple(checks),
        worst=min(checks, key=lambda c: c.min_arg),
        n_max=n_max,
        truncated=truncated,
        all_modes_complex=all(c.complex_branch for c in checks),
    )
