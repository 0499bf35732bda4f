"""Caputo fractional-derivative tools: L1 quadrature, a predictor-corrector
ODE solver of Adams-Bashforth-Moulton type, and a Mittag-Leffler evaluator.

Conventions used throughout: the Caputo derivative of order delta in (0, 1]
of u on [0, t] is

    D^delta u(t) = 1/Gamma(1-delta) * int_0^t u'(s) (t-s)^(-delta) ds,

which reduces to the classical first derivative at delta = 1.  All grids are
uniform in time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import mpmath


class DivergenceError(RuntimeError):
    """Raised when a trajectory leaves the finite range the solver can trust.

    Attributes carry the failing step index and the last time at which the
    state was still finite, so callers can restart with a smaller step.
    """

    def __init__(self, step: int, time: float, message: str = ""):
        self.step = step
        self.time = time
        super().__init__(message or f"state diverged at step {step} (t = {time:g})")


class InsufficientHistoryError(ValueError):
    """Raised when a quadrature needs more past samples than are stored."""


def gamma_fn(x: float) -> float:
    """Gamma function on (0, inf) via the Lanczos approximation (g = 7).

    Relative error is below 1e-13 on the range we use; a dedicated
    implementation keeps the weight formulas self-contained and lets the
    tests pin its accuracy explicitly.
    """
    if not (x > 0.0) or not math.isfinite(x):
        raise ValueError(f"gamma_fn requires finite x > 0, got {x!r}")
    # Lanczos coefficients for g = 7, n = 9.
    coef = (
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    )
    if x < 0.5:
        # Reflection keeps the series argument away from the pole at 0.
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    z = x - 1.0
    acc = coef[0]
    for i in range(1, 9):
        acc += coef[i] / (z + i)
    t = z + 7.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


@dataclass(frozen=True)
class FractionalOrder:
    """A Caputo differentiation order restricted to (0, 1]."""

    delta: float

    def __post_init__(self):
        d = self.delta
        if not isinstance(d, (int, float)) or not math.isfinite(d):
            raise ValueError(f"order must be a finite number, got {d!r}")
        if not (0.0 < d <= 1.0):
            raise ValueError(f"order must lie in (0, 1], got {d}")
        object.__setattr__(self, "delta", float(d))


def as_order(value) -> float:
    """Coerce a FractionalOrder or bare float to a validated float order."""
    if isinstance(value, FractionalOrder):
        return value.delta
    return FractionalOrder(value).delta


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid t_k = t0 + k*dt, k = 0..n_steps."""

    t0: float
    dt: float
    n_steps: int

    def __post_init__(self):
        if not math.isfinite(self.t0):
            raise ValueError("t0 must be finite")
        if not (self.dt > 0.0) or not math.isfinite(self.dt):
            raise ValueError(f"dt must be positive and finite, got {self.dt!r}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * self.n_steps

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_steps + 1)


class HistoryBuffer:
    """Append-only record of equally spaced samples of a scalar signal.

    The L1 quadrature needs the whole past, so the buffer never drops
    samples; storage grows by doubling.
    """

    def __init__(self, t0: float, dt: float, samples):
        if not (dt > 0.0) or not math.isfinite(dt):
            raise ValueError(f"dt must be positive and finite, got {dt!r}")
        samples = np.asarray(samples, dtype=float).ravel()
        if samples.size == 0:
            raise ValueError("need at least one initial sample")
        if not np.isfinite(samples).all():
            raise ValueError("samples must be finite")
        self.t0 = float(t0)
        self.dt = float(dt)
        self._buf = np.empty(max(16, 2 * samples.size))
        self._buf[: samples.size] = samples
        self._n = samples.size

    def __len__(self) -> int:
        return self._n

    @property
    def samples(self) -> np.ndarray:
        """Read-only view of the stored samples."""
        view = self._buf[: self._n]
        view.flags.writeable = False
        return view

    @property
    def t_last(self) -> float:
        return self.t0 + self.dt * (self._n - 1)

    def append(self, value: float) -> None:
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"sample must be finite, got {value!r}")
        if self._n == self._buf.size:
            grown = np.empty(2 * self._buf.size)
            grown[: self._n] = self._buf[: self._n]
            self._buf = grown
        self._buf[self._n] = value
        self._n += 1


def l1_weights(order, n: int) -> np.ndarray:
    """First n weights b_k = (k+1)^(1-delta) - k^(1-delta) of the L1 scheme.

    The weights are positive and strictly decreasing for delta < 1; at
    delta = 1 they collapse to (1, 0, 0, ...) and the scheme becomes the
    backward difference.
    """
    delta = as_order(order)
    if n < 1:
        raise ValueError(f"need n >= 1 weights, got {n}")
    k = np.arange(n + 1, dtype=float)
    powers = k ** (1.0 - delta)
    powers[0] = 0.0  # limit of k^(1-delta) as delta -> 1 from below
    return powers[1:] - powers[:-1]


def caputo_eval(history: HistoryBuffer, order, memory_window: int | None = None) -> float:
    """L1 estimate of the Caputo derivative at the buffer's final sample.

    With samples u^0..u^n (n >= 1) and tau = dt^delta * Gamma(2 - delta),

        D^delta u(t_n) ~= (1/tau) * sum_{j=0}^{n-1} b_j (u^(n-j) - u^(n-j-1)).

    Truncation error is O(dt^(2-delta)) for twice-differentiable signals.
    `memory_window`, if given, keeps only the most recent `memory_window`
    increments of the sum (short-memory approximation, off by default).
    """
    delta = as_order(order)
    n = len(history) - 1
    if n < 1:
        raise InsufficientHistoryError(
            "caputo_eval needs at least 2 samples (one increment)"
        )
    if memory_window is not None:
        if memory_window < 1:
            raise ValueError(f"memory_window must be >= 1, got {memory_window}")
        w = min(memory_window, n)
    else:
        w = n
    b = l1_weights(delta, w)
    u = history.samples
    increments = u[n - w + 1 : n + 1][::-1] - u[n - w : n][::-1]  # newest first
    tau = history.dt ** delta * gamma_fn(2.0 - delta)
    return float(b @ increments) / tau


def mittag_leffler(alpha: float, z: float, tol: float = 1e-14) -> float:
    """One-parameter Mittag-Leffler function E_alpha(z), alpha in (0, 1],
    |z| <= 50 (the series regime this oracle is tuned for).

    Evaluated from the defining series sum_k z^k / Gamma(alpha*k + 1) in
    arbitrary precision; the working precision is raised until consecutive
    refinements agree, which keeps the alternating-series cancellation for
    large negative z under control.  Absolute error well below 1e-10.
    """
    if not (0.0 < alpha <= 1.0) or not math.isfinite(alpha):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    if not math.isfinite(z) or abs(z) > 50.0:
        raise ValueError(f"z must be finite with |z| <= 50, got {z!r}")
    if z == 0.0:
        return 1.0

    def series(dps: int) -> mpmath.mpf:
        with mpmath.workdps(dps):
            zz = mpmath.mpf(z)
            a = mpmath.mpf(alpha)
            total = mpmath.mpf(0)
            term_mag_cap = mpmath.mpf(0)
            k = 0
            while True:
                term = zz ** k / mpmath.gamma(a * k + 1)
                total += term
                term_mag_cap = max(term_mag_cap, abs(term))
                # terms eventually decay factorially; stop once negligible
                # against both the partial sum and the largest term seen
                if k > 4 and abs(term) < mpmath.mpf(10) ** (-dps) * (
                    1 + abs(total) + term_mag_cap
                ):
                    break
                k += 1
                if k > 100000:
                    raise RuntimeError("Mittag-Leffler series failed to converge")
            return total

    dps = max(30, int(2.0 * abs(z)) + 30)
    prev = series(dps)
    for _ in range(8):
        dps *= 2
        cur = series(dps)
        if abs(cur - prev) <= tol * (1 + abs(cur)):
            return float(cur)
        prev = cur
    raise RuntimeError("Mittag-Leffler evaluation did not stabilise")


@dataclass
class OdeResult:
    """Trajectory on a uniform grid: times (n+1,), states (n+1, n_comp)."""

    times: np.ndarray
    states: np.ndarray
    orders: tuple = field(default=())

    def component(self, i: int) -> np.ndarray:
        return self.states[:, i]


_MAX_STATE = 1e6  # beyond this the power-law history sums are meaningless


def abm_solve(rhs, x0, orders, grid: TimeGrid,
              memory_window: int | None = None) -> OdeResult:
    """Fractional Adams-Bashforth-Moulton predictor-corrector solver.

    Integrates D^(delta_i) x_i = f_i(t, x) componentwise, allowing a
    different order per component (incommensurate systems).  `rhs(t, x)`
    must return an array of the same shape as `x`.

    Scheme: with h = dt and f^j = f(t_j, x^j),

      predictor  x_p = x^0 + h^d/Gamma(d+1) * sum_{j=0}^{n} c_{n+1-j} f^j,
                 c_m = m^d - (m-1)^d,
      corrector  x^{n+1} = x^0 + h^d/Gamma(d+2) *
                 (a_0 f^0 + sum_{j=1}^{n} d_{n+1-j} f^j + f(t_{n+1}, x_p)),
                 a_0 = n^(d+1) - (n-d)(n+1)^d,
                 d_m = (m+1)^(d+1) + (m-1)^(d+1) - 2 m^(d+1),

    applied per component with its own order d.  At d = 1 this reduces to
    the rectangle/trapezoid pair.  Error is O(dt^(1+delta)) locally and the
    cost is O(n_steps^2) from the history sums, evaluated as dot products
    against precomputed weight tables.

    `memory_window`, if given, truncates the history sums to the most
    recent `memory_window` steps (the initial-value terms are kept exactly).
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    ncomp = x0.size
    if ncomp == 0:
        raise ValueError("x0 must be non-empty")
    if not np.isfinite(x0).all():
        raise ValueError("x0 must be finite")
    deltas = _order_vector(orders, ncomp)
    if memory_window is not None and memory_window < 1:
        raise ValueError(f"memory_window must be >= 1, got {memory_window}")

    n = grid.n_steps
    times = grid.times()
    X = np.empty((n + 1, ncomp))
    F = np.empty((ncomp, n + 1))  # f history, component-major for row slicing
    X[0] = x0

    f0 = _eval_rhs(rhs, times[0], X[0], step=0, time=times[0])
    F[:, 0] = f0

    # Weight tables, stored reversed so that the slice aligned with the
    # newest history entries is contiguous (lets numpy hand the sum to BLAS).
    m = np.arange(n + 2, dtype=float)
    crev, drev, pred_scale, corr_scale, pd_tab, pd1_tab = [], [], [], [], [], []
    for d in deltas:
        pd = m ** d
        pd1 = m ** (d + 1.0)
        c = pd.copy()
        c[1:] = pd[1:] - pd[:-1]  # c[m] = m^d - (m-1)^d, c[0] unused
        dw = pd1[2:] + pd1[:-2] - 2.0 * pd1[1:-1]  # dw[m-1] = d_m, m = 1..n
        crev.append(c[::-1].copy())
        drev.append(dw[::-1].copy())
        pred_scale.append(grid.dt ** d / gamma_fn(d + 1.0))
        corr_scale.append(grid.dt ** d / gamma_fn(d + 2.0))
        pd_tab.append(pd)
        pd1_tab.append(pd1)

    Nc = n + 1  # len(crev[c]) - 1; crev[c][Nc - m] == c_m
    Nd = n - 1  # len(drev[c]) - 1; drev[c][Nd - (m-1)] == d_m
    xp = np.empty(ncomp)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n):
            lo = 0 if memory_window is None else max(0, k + 1 - memory_window)
            for c in range(ncomp):
                # predictor: sum_{j=lo}^{k} c_{k+1-j} f^j
                s = crev[c][Nc - (k + 1 - lo) : Nc] @ F[c, lo : k + 1]
                xp[c] = X[0, c] + pred_scale[c] * s
            _check_finite(xp, step=k + 1, time=times[k + 1])
            fp = _eval_rhs(rhs, times[k + 1], xp, step=k + 1, time=times[k])
            for c in range(ncomp):
                d = deltas[c]
                a0 = pd1_tab[c][k] - (k - d) * pd_tab[c][k + 1]
                inner = 0.0
                if k >= 1:
                    jlo = max(1, lo)
                    # sum_{j=jlo}^{k} d_{k+1-j} f^j
                    inner = drev[c][Nd - (k - jlo) : Nd + 1] @ F[c, jlo : k + 1]
                X[k + 1, c] = X[0, c] + corr_scale[c] * (
                    a0 * F[c, 0] + inner + fp[c]
                )
            _check_finite(X[k + 1], step=k + 1, time=times[k + 1])
            F[:, k + 1] = _eval_rhs(rhs, times[k + 1], X[k + 1],
                                    step=k + 1, time=times[k + 1])
    return OdeResult(times=times, states=X, orders=tuple(deltas))


def _order_vector(orders, ncomp: int) -> list[float]:
    if isinstance(orders, (FractionalOrder, float, int)):
        return [as_order(orders)] * ncomp
    vec = [as_order(o) for o in orders]
    if len(vec) != ncomp:
        raise ValueError(f"got {len(vec)} orders for {ncomp} components")
    return vec


def _eval_rhs(rhs, t, x, step, time):
    f = np.asarray(rhs(t, x), dtype=float).ravel()
    if f.shape != x.shape:
        raise ValueError(f"rhs returned shape {f.shape}, expected {x.shape}")
    if not np.isfinite(f).all():
        raise DivergenceError(step, time, f"rhs became non-finite at t = {t:g}")
    return f


def _check_finite(x, step, time):
    if not np.isfinite(x).all() or np.abs(x).max() > _MAX_STATE:
        raise DivergenceError(step, time)
