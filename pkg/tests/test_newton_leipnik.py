"""Tests for the vector field, Jacobian, dissipativity, and equilibria."""

import math

import numpy as np
import pytest

from fracdyn import (
    Equilibrium,
    SystemParams,
    divergence,
    equilibria,
    jacobian,
    vector_field,
    volume_factor,
)

P = SystemParams(a=0.4, alpha=0.175)


def test_params_validation():
    with pytest.raises(ValueError):
        SystemParams(a=float("nan"))
    with pytest.raises(ValueError):
        SystemParams(d=(0.1, 0.1))
    with pytest.raises(ValueError):
        SystemParams(d=(0.1, -0.1, 0.1))
    assert SystemParams(d=[0, 0, 0]).d == (0.0, 0.0, 0.0)


def test_vector_field_origin_and_hand_substitution():
    assert np.all(vector_field(P, [0.0, 0.0, 0.0]) == 0.0)
    # hand substitution at u = (0.349, 0, -0.3):
    # f1 = -0.4*0.349 + 0 + 0 = -0.1396
    # f2 = -0.349 - 0 + 5*0.349*(-0.3) = -0.8725
    # f3 = 0.175*(-0.3) - 0 = -0.0525
    f = vector_field(P, [0.349, 0.0, -0.3])
    assert f == pytest.approx([-0.1396, -0.8725, -0.0525], abs=1e-12)


def test_vector_field_vectorized_matches_pointwise():
    rng = np.random.default_rng(5)
    u = rng.uniform(-0.5, 0.5, size=(3, 40))
    block = vector_field(P, u)
    assert block.shape == (3, 40)
    for j in range(40):
        assert block[:, j] == pytest.approx(vector_field(P, u[:, j]), rel=1e-15)


def test_vector_field_symmetry_equivariance():
    # S(u1,u2,u3) = (-u1,-u2,u3) maps trajectories to trajectories
    rng = np.random.default_rng(17)
    S = np.array([-1.0, -1.0, 1.0])
    for _ in range(50):
        u = rng.uniform(-1.0, 1.0, 3)
        lhs = vector_field(P, S * u)
        rhs = S * vector_field(P, u)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_jacobian_closed_form_and_finite_differences():
    assert np.array_equal(
        jacobian(P, [0.0, 0.0, 0.0]),
        np.array([[-0.4, 1.0, 0.0], [-1.0, -0.4, 0.0], [0.0, 0.0, 0.175]]),
    )
    # oracle: central differences, h = 1e-6
    rng = np.random.default_rng(23)
    h = 1e-6
    for _ in range(100):
        u = rng.uniform(-1.0, 1.0, 3)
        J = jacobian(P, u)
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            col = (vector_field(P, u + e) - vector_field(P, u - e)) / (2 * h)
            assert np.max(np.abs(J[:, j] - col)) <= 1e-6


def test_divergence_value_and_trace_identity():
    assert divergence(P) == pytest.approx(-0.625, abs=0.0)
    assert divergence(SystemParams(a=0.1, alpha=0.5)) == 0.0
    rng = np.random.default_rng(31)
    for _ in range(10):
        u = rng.uniform(-2.0, 2.0, 3)
        assert np.trace(jacobian(P, u)) == pytest.approx(divergence(P), abs=1e-12)


def test_volume_factor():
    assert volume_factor(P, 0.0) == 1.0
    assert volume_factor(P, 1.0) == pytest.approx(math.exp(-0.625), rel=1e-14)
    assert volume_factor(P, 1.0) == pytest.approx(0.53526, abs=1e-5)
    ts = np.linspace(0.0, 5.0, 7)
    vals = [volume_factor(P, float(t)) for t in ts]
    assert all(a > b for a, b in zip(vals, vals[1:]))  # contraction
    with pytest.raises(ValueError):
        volume_factor(P, -0.1)


def _refine_mpmath(point, digits=40):
    """Independent high-precision Newton refinement of a root."""
    import mpmath
    with mpmath.workdps(digits):
        a, al = mpmath.mpf("0.4"), mpmath.mpf("0.175")
        f = lambda u: mpmath.matrix([
            -a * u[0] + u[1] + 10 * u[1] * u[2],
            -u[0] - mpmath.mpf("0.4") * u[1] + 5 * u[0] * u[2],
            al * u[2] - 5 * u[0] * u[1],
        ])
        u = mpmath.matrix([mpmath.mpf(repr(float(x))) for x in point])
        for _ in range(50):
            J = mpmath.matrix(3, 3)
            J[0, 0], J[0, 1], J[0, 2] = -a, 1 + 10 * u[2], 10 * u[1]
            J[1, 0], J[1, 1], J[1, 2] = -1 + 5 * u[2], mpmath.mpf("-0.4"), 5 * u[0]
            J[2, 0], J[2, 1], J[2, 2] = -5 * u[1], -5 * u[0], al
            step = mpmath.lu_solve(J, -f(u))
            u = u + step
            if mpmath.norm(step) < mpmath.mpf(10) ** (-digits + 5):
                break
        return np.array([float(u[0]), float(u[1]), float(u[2])])


def test_equilibria_canonical_five():
    res = equilibria(P)
    assert len(res) == 5
    assert res.complete
    pts = res.coordinates()
    # the origin is always included
    assert any(np.all(pt == 0.0) for pt in pts)
    # every residual honors the construction bound
    assert all(eq.residual <= 1e-8 for eq in res)
    # oracle: 40-digit Newton refinement from each returned point agrees to
    # double precision, i.e. the roots are genuine and fully converged
    for pt in pts:
        refined = _refine_mpmath(pt)
        assert np.max(np.abs(pt - refined)) <= 1e-12


def test_equilibria_symmetry_pairing():
    res = equilibria(P)
    pts = res.coordinates()
    S = np.array([-1.0, -1.0, 1.0])
    for pt in pts:
        mirrored = S * pt
        assert any(np.max(np.abs(mirrored - q)) <= 1e-9 for q in pts)


def test_equilibria_paired_jacobians_share_spectra():
    res = equilibria(P)
    pts = res.coordinates()
    S = np.array([-1.0, -1.0, 1.0])
    for pt in pts:
        mate = next(q for q in pts if np.max(np.abs(S * pt - q)) <= 1e-9)
        ev1 = np.sort_complex(np.linalg.eigvals(jacobian(P, pt)))
        ev2 = np.sort_complex(np.linalg.eigvals(jacobian(P, mate)))
        assert np.max(np.abs(ev1 - ev2)) <= 1e-8


def test_equilibria_deterministic_and_deduplicated():
    a = equilibria(P).coordinates()
    b = equilibria(P).coordinates()
    assert np.array_equal(a, b)
    # feeding duplicate seeds cannot create duplicate roots
    res = equilibria(P, seeds=[(0.0, 0.0, 0.0)] * 8 + [(0.2, 0.0, 0.2)] * 8)
    pts = res.coordinates()
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            assert np.max(np.abs(pts[i] - pts[j])) > 1e-6


def test_equilibrium_residual_gate():
    with pytest.raises(ValueError):
        Equilibrium(point=np.array([0.1, 0.1, 0.1]), residual=1.0)
    with pytest.raises(ValueError):
        Equilibrium(point=np.array([np.inf, 0.0, 0.0]), residual=0.0)
