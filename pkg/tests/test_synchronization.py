"""Tests for the control law, the Lyapunov functional, and coupled runs."""

import math

import numpy as np
import pytest

from fracdyn import (
    Field,
    Grid1D,
    RDConfig,
    SyncConfig,
    SystemParams,
    TimeGrid,
    CaputoDiffusionStepper,
    control_law,
    default_initial_conditions,
    error_l2,
    error_sup,
    linear_error_rhs,
    lyapunov_V,
    run_sync,
    vector_field,
)

P = SystemParams(a=0.4, alpha=0.175)


# --------------------------------------------------------------- control law

def test_control_law_cancels_every_nonlinear_term():
    # the defining identity: f(v) + phi(u, v-u) - f(u) is the linear error
    # system, exactly, for arbitrary states (not just near synchrony)
    rng = np.random.default_rng(11)
    for _ in range(50):
        u = rng.normal(scale=2.0, size=3)
        v = rng.normal(scale=2.0, size=3)
        e = v - u
        closed = vector_field(P, v) + control_law(P, u, e) - vector_field(P, u)
        assert closed == pytest.approx(linear_error_rhs(P, e), abs=1e-12)


def test_control_law_nodewise_broadcast():
    rng = np.random.default_rng(12)
    u = rng.normal(size=(3, 7))
    e = rng.normal(size=(3, 7))
    stacked = np.stack([control_law(P, u[:, j], e[:, j]) for j in range(7)],
                       axis=1)
    assert np.array_equal(control_law(P, u, e), stacked)


def test_control_law_variant_defect_is_quadratic():
    # the e1e2 variant leaves a residual 5*e1*(e2 - e3) in component 2 only
    rng = np.random.default_rng(13)
    for _ in range(20):
        u = rng.normal(size=3)
        v = rng.normal(size=3)
        e = v - u
        closed = (vector_field(P, v)
                  + control_law(P, u, e, phi2_cross_term="e1e2")
                  - vector_field(P, u))
        defect = closed - linear_error_rhs(P, e)
        assert defect[0] == pytest.approx(0.0, abs=1e-12)
        assert defect[2] == pytest.approx(0.0, abs=1e-12)
        assert defect[1] == pytest.approx(-5.0 * e[0] * (e[1] - e[2]),
                                          abs=1e-12)


def test_control_law_rejects_unknown_variant():
    with pytest.raises(ValueError):
        control_law(P, np.zeros(3), np.zeros(3), phi2_cross_term="e2e3")


def test_control_law_zero_error_gives_zero_control():
    rng = np.random.default_rng(14)
    u = rng.normal(size=(3, 5))
    assert np.all(control_law(P, u, np.zeros((3, 5))) == 0.0)


# ---------------------------------------------------- norms and the functional

def test_lyapunov_uniform_field_closed_form():
    g = Grid1D(length=20.0, n_nodes=201)
    e = Field.uniform(g, (0.3, -0.4, 1.2))
    expected = 0.5 * 20.0 * (0.3 ** 2 + 0.4 ** 2 + 1.2 ** 2)
    assert lyapunov_V(e) == pytest.approx(expected, rel=1e-12)
    assert error_l2(e) == pytest.approx(math.sqrt(2.0 * expected), rel=1e-12)
    assert error_sup(e) == pytest.approx([0.3, 0.4, 1.2], abs=0.0)


def test_lyapunov_sine_profile_closed_form():
    # int sin^2(pi x/L) dx = L/2; the trapezoid rule hits this exactly
    # because the cos(2 pi x/L) remainder sums to zero on a uniform grid
    L = 20.0
    g = Grid1D(length=L, n_nodes=161)
    u = np.zeros((3, 161))
    u[0] = np.sin(math.pi * g.nodes() / L)
    e = Field(grid=g, u=u)
    assert lyapunov_V(e) == pytest.approx(L / 4.0, rel=1e-12)


# ------------------------------------------------------------------ run_sync

def _small_cfg(**kw):
    grid = Grid1D(length=20.0, n_nodes=41)
    tg = TimeGrid(0.0, 0.01, kw.pop("n_steps", 400))
    rd = RDConfig(params=P, orders=kw.pop("orders", (0.98,) * 3), grid=grid,
                  time=tg, snapshot_stride=kw.pop("snapshot_stride", 50))
    return SyncConfig(rd=rd, **kw)


def test_identical_initial_fields_stay_identical():
    grid = Grid1D(length=20.0, n_nodes=41)
    ic = default_initial_conditions(grid)
    cfg = _small_cfg(master_ic=ic, slave_ic=ic.copy(), n_steps=100)
    res = run_sync(cfg)
    assert np.array_equal(res.master, res.slave)
    assert np.all(res.l2 == 0.0)
    assert np.all(res.lyapunov == 0.0)


def test_default_slave_ic_is_scaled_master():
    cfg = _small_cfg(n_steps=10)
    master, slave = cfg.resolve_ics()
    assert np.array_equal(slave.u, 1.5 * master.u)


def test_controlled_error_equals_linear_error_field_run():
    # dual-route check: subtracting the two coupled steppers must agree with
    # one stepper marching the linear error system from e0 = v0 - u0,
    # because the scheme is affine in the reaction term
    cfg = _small_cfg(n_steps=200, snapshot_stride=200)
    res = run_sync(cfg)
    rd = cfg.rd
    m_ic, s_ic = cfg.resolve_ics()
    e_ic = Field(grid=rd.grid, u=s_ic.u - m_ic.u)
    st = CaputoDiffusionStepper(rd.orders, rd.params.d, rd.grid, rd.time, e_ic)
    for _ in range(rd.time.n_steps):
        st.advance(linear_error_rhs(rd.params, st.state))
    direct = res.slave[-1] - res.master[-1]
    assert np.max(np.abs(direct - st.state)) <= 1e-10


def test_lyapunov_nonincreasing_under_control():
    cfg = _small_cfg(n_steps=400)
    res = run_sync(cfg)
    v = res.lyapunov
    assert np.all(np.diff(v) <= 1e-14 * v[0])
    assert v[-1] < v[0]


def test_controller_off_keeps_systems_apart():
    # same mismatch, controller removed: the error must not quietly decay;
    # the controlled run contracts roughly like exp(-0.4 t)
    on = run_sync(_small_cfg(n_steps=1000))
    off = run_sync(_small_cfg(n_steps=1000, controller_enabled=False))
    assert on.l2[0] == off.l2[0]
    assert np.min(off.l2) >= 0.1 * off.l2[0]  # stays order one throughout
    assert on.l2[-1] <= 0.05 * on.l2[0]
    assert on.l2[-1] <= 0.1 * off.l2[-1]
    assert not off.controller_enabled


def test_snapshot_and_norm_bookkeeping():
    cfg = _small_cfg(n_steps=105, snapshot_stride=50, error_norm_stride=20)
    res = run_sync(cfg)
    # snapshots at 0, 50, 100 plus the forced final step 105
    assert res.times == pytest.approx([0.0, 0.5, 1.0, 1.05])
    assert res.master.shape == (4, 3, 41)
    # norms at 0, 20, ..., 100 plus the final step
    assert len(res.norm_times) == 7
    assert res.norm_times[-1] == pytest.approx(1.05)
    assert res.l2.shape == (7,) and res.sup.shape == (7, 3)
    st = res.state_at(1)
    assert st.t == pytest.approx(0.5)
    assert np.array_equal(st.error.u, res.slave[1] - res.master[1])
    assert res.error.shape == res.master.shape


def test_incommensurate_flag():
    assert not run_sync(_small_cfg(n_steps=5)).incommensurate
    res = run_sync(_small_cfg(n_steps=5, orders=(0.97, 0.98, 0.99)))
    assert res.incommensurate


def test_initial_norms_match_direct_evaluation():
    cfg = _small_cfg(n_steps=5)
    res = run_sync(cfg)
    m_ic, s_ic = cfg.resolve_ics()
    e0 = Field(grid=cfg.rd.grid, u=s_ic.u - m_ic.u)
    assert res.lyapunov[0] == pytest.approx(lyapunov_V(e0), rel=1e-14)
    assert res.sup[0] == pytest.approx(error_sup(e0), rel=1e-14)


def test_sync_config_validation():
    grid = Grid1D(length=20.0, n_nodes=41)
    tg = TimeGrid(0.0, 0.01, 10)
    rd = RDConfig(params=P, orders=(0.9,) * 3, grid=grid, time=tg)
    with pytest.raises(ValueError):
        SyncConfig(rd=rd, phi2_cross_term="bogus")
    with pytest.raises(ValueError):
        SyncConfig(rd=rd, error_norm_stride=0)
    other = Field.uniform(Grid1D(length=10.0, n_nodes=41), (0.1, 0.0, 0.0))
    with pytest.raises(ValueError):
        SyncConfig(rd=rd, master_ic=other)
