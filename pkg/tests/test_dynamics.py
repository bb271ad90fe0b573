import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilayer_gn.diagnostics import measure_phase_speed
from bilayer_gn.dynamics import (
    StepControl, bathymetry_terms, cfl_dt, rhs_flat_bottom, rhs_primitive, rhs_quasilinear,
    simulate, step_rk4,
)
from bilayer_gn.fields import (
    Bathymetry, FlatProfile, GaussianProfile, SinusoidProfile, State, derive, make_bathymetry,
)
from bilayer_gn.grid import PeriodicGrid
from bilayer_gn.regime import RegimeParams, compute_coefficients
from bilayer_gn.scenario import default_scenario

PROFILES = [
    FlatProfile(),
    GaussianProfile(center=np.pi, width=0.5, height=0.5),
    SinusoidProfile(k=2, height=0.4),
]


def params(**kw):
    base = dict(mu=0.04, eps=0.2, delta=1.0, gamma=0.0, beta=0.2)
    base.update(kw)
    return RegimeParams(**base)


def smooth_state(grid):
    x = grid.x * 2 * np.pi / grid.length
    return State(0.0, 0.4 * np.cos(x) + 0.2 * np.sin(2 * x), 0.5 * np.sin(x) - 0.3 * np.cos(3 * x))


@pytest.mark.parametrize("profile", PROFILES)
@pytest.mark.parametrize("rhs", [rhs_primitive, rhs_quasilinear])
def test_rest_is_a_fixed_point(profile, rhs, grid2pi):
    p = params(gamma=0.3, delta=1.2)
    bathy = make_bathymetry(grid2pi, profile)
    rest = State(0.0, np.zeros(grid2pi.n), np.zeros(grid2pi.n))
    out = rhs(grid2pi, rest, bathy, p, compute_coefficients(p))
    assert not out.dzeta.any() and not out.dv.any()


def test_flat_bottom_drops_every_bathymetry_term(grid2pi):
    p = params(beta=0.0, gamma=0.4, delta=1.3)
    c = compute_coefficients(p)
    bathy = make_bathymetry(grid2pi, SinusoidProfile(1, 0.8))
    st = smooth_state(grid2pi)
    for name, term in bathymetry_terms(grid2pi, st, bathy, p, c).items():
        assert np.all(term == 0), name
    a = rhs_primitive(grid2pi, st, bathy, p, c)
    b = rhs_flat_bottom(grid2pi, st, p, c)
    assert np.array_equal(a.dzeta, b.dzeta) and np.array_equal(a.dv, b.dv)


def test_gamma_zero_removes_density_terms(grid2pi):
    p = params()
    c = compute_coefficients(p)
    bathy = make_bathymetry(grid2pi, SinusoidProfile(1, 0.8))
    terms = bathymetry_terms(grid2pi, smooth_state(grid2pi), bathy, p, c)
    assert not terms["B_row2_source"].any()
    assert not derive(grid2pi, smooth_state(grid2pi), bathy, p, c).Q1bare.any()


def test_linear_phase_speed_k1():
    c = measure_phase_speed(params(beta=0.0), 1)
    exact = 1 / math.sqrt(1 + 0.04 / 3)
    assert exact == pytest.approx(0.9933993, abs=1e-7)
    assert c == pytest.approx(exact, rel=5e-3)


@pytest.mark.parametrize("gamma,delta", [(0.0, 1.0), (0.5, 1.5), (0.8, 0.6)])
def test_form_equivalence_refines(gamma, delta):
    p = params(gamma=gamma, delta=delta)
    c = compute_coefficients(p)
    errs = []
    for n in (128, 256, 512):
        g = PeriodicGrid(2 * np.pi, n)
        bathy = make_bathymetry(g, SinusoidProfile(1, 0.5))
        a = rhs_primitive(g, smooth_state(g), bathy, p, c)
        b = rhs_quasilinear(g, smooth_state(g), bathy, p, c)
        errs.append(max(np.abs(a.dzeta - b.dzeta).max(), np.abs(a.dv - b.dv).max()))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(rates - 2.0) <= 0.3), rates


def test_cfl_rest(grid2pi):
    p = params()
    c = compute_coefficients(p)
    rest = State(0.0, np.zeros(grid2pi.n), np.zeros(grid2pi.n))
    flat = Bathymetry.flat(grid2pi.n)
    df = derive(grid2pi, rest, flat, p, c)
    dt = cfl_dt(grid2pi, rest, df, p, c, StepControl(cfl=0.5))
    assert dt == pytest.approx(0.5 * grid2pi.dx, rel=1e-15)
    fine = grid2pi.refine()
    rest2 = State(0.0, np.zeros(fine.n), np.zeros(fine.n))
    df2 = derive(fine, rest2, Bathymetry.flat(fine.n), p, c)
    assert cfl_dt(fine, rest2, df2, p, c, StepControl(cfl=0.5)) == pytest.approx(dt / 2, rel=1e-15)


@settings(max_examples=40, deadline=None)
@given(scale=st.floats(0, 5), extra=st.floats(1, 3))
def test_larger_velocity_never_increases_dt(scale, extra):
    g = PeriodicGrid(2 * np.pi, 32)
    p = params(gamma=0.3, delta=1.4)
    c = compute_coefficients(p)
    bathy = make_bathymetry(g, SinusoidProfile(1, 0.3))
    zeta = 0.3 * np.cos(g.x)
    v = scale * np.sin(g.x)
    ctrl = StepControl()

    def dt_for(vel):
        s = State(0.0, zeta, vel)
        return cfl_dt(g, s, derive(g, s, bathy, p, c), p, c, ctrl)

    assert dt_for(extra * v) <= dt_for(v)


@pytest.mark.parametrize("profile", PROFILES)
def test_rest_preserved_over_many_steps(profile):
    g = PeriodicGrid(2 * np.pi, 16)
    p = params(gamma=0.2, delta=1.1)
    c = compute_coefficients(p)
    bathy = make_bathymetry(g, profile) if not isinstance(profile, GaussianProfile) else make_bathymetry(
        g, GaussianProfile(center=np.pi, width=1.6, height=0.5))
    s = State(0.0, np.zeros(g.n), np.zeros(g.n))
    for _ in range(10_000):
        s = step_rk4(g, s, bathy, p, c, 0.05)
    assert not s.zeta.any() and not s.v.any()
    assert s.t == pytest.approx(500.0)


def test_mass_conserved_per_step(grid2pi):
    p = params(gamma=0.5, delta=1.5)
    c = compute_coefficients(p)
    bathy = make_bathymetry(grid2pi, SinusoidProfile(1, 0.5))
    s = smooth_state(grid2pi)
    s = State(0.0, s.zeta + 0.1, s.v)
    m0 = grid2pi.dx * s.zeta.sum()
    for _ in range(20):
        s = step_rk4(grid2pi, s, bathy, p, c, 0.01)
        assert abs(grid2pi.dx * s.zeta.sum() - m0) <= 1e-13


def test_temporal_self_convergence_short_horizon():
    g = PeriodicGrid(2 * np.pi, 128)
    p = params(gamma=0.5, delta=1.5)
    c = compute_coefficients(p)
    bathy = make_bathymetry(g, SinusoidProfile(1, 0.5))
    from bilayer_gn.dynamics import integrate_fixed

    runs = [integrate_fixed(g, smooth_state(g), bathy, p, c, 1.0, 10 * 2**i) for i in range(4)]
    errs = [np.abs(runs[i].v - runs[i + 1].v).max() for i in range(3)]
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(rates - 4.0) <= 0.5), rates


def test_simulate_rest_scenario_stays_zero():
    sc = default_scenario(zeta__profile="rest", v__profile="rest", grid__n=128)
    res = simulate(sc)
    assert res.status == "completed"
    assert res.final_state.t == pytest.approx(sc.t_final)
    for snap in res.snapshots:
        assert not snap.zeta.any() and not snap.v.any()


def test_simulate_gaussian_completes(gaussian_scenario):
    res = simulate(gaussian_scenario)
    assert res.status == "completed"
    assert res.final_state.t == 5.0
    masses = np.array([d["mass"] for d in res.diagnostics])
    assert np.abs(masses - masses[0]).max() <= 1e-10


def test_simulate_halts_on_initial_depth_violation():
    sc = default_scenario(params__eps=0.2, zeta__amp=5.0)
    res = simulate(sc)
    assert res.status == "halted_H1"
    assert res.violation == "H1" and res.violation_time == 0.0
    assert res.steps == 0
