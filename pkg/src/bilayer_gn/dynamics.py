"""Time derivative of the model, RK4 stepping and full simulations.

The primitive form drives the integrator (one elliptic solve per stage);
the quasilinear form ``dU/dt = -A[U] dU/dx - B[U]`` is assembled term by
term for cross-validation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConditionViolation, NonFiniteSpeed, NonFiniteState, NumericalFailure
from .elliptic import TOperator, qfrak_apply
from .fields import Bathymetry, DerivedFields, State, derive
from .grid import PeriodicGrid, derivative
from .regime import ModelCoefficients, RegimeParams

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tendency:
    dzeta: np.ndarray
    dv: np.ndarray

    def max_abs(self) -> float:
        return float(max(np.abs(self.dzeta).max(), np.abs(self.dv).max()))


@dataclass
class StepControl:
    cfl: float = 0.5
    t_final: float = 5.0
    dt: float | None = None

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")


def rhs_primitive(
    grid: PeriodicGrid,
    state: State,
    bathy: Bathymetry,
    params: RegimeParams,
    coeffs: ModelCoefficients,
) -> Tendency:
    df = derive(grid, state, bathy, params, coeffs)
    eps, beta, mu = params.eps, params.beta, params.mu
    zeta, v = state.zeta, state.v
    D = lambda u: derivative(grid, u)  # noqa: E731
    dz = D(zeta)
    dv_x = D(v)
    rhs2 = (
        -(params.gamma + params.delta) * df.q1 * dz
        - eps * df.q1 * D(df.q3 * v**2)
        - mu * eps * coeffs.kappa * D(dv_x**2)
        + mu * beta * coeffs.omega * dz * bathy.d2b
    )
    op = TOperator.from_fields(grid, df, params, coeffs)
    dzeta = -D(df.f * v)
    dv = op.solve(rhs2) - eps / 2 * coeffs.varsigma * D(v**2)
    return Tendency(dzeta, dv)


def rhs_quasilinear(
    grid: PeriodicGrid,
    state: State,
    bathy: Bathymetry,
    params: RegimeParams,
    coeffs: ModelCoefficients,
) -> Tendency:
    df = derive(grid, state, bathy, params, coeffs)
    eps, beta, gamma = params.eps, params.beta, params.gamma
    zeta, v = state.zeta, state.v
    dz = derivative(grid, zeta)
    dv_x = derivative(grid, v)
    row1 = -eps * df.fp * v * dz - df.f * dv_x + beta * bathy.db * df.g * v
    den = df.h1 + gamma * df.h2
    bottom = eps * gamma * beta * df.q1 * df.h1 * (df.h1 + df.h2) * v**2 * bathy.db / den**3
    inner = (
        df.Q0 * dz
        + df.Q1bare * dz
        + eps * qfrak_apply(grid, df, v, dv_x, params, coeffs)
        + bottom
    )
    op = TOperator.from_fields(grid, df, params, coeffs)
    row2 = -op.solve(inner) - eps * coeffs.varsigma * v * dv_x
    return Tendency(row1, row2)


def rhs_flat_bottom(
    grid: PeriodicGrid,
    state: State,
    params: RegimeParams,
    coeffs: ModelCoefficients,
) -> Tendency:
    """Primitive tendency with every bathymetry term deleted (flat-bottom model)."""
    eps, mu, gamma, delta = params.eps, params.mu, params.gamma, params.delta
    zeta, v = state.zeta, state.v
    X = eps * zeta
    h1 = 1 - X
    h2 = 1 / delta + X
    den = h1 + gamma * h2
    f = h1 * h2 / den
    fp = (h1**2 - gamma * h2**2) / den**2
    q1 = 1 + coeffs.kappa1 * X
    q2 = 1 + coeffs.kappa2 * X
    q3 = (fp - coeffs.varsigma) / 2
    D = lambda u: derivative(grid, u)  # noqa: E731
    dz = D(zeta)
    rhs2 = (
        -(gamma + delta) * q1 * dz
        - eps * q1 * D(q3 * v**2)
        - mu * eps * coeffs.kappa * D(D(v) ** 2)
    )
    op = TOperator(grid, q1, q2, mu * coeffs.nu)
    return Tendency(-D(f * v), op.solve(rhs2) - eps / 2 * coeffs.varsigma * D(v**2))


def bathymetry_terms(
    grid: PeriodicGrid,
    state: State,
    bathy: Bathymetry,
    params: RegimeParams,
    coeffs: ModelCoefficients,
) -> dict[str, np.ndarray]:
    """Every term of the model that carries the bottom (each has an explicit ``beta``)."""
    df = derive(grid, state, bathy, params, coeffs)
    beta, v = params.beta, state.v
    dz = derivative(grid, state.zeta)
    den = df.h1 + params.gamma * df.h2
    return {
        "depth_shift": beta * bathy.b,
        "q1_shift": coeffs.omega1 * beta * bathy.b,
        "q2_shift": coeffs.omega2 * beta * bathy.b,
        "Q0_shift": params.mu * beta * coeffs.omega * bathy.d2b,
        "forcing": params.mu * beta * coeffs.omega * dz * bathy.d2b,
        "B_row1": -beta * bathy.db * df.g * v,
        "B_row2_source": params.eps * params.gamma * beta * df.q1 * df.h1 * (df.h1 + df.h2) * v**2 * bathy.db / den**3,
        "dq3_shift": params.gamma * beta * bathy.db * df.h1 * (df.h1 + df.h2) / den**3,
    }


def max_speed(df: DerivedFields, v: np.ndarray, params: RegimeParams, coeffs: ModelCoefficients) -> float:
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.sqrt(df.Q0 * df.f / df.q1) + params.eps * (
            np.abs(coeffs.varsigma * v) + np.abs(df.fp * v)
        )
    c_max = float(np.max(c))
    if not np.isfinite(c_max) or c_max <= 0:
        raise NonFiniteSpeed(f"characteristic speed is not finite and positive: {c_max}")
    return c_max


def cfl_dt(grid, state, df: DerivedFields, params, coeffs, control: StepControl) -> float:
    return control.cfl * grid.dx / max_speed(df, state.v, params, coeffs)


def step_rk4(
    grid: PeriodicGrid,
    state: State,
    bathy: Bathymetry,
    params: RegimeParams,
    coeffs: ModelCoefficients,
    dt: float,
) -> State:
    def rhs(t, zeta, v):
        return rhs_primitive(grid, State(t, zeta, v), bathy, params, coeffs)

    t, z, v = state.t, state.zeta, state.v
    k1 = rhs(t, z, v)
    k2 = rhs(t + dt / 2, z + dt / 2 * k1.dzeta, v + dt / 2 * k1.dv)
    k3 = rhs(t + dt / 2, z + dt / 2 * k2.dzeta, v + dt / 2 * k2.dv)
    k4 = rhs(t + dt, z + dt * k3.dzeta, v + dt * k3.dv)
    z_new = z + dt / 6 * (k1.dzeta + 2 * k2.dzeta + 2 * k3.dzeta + k4.dzeta)
    v_new = v + dt / 6 * (k1.dv + 2 * k2.dv + 2 * k3.dv + k4.dv)
    out = State(t + dt, z_new, v_new)
    if not out.is_finite():
        raise NonFiniteState(f"non-finite values after step to t={out.t:.6g}")
    return out


def integrate_fixed(
    grid: PeriodicGrid,
    state: State,
    bathy: Bathymetry,
    params: RegimeParams,
    coeffs: ModelCoefficients,
    t_final: float,
    steps: int,
) -> State:
    """``steps`` equal RK4 steps from ``state.t`` to ``t_final`` (convergence studies)."""
    dt = (t_final - state.t) / steps
    for _ in range(steps):
        state = step_rk4(grid, state, bathy, params, coeffs, dt)
    return state


# -- simulations ------------------------------------------------------------

@dataclass
class SimulationResult:
    """In-memory output of :func:`simulate`; the CLI turns it into files."""

    status: str
    final_state: State
    snapshots: list[State] = field(default_factory=list)
    diagnostics: list[dict] = field(default_factory=list)
    energies: list = field(default_factory=list)
    steps: int = 0
    t_final: float = 0.0
    violation: str | None = None
    violation_location: int | None = None
    violation_time: float | None = None
    message: str = ""
    bottom_norms: dict = field(default_factory=dict)


_HALT_STATUS = {"H1": "halted_H1", "H2": "halted_H2", "H3": "halted_H3"}


def simulate(scenario, max_steps: int = 10_000_000) -> SimulationResult:
    """Advance a scenario to ``T / max(eps, beta)`` under CFL-limited RK4.

    Conditions H1-H3 and the energies are recorded every
    ``scenario.control.snapshot_stride`` steps (and at both ends); the run
    stops at the first monitor violation.
    """
    from .diagnostics import bottom_norms, check_conditions, energy

    grid = scenario.grid
    params = scenario.params
    coeffs = scenario.coefficients()
    bathy = scenario.bathymetry()
    ctrl = scenario.control
    state = scenario.initial_state()
    t_final = scenario.t_final
    result = SimulationResult(
        status="completed", final_state=state, t_final=t_final, bottom_norms=bottom_norms(grid, bathy)
    )

    def record(state: State, dt: float) -> bool:
        report = check_conditions(grid, state, bathy, params, coeffs, ctrl.thresholds)
        row = {
            "t": state.t,
            "mass": grid.dx * float(np.sum(state.zeta)),
            "E0": float("nan"),
            "Es": float("nan"),
            "min_h1": report.min_h1,
            "min_h2": report.min_h2,
            "min_q1": report.min_q1,
            "min_q2": report.min_q2,
            "min_H3": report.min_H3,
            "dt": dt,
        }
        if report.ok:
            er = energy(grid, state, state, bathy, params, coeffs, ctrl.s_energy)
            row["E0"], row["Es"] = er.E0, er.Es
            result.energies.append(er)
        result.snapshots.append(state)
        result.diagnostics.append(row)
        if not report.ok:
            cond = report.first_failed
            result.status = _HALT_STATUS[cond]
            result.violation = cond
            result.violation_location = report.first_violation_location
            result.violation_time = state.t
            result.message = f"{cond} violated at t={state.t:.6g}, index {report.first_violation_location}"
        return report.ok

    if not record(state, 0.0):
        return result
    control = StepControl(cfl=ctrl.cfl, t_final=t_final)
    step = 0
    try:
        while state.t < t_final and step < max_steps:
            df = derive(grid, state, bathy, params, coeffs)
            dt = cfl_dt(grid, state, df, params, coeffs, control)
            last = state.t + dt >= t_final * (1 - 1e-12)
            if last:
                dt = t_final - state.t
            state = step_rk4(grid, state, bathy, params, coeffs, dt)
            if last:
                state = State(t_final, state.zeta, state.v)
            step += 1
            result.final_state = state
            if step % ctrl.snapshot_stride == 0 or last:
                if not record(state, dt):
                    break
    except ConditionViolation as exc:
        result.status = _HALT_STATUS[exc.condition]
        result.violation = exc.condition
        result.violation_location = exc.location
        result.violation_time = state.t
        result.message = str(exc)
    except NumericalFailure as exc:
        result.status = "failed"
        result.violation_time = state.t
        result.message = str(exc)
    result.steps = step
    log.info("simulation %s after %d steps at t=%.6g", result.status, step, state.t)
    return result
