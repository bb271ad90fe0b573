"""Condition monitors, symmetrizer energies, growth-bound fits and order studies."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .elliptic import TOperator, qbar_apply, qbar_expansion, rbar_apply, rbar_expansion
from .errors import DegenerateLadder, EmptySeries
from .fields import Bathymetry, SinusoidProfile, State, derive, make_bathymetry, pointwise_fields
from .grid import PeriodicGrid, inner, lambda_s, sobolev_norm, spectral_derivative
from .regime import ModelCoefficients, RegimeParams, compute_coefficients


@dataclass(frozen=True)
class Thresholds:
    h01: float = 0.05
    h02: float = 0.05
    h03: float = 0.05


@dataclass(frozen=True)
class ConditionReport:
    min_h1: float
    min_h2: float
    min_q1: float
    min_q2: float
    min_H3: float
    ok_H1: bool
    ok_H2: bool
    ok_H3: bool
    first_violation_location: int | None = None

    @property
    def ok(self) -> bool:
        return self.ok_H1 and self.ok_H2 and self.ok_H3

    @property
    def first_failed(self) -> str | None:
        for name, ok in (("H1", self.ok_H1), ("H2", self.ok_H2), ("H3", self.ok_H3)):
            if not ok:
                return name
        return None


@dataclass(frozen=True)
class EnergyReport:
    E0: float
    Es: float
    Xs: float
    mass: float
    t: float
    X0: float = 0.0


def _min(a: np.ndarray) -> float:
    # NaN (e.g. from a vanishing denominator) counts as a violation.
    return float(np.min(np.where(np.isfinite(a), a, -np.inf)))


def check_conditions(
    grid: PeriodicGrid,
    state: State,
    bathy: Bathymetry,
    params: RegimeParams,
    coeffs: ModelCoefficients,
    thresholds: Thresholds = Thresholds(),
) -> ConditionReport:
    """Pointwise minima of the depths, ``q1, q2`` and ``Q0 + eps^2 Q1`` (state as its own reference)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        df = pointwise_fields(grid, state, bathy, params, coeffs)
        H3 = df.Q0 + df.Q1bare
    depth = np.minimum(df.h1, df.h2)
    ellip = np.minimum(df.q1, df.q2)
    ok_H1 = _min(depth) >= thresholds.h01
    ok_H2 = _min(ellip) >= thresholds.h02
    ok_H3 = _min(H3) >= thresholds.h03
    bad = ~((depth >= thresholds.h01) & (ellip >= thresholds.h02) & (H3 >= thresholds.h03))
    loc = int(np.argmax(bad)) if bad.any() else None
    return ConditionReport(
        min_h1=_min(df.h1),
        min_h2=_min(df.h2),
        min_q1=_min(df.q1),
        min_q2=_min(df.q2),
        min_H3=_min(H3),
        ok_H1=ok_H1,
        ok_H2=ok_H2,
        ok_H3=ok_H3,
        first_violation_location=loc,
    )


def symmetrizer_weight(grid, state_ref: State, bathy, params, coeffs) -> tuple[np.ndarray, TOperator]:
    """First block ``(Q0 + eps^2 Q1) / f`` of the symmetrizer and its operator block."""
    df = derive(grid, state_ref, bathy, params, coeffs)
    return (df.Q0 + df.Q1bare) / df.f, TOperator.from_fields(grid, df, params, coeffs)


def energy(
    grid: PeriodicGrid,
    state_ref: State,
    state: State,
    bathy: Bathymetry,
    params: RegimeParams,
    coeffs: ModelCoefficients,
    s: float = 0.0,
) -> EnergyReport:
    """Symmetrizer energies ``E^0``, ``E^s`` and the ``X^s`` norm of ``state``."""
    weight, op = symmetrizer_weight(grid, state_ref, bathy, params, coeffs)

    def quad(order: float) -> float:
        z = lambda_s(grid, state.zeta, order)
        w = lambda_s(grid, state.v, order)
        return inner(grid, z, weight * z) + inner(grid, w, op.apply(w))

    def xnorm(order: float) -> float:
        dv = spectral_derivative(grid, state.v)
        return math.sqrt(
            sobolev_norm(grid, state.zeta, order) ** 2
            + sobolev_norm(grid, state.v, order) ** 2
            + params.mu * sobolev_norm(grid, dv, order) ** 2
        )

    e0 = quad(0.0)
    es = e0 if s == 0 else quad(s)
    return EnergyReport(
        E0=math.sqrt(max(e0, 0.0)),
        Es=math.sqrt(max(es, 0.0)),
        Xs=xnorm(s),
        X0=xnorm(0.0),
        mass=grid.dx * float(np.sum(state.zeta)),
        t=state.t,
    )


def equivalence_constants(grid, state_ref: State, bathy, params, coeffs) -> tuple[float, float]:
    """``(c_low, c_high)`` with ``c_low X0^2 <= E0^2 <= c_high X0^2`` on the grid.

    The forward difference satisfies ``(2/pi) |k| <= |D+ symbol| <= |k|``
    on resolved modes, which gives the ``4 / pi**2`` factor in the lower bound.
    """
    df = derive(grid, state_ref, bathy, params, coeffs)
    weight = (df.Q0 + df.Q1bare) / df.f
    face = 0.5 * (df.q2 + np.roll(df.q2, -1))
    nu = coeffs.nu
    low = min(weight.min(), df.q1.min(), nu * face.min() * 4 / np.pi**2)
    high = max(weight.max(), df.q1.max(), nu * face.max())
    return float(low), float(high)


def bottom_norms(grid: PeriodicGrid, bathy: Bathymetry, s0: float = 1.0) -> dict[str, float]:
    """Both size measures of the bottom that enter the energy constants.

    ``w2inf`` is ``max(|b|, |b'|, |b''|)`` from the analytic samples and
    ``hs3`` the spectral ``H^{s0+3}`` norm; which one controls the constants
    is left open, so both are recorded.
    """
    w2inf = max(np.abs(bathy.b).max(), np.abs(bathy.db).max(), np.abs(bathy.d2b).max())
    return {"w2inf": float(w2inf), "hs3": sobolev_norm(grid, bathy.b, s0 + 3)}


# -- growth bound -------------------------------------------------------------

@dataclass(frozen=True)
class GrowthFit:
    lambda_fit: float
    C_fit: float
    ok: bool


def growth_bound_fit(series, params: RegimeParams, lambda_cap: float = 10.0) -> GrowthFit:
    """Smallest ``lambda >= 0`` such that ``E0(t) <= exp(m lambda t) (E0(0) + C m t)``, ``m = max(eps, beta)``.

    ``C`` is kept at zero whenever the initial energy is positive, so the
    fitted ``lambda`` is the tight envelope of ``log(E0(t)/E0(0)) / (m t)``.
    With zero initial energy the exponential cannot help and ``C`` absorbs the
    growth instead: ``C = max E0(t) / (m t)``.
    """
    if len(series) == 0:
        raise EmptySeries("growth bound fit needs a nonempty energy series")
    t = np.array([r.t for r in series], dtype=float)
    e = np.array([r.E0 for r in series], dtype=float)
    t = t - t[0]
    m = params.amplitude
    e_init = e[0]
    later = t > 0
    if m == 0 or not later.any():
        lam = 0.0 if np.all(e <= e_init) else math.inf
        return GrowthFit(lam, 0.0, lam <= lambda_cap)
    if e_init > 0:
        rates = np.log(np.maximum(e[later], 1e-300) / e_init) / (m * t[later])
        lam = float(max(0.0, rates.max()))
        return GrowthFit(lam, 0.0, lam <= lambda_cap)
    C = float(max(0.0, (e[later] / (m * t[later])).max()))
    return GrowthFit(0.0, C, True)


# -- order studies ------------------------------------------------------------

def loglog_slope(ladder, residuals) -> float:
    """Least-squares slope of ``log(residual)`` against ``log(ladder)``."""
    ladder = np.asarray(ladder, dtype=float)
    residuals = np.asarray(residuals, dtype=float)
    if ladder.size < 3:
        raise DegenerateLadder(f"need at least 3 ladder points, got {ladder.size}")
    if np.any(residuals <= 0) or np.any(ladder <= 0):
        raise DegenerateLadder("ladder and residuals must be positive for a log-log fit")
    return float(np.polyfit(np.log(ladder), np.log(residuals), 1)[0])


@dataclass
class OrderConfig:
    """Ladders and fixed profiles of the order studies.

    The expansion studies use ``zeta = 0.5 cos x + 0.25 sin 2x``,
    ``v = sin x + 0.3 cos 3x`` and ``b = 0.5 sin x`` on ``[0, 2 pi)``.
    """

    expansion_ladder: tuple[float, ...] = (0.2, 0.1, 0.05, 0.025)
    expansion_n: int = 512
    mu: float = 0.04
    gamma: float = 0.5
    delta: float = 1.5
    form_ladder: tuple[int, ...] = (128, 256, 512, 1024)
    spatial_ladder: tuple[int, ...] = (128, 256, 512, 1024)
    temporal_n: int = 256
    temporal_levels: int = 4
    temporal_cfl: float = 0.5
    seed: int = 0
    scenario: object = None


@dataclass
class OrderResult:
    target: str
    ladder: list[float]
    residuals: list[float]
    slope: float = field(init=False)

    def __post_init__(self):
        self.slope = loglog_slope(self.ladder, self.residuals)


def _expansion_profiles(grid):
    x = grid.x
    zeta = 0.5 * np.cos(x) + 0.25 * np.sin(2 * x)
    v = np.sin(x) + 0.3 * np.cos(3 * x)
    bathy = make_bathymetry(grid, SinusoidProfile(k=1, height=0.5))
    return zeta, v, bathy


def expansion_residuals(config: OrderConfig, which: str) -> OrderResult:
    grid = PeriodicGrid(2 * np.pi, config.expansion_n)
    zeta, v, bathy = _expansion_profiles(grid)
    residuals = []
    for t in config.expansion_ladder:
        params = RegimeParams(mu=config.mu, eps=t, delta=config.delta, gamma=config.gamma, beta=t)
        coeffs = compute_coefficients(params)
        df = derive(grid, State(0.0, zeta, v), bathy, params, coeffs)
        if which == "qbar_expansion":
            r = qbar_apply(grid, df, bathy, v, params) - qbar_expansion(grid, zeta, v, bathy.b, params, coeffs)
        else:
            r = rbar_apply(grid, df, bathy, v, params) - rbar_expansion(grid, v, coeffs)
        residuals.append(float(np.abs(r).max()))
    return OrderResult(which, list(config.expansion_ladder), residuals)


def smooth_random_state(grid: PeriodicGrid, rng: np.random.Generator, modes: int = 4, amp: float = 0.3) -> State:
    """Low-mode random trigonometric state; resolution-independent for a fixed ``rng`` draw."""
    x = 2 * np.pi * grid.x / grid.length
    k = np.arange(1, modes + 1)
    coef = rng.normal(size=(4, modes)) / k**2
    zeta = amp * (coef[0] @ np.cos(np.outer(k, x)) + coef[1] @ np.sin(np.outer(k, x)))
    v = amp * (coef[2] @ np.cos(np.outer(k, x)) + coef[3] @ np.sin(np.outer(k, x)))
    return State(0.0, zeta, v)


def form_equivalence_residuals(config: OrderConfig) -> OrderResult:
    from .dynamics import rhs_primitive, rhs_quasilinear

    params = RegimeParams(mu=config.mu, eps=0.2, delta=config.delta, gamma=config.gamma, beta=0.2)
    coeffs = compute_coefficients(params)
    dxs, res = [], []
    for n in config.form_ladder:
        grid = PeriodicGrid(2 * np.pi, n)
        state = smooth_random_state(grid, np.random.default_rng(config.seed))
        bathy = make_bathymetry(grid, SinusoidProfile(k=1, height=0.5))
        a = rhs_primitive(grid, state, bathy, params, coeffs)
        b = rhs_quasilinear(grid, state, bathy, params, coeffs)
        dxs.append(grid.dx)
        res.append(max(np.abs(a.dzeta - b.dzeta).max(), np.abs(a.dv - b.dv).max()))
    return OrderResult("form_equivalence", dxs, res)


def _fixed_step_run(scenario, grid, steps):
    from .dynamics import integrate_fixed

    sc = scenario.with_grid(grid)
    return integrate_fixed(
        grid, sc.initial_state(), sc.bathymetry(), sc.params, sc.coefficients(), sc.t_final, steps
    )


def _steps_for(scenario, grid, cfl) -> int:
    from .dynamics import max_speed

    sc = scenario.with_grid(grid)
    params, coeffs = sc.params, sc.coefficients()
    df = derive(grid, sc.initial_state(), sc.bathymetry(), params, coeffs)
    dt = cfl * grid.dx / max_speed(df, sc.initial_state().v, params, coeffs)
    return int(math.ceil(sc.t_final / dt))


def spatial_residuals(config: OrderConfig) -> OrderResult:
    """Errors at ``t_final`` against a run on twice the finest ladder grid, sampled on shared nodes."""
    sc = config.scenario
    L = sc.grid.length
    n_ref = 2 * max(config.spatial_ladder)
    ref_grid = PeriodicGrid(L, n_ref)
    ref = _fixed_step_run(sc, ref_grid, _steps_for(sc, ref_grid, config.temporal_cfl))
    dxs, res = [], []
    for n in config.spatial_ladder:
        if n_ref % n:
            raise DegenerateLadder(f"grid {n} does not nest in reference {n_ref}")
        grid = PeriodicGrid(L, n)
        out = _fixed_step_run(sc, grid, _steps_for(sc, grid, config.temporal_cfl))
        stride = n_ref // n
        err = max(
            np.abs(out.zeta - ref.zeta[::stride]).max(),
            np.abs(out.v - ref.v[::stride]).max(),
        )
        dxs.append(grid.dx)
        res.append(float(err))
    return OrderResult("spatial", dxs, res)


def temporal_residuals(config: OrderConfig) -> OrderResult:
    """Errors ``|u(dt) - u(dt/2)|`` at ``t_final`` on a fixed grid."""
    sc = config.scenario
    grid = PeriodicGrid(sc.grid.length, config.temporal_n)
    base = _steps_for(sc, grid, config.temporal_cfl)
    runs = [_fixed_step_run(sc, grid, base * 2**i) for i in range(config.temporal_levels + 1)]
    dts, res = [], []
    for i in range(config.temporal_levels):
        a, b = runs[i], runs[i + 1]
        dts.append(sc.t_final / (base * 2**i))
        res.append(float(max(np.abs(a.zeta - b.zeta).max(), np.abs(a.v - b.v).max())))
    return OrderResult("temporal", dts, res)


ORDER_TARGETS = ("qbar_expansion", "rbar_expansion", "form_equivalence", "spatial", "temporal")


def order_study(target: str, config: OrderConfig) -> OrderResult:
    if target in ("qbar_expansion", "rbar_expansion"):
        if len(config.expansion_ladder) < 3:
            raise DegenerateLadder("expansion ladder needs at least 3 points")
        return expansion_residuals(config, target)
    if target == "form_equivalence":
        if len(config.form_ladder) < 3:
            raise DegenerateLadder("form ladder needs at least 3 points")
        return form_equivalence_residuals(config)
    if target in ("spatial", "temporal"):
        if config.scenario is None:
            raise ValueError(f"{target} study needs a scenario")
        if target == "spatial":
            if len(config.spatial_ladder) < 3:
                raise DegenerateLadder("spatial ladder needs at least 3 points")
            return spatial_residuals(config)
        if config.temporal_levels < 3:
            raise DegenerateLadder("temporal study needs at least 3 levels")
        return temporal_residuals(config)
    raise ValueError(f"unknown order-study target {target!r}")


def measure_phase_speed(
    params: RegimeParams,
    k: int,
    n: int = 256,
    length: float = 2 * np.pi,
    amplitude: float = 1e-6,
    cfl: float = 0.5,
) -> float:
    """Phase speed of a small standing wave ``amplitude * cos(2 pi k x / L)`` over flat bottom.

    A linear standing wave keeps its Fourier coefficient at ``A cos(omega t)``;
    the run stops near a quarter of the long-wave period and ``omega`` is
    read off with ``arccos``.
    """
    from .dynamics import integrate_fixed

    grid = PeriodicGrid(length, n)
    coeffs = compute_coefficients(params)
    bathy = Bathymetry.flat(n)
    kw = 2 * np.pi * k / length
    zeta = amplitude * np.cos(kw * grid.x)
    state = State(0.0, zeta, np.zeros(n))
    t_end = 1.0 / kw
    steps = int(math.ceil(t_end / (cfl * grid.dx)))
    out = integrate_fixed(grid, state, bathy, params, coeffs, t_end, steps)
    a0 = np.fft.rfft(zeta)[k].real
    a1 = np.fft.rfft(out.zeta)[k].real
    omega = math.acos(max(-1.0, min(1.0, a1 / a0))) / t_end
    return omega / kw
