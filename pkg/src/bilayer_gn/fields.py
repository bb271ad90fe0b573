"""State, bathymetry and the pointwise coefficient fields of the model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DepthViolation, EllipticityViolation
from .grid import PeriodicGrid, derivative
from .regime import ModelCoefficients, RegimeParams


@dataclass(frozen=True)
class Bathymetry:
    """Bottom deformation ``b`` with its analytic first and second derivatives."""

    b: np.ndarray
    db: np.ndarray
    d2b: np.ndarray

    @classmethod
    def flat(cls, n: int) -> "Bathymetry":
        z = np.zeros(n)
        return cls(z, z.copy(), z.copy())

    def scaled(self, factor: float) -> "Bathymetry":
        return Bathymetry(factor * self.b, factor * self.db, factor * self.d2b)


@dataclass(frozen=True)
class State:
    t: float
    zeta: np.ndarray
    v: np.ndarray

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.zeta)) and np.all(np.isfinite(self.v)))


@dataclass(frozen=True)
class DerivedFields:
    """Pointwise fields; ``Q1bare`` already carries the ``eps**2 v**2`` factor."""

    h1: np.ndarray
    h2: np.ndarray
    f: np.ndarray
    fp: np.ndarray
    g: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    q3: np.ndarray
    dq3: np.ndarray
    Q0: np.ndarray
    Q1bare: np.ndarray


# -- bathymetry profiles ----------------------------------------------------

@dataclass(frozen=True)
class FlatProfile:
    pass


@dataclass(frozen=True)
class GaussianProfile:
    """``height * exp(-(x - center)**2 / (2 width**2))``, distance wrapped periodically."""

    center: float
    width: float
    height: float


@dataclass(frozen=True)
class SinusoidProfile:
    """``height * sin(2 pi k x / L)``."""

    k: float
    height: float


Profile = FlatProfile | GaussianProfile | SinusoidProfile


def sample_profile(grid: PeriodicGrid, profile: Profile) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic samples of a profile and its first two derivatives."""
    x = grid.x
    if isinstance(profile, FlatProfile):
        z = np.zeros(grid.n)
        return z, z.copy(), z.copy()
    if isinstance(profile, GaussianProfile):
        if not profile.width >= 4 * grid.dx:
            raise ValueError(f"gaussian width {profile.width} is below 4*dx = {4 * grid.dx}")
        L = grid.length
        r = (x - profile.center + L / 2) % L - L / 2
        w2 = profile.width**2
        u = profile.height * np.exp(-(r**2) / (2 * w2))
        du = -r / w2 * u
        d2u = (r**2 / w2 - 1) / w2 * u
        return u, du, d2u
    if isinstance(profile, SinusoidProfile):
        k = 2 * np.pi * profile.k / grid.length
        arg = k * x
        return (
            profile.height * np.sin(arg),
            profile.height * k * np.cos(arg),
            -profile.height * k**2 * np.sin(arg),
        )
    raise TypeError(f"unknown profile {profile!r}")


def make_bathymetry(grid: PeriodicGrid, profile: Profile) -> Bathymetry:
    return Bathymetry(*sample_profile(grid, profile))


# -- derived fields ---------------------------------------------------------

def pointwise_fields(
    grid: PeriodicGrid,
    state: State,
    bathy: Bathymetry,
    params: RegimeParams,
    coeffs: ModelCoefficients,
) -> DerivedFields:
    """Evaluate the closed forms without any admissibility check."""
    eps, beta, gamma, delta = params.eps, params.beta, params.gamma, params.delta
    X = eps * state.zeta
    Y = beta * bathy.b
    h1 = 1 - X
    h2 = 1 / delta + X - Y
    den = h1 + gamma * h2
    hs = h1 + h2
    f = h1 * h2 / den
    fp = (h1**2 - gamma * h2**2) / den**2
    g = (h1 / den) ** 2
    q1 = 1 + coeffs.kappa1 * X + coeffs.omega1 * Y
    q2 = 1 + coeffs.kappa2 * X + coeffs.omega2 * Y
    q3 = (fp - coeffs.varsigma) / 2
    dzeta = derivative(grid, state.zeta)
    dq3 = (
        -gamma * eps * dzeta * hs**2 + gamma * beta * bathy.db * h1 * hs
    ) / den**3
    Q0 = (gamma + delta) * q1 - params.mu * beta * coeffs.omega * bathy.d2b
    Q1bare = -gamma * q1 * hs**2 / den**3 * (eps * state.v) ** 2
    return DerivedFields(h1, h2, f, fp, g, q1, q2, q3, dq3, Q0, Q1bare)


def derive(
    grid: PeriodicGrid,
    state: State,
    bathy: Bathymetry,
    params: RegimeParams,
    coeffs: ModelCoefficients,
) -> DerivedFields:
    """Pointwise fields, raising if the depths (H1) or ``q1, q2`` (H2) are not positive."""
    with np.errstate(divide="ignore", invalid="ignore"):
        df = pointwise_fields(grid, state, bathy, params, coeffs)
    for name, arr in (("h1", df.h1), ("h2", df.h2)):
        bad = ~(arr > 0)
        if bad.any():
            j = int(np.argmax(bad))
            raise DepthViolation(
                f"{name} <= 0 at index {j} (value {arr[j]:.6g}, t={state.t:.6g})", j, float(arr[j])
            )
    for name, arr in (("q1", df.q1), ("q2", df.q2)):
        bad = ~(arr > 0)
        if bad.any():
            j = int(np.argmax(bad))
            raise EllipticityViolation(
                f"{name} <= 0 at index {j} (value {arr[j]:.6g}, t={state.t:.6g})", j, float(arr[j])
            )
    return df
