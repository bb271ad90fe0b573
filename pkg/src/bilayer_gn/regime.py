"""Dimensionless parameters, regime membership and model coefficients.

All inputs are already nondimensionalized. ``bo_inv = 0`` encodes an
infinite Bond number (no interfacial tension).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import NonPositiveNu


@dataclass(frozen=True)
class RegimeBounds:
    """Box bounds of the shallow-water parameter set (repository defaults)."""

    mu_max: float = 1.0
    delta_min: float = 0.1
    delta_max: float = 10.0
    beta_max: float = 1.0
    bo_inv_max: float = 10.0


@dataclass(frozen=True)
class RegimeParams:
    """The six dimensionless numbers plus the Camassa-Holm slack constants.

    Parameters
    ----------
    mu : shallowness ``d1**2 / wavelength**2``.
    eps : interface amplitude ``a / d1``.
    delta : depth ratio ``d1 / d2``.
    gamma : density ratio ``rho1 / rho2``.
    beta : bottom amplitude ``a_b / d1``.
    bo_inv : inverse Bond number, 0 for ``bo = inf``.
    M : slack in ``eps, beta <= M sqrt(mu)``.
    nu0 : lower bound required for ``nu``.
    """

    mu: float
    eps: float
    delta: float
    gamma: float
    beta: float
    bo_inv: float = 0.0
    M: float = 1.0
    nu0: float = 1e-3
    bounds: RegimeBounds = field(default_factory=RegimeBounds)

    @property
    def lam(self) -> float:
        g, d = self.gamma, self.delta
        return (1 + g * d) / (3 * d * (g + d))

    @property
    def nu(self) -> float:
        return self.lam - self.bo_inv

    @property
    def amplitude(self) -> float:
        """``max(eps, beta)``, the nonlinearity scale of the existence time."""
        return max(self.eps, self.beta)

    def replace(self, **changes) -> "RegimeParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class ModelCoefficients:
    lam: float
    alpha: float
    theta: float
    alpha1: float
    theta1: float
    nu: float
    kappa1: float
    kappa2: float
    omega1: float
    omega2: float
    varsigma: float
    kappa: float
    omega: float

    def as_dict(self) -> dict[str, float]:
        return {
            "lambda": self.lam,
            "alpha": self.alpha,
            "theta": self.theta,
            "alpha1": self.alpha1,
            "theta1": self.theta1,
            "nu": self.nu,
            "kappa1": self.kappa1,
            "kappa2": self.kappa2,
            "omega1": self.omega1,
            "omega2": self.omega2,
            "varsigma": self.varsigma,
            "kappa": self.kappa,
            "omega": self.omega,
        }


@dataclass(frozen=True)
class RegimeReport:
    in_sw: bool
    in_ch: bool
    violations: tuple[str, ...]


def compute_coefficients(params: RegimeParams) -> ModelCoefficients:
    """Evaluate every closed-form constant of the model.

    Raises
    ------
    NonPositiveNu
        If ``lambda - bo_inv < nu0``.
    """
    g, d, bo_inv = params.gamma, params.delta, params.bo_inv
    s = g + d
    lam = (1 + g * d) / (3 * d * s)
    alpha = (1 - g) / s**2
    theta = (1 + g * d) * (d**2 - g) / (d * s**3)
    alpha1 = 1 / s**2
    theta1 = d * (1 + g * d) / s**3
    nu = lam - bo_inv
    if not nu >= params.nu0:
        raise NonPositiveNu(
            f"nu = lambda - 1/bo = {nu:.6g} is below nu0 = {params.nu0:.6g}"
        )
    return ModelCoefficients(
        lam=lam,
        alpha=alpha,
        theta=theta,
        alpha1=alpha1,
        theta1=theta1,
        nu=nu,
        kappa1=s * (2 * theta - alpha) / 3 / nu,
        kappa2=s * theta / nu,
        omega1=-theta1 * s / 3 / nu,
        omega2=-s * (alpha1 + 2 * theta1) / 3 / nu,
        varsigma=((2 * alpha - theta) / 3 - bo_inv * (d**2 - g) / s**2) / nu,
        kappa=2 * alpha / 3,
        omega=s**2 * (alpha1 / 2 + theta1) / 3,
    )


def validate_regime(params: RegimeParams) -> RegimeReport:
    """List every violated clause of the shallow-water and Camassa-Holm sets."""
    b = params.bounds
    p = params
    sw_clauses = [
        ("mu > 0", p.mu > 0),
        ("mu <= mu_max", p.mu <= b.mu_max),
        ("eps >= 0", p.eps >= 0),
        ("eps <= 1", p.eps <= 1),
        ("delta > delta_min", p.delta > b.delta_min),
        ("delta < delta_max", p.delta < b.delta_max),
        ("gamma >= 0", p.gamma >= 0),
        ("gamma < 1", p.gamma < 1),
        ("beta >= 0", p.beta >= 0),
        ("beta <= beta_max", p.beta <= b.beta_max),
        ("bo_inv >= 0", p.bo_inv >= 0),
        ("bo_inv <= 1/bo_min", p.bo_inv <= b.bo_inv_max),
    ]
    root_mu = math.sqrt(p.mu) if p.mu > 0 else 0.0
    ch_clauses = [
        ("eps <= M*sqrt(mu)", p.eps <= p.M * root_mu),
        ("beta <= M*sqrt(mu)", p.beta <= p.M * root_mu),
        ("nu >= nu0", p.delta > 0 and p.gamma + p.delta > 0 and p.nu >= p.nu0),
    ]
    violations = tuple(name for name, ok in sw_clauses + ch_clauses if not ok)
    in_sw = all(ok for _, ok in sw_clauses)
    in_ch = in_sw and all(ok for _, ok in ch_clauses)
    return RegimeReport(in_sw=in_sw, in_ch=in_ch, violations=violations)
