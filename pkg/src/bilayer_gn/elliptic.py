"""Elliptic operators of the model.

``TOperator`` is the symmetric positive-definite operator
``V -> q1 V - mu nu d/dx (q2 dV/dx)`` discretized with face-averaged ``q2``.
The remaining functions evaluate the Green-Naghdi operators ``T[h, b]``,
``Qbar``, ``Rbar`` and the first-order operator ``Qfrak``.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import LinAlgError, cho_solve_banded, cholesky_banded

from .errors import SolveFailure
from .fields import Bathymetry, DerivedFields
from .grid import PeriodicGrid, derivative
from .regime import ModelCoefficients, RegimeParams


class TOperator:
    """Periodic tridiagonal SPD operator ``q1 V - mu_nu d/dx (q2 dV/dx)``.

    Row ``j`` reads::

        q1_j V_j - (mu_nu/dx^2) [q2_{j+1/2} (V_{j+1} - V_j) - q2_{j-1/2} (V_j - V_{j-1})]

    with ``q2_{j+1/2} = (q2_j + q2_{j+1}) / 2``.
    """

    def __init__(self, grid: PeriodicGrid, q1: np.ndarray, q2: np.ndarray, mu_nu: float):
        self.grid = grid
        self.q1 = q1
        self.q2 = q2
        self.mu_nu = mu_nu
        self.face_q2 = 0.5 * (q2 + np.roll(q2, -1))
        self._factor = None

    @classmethod
    def from_fields(cls, grid, df: DerivedFields, params: RegimeParams, coeffs: ModelCoefficients):
        return cls(grid, df.q1, df.q2, params.mu * coeffs.nu)

    @property
    def _c(self) -> np.ndarray:
        return self.mu_nu / self.grid.dx**2 * self.face_q2

    def apply(self, V: np.ndarray) -> np.ndarray:
        flux = self.face_q2 * (np.roll(V, -1) - V)
        return self.q1 * V - self.mu_nu / self.grid.dx**2 * (flux - np.roll(flux, 1))

    def bands(self) -> tuple[np.ndarray, np.ndarray]:
        """Diagonal and super-diagonal; ``off[j]`` couples ``j`` and ``j+1`` (mod n)."""
        c = self._c
        diag = self.q1 + c + np.roll(c, 1)
        return diag, -c

    def dense(self) -> np.ndarray:
        n = self.grid.n
        diag, off = self.bands()
        A = np.diag(diag)
        idx = np.arange(n)
        A[idx, (idx + 1) % n] += off
        A[(idx + 1) % n, idx] += off
        return A

    def _factorize(self):
        # Periodic SPD system A = B - c w w^T with w = e_0 + e_{n-1}, c = |corner| and
        # B tridiagonal SPD. A is SPD iff B is SPD and 1 - c w^T B^{-1} w > 0.
        n = self.grid.n
        diag, off = self.bands()
        corner = off[-1]
        c = -corner
        bdiag = diag.copy()
        bdiag[0] += c
        bdiag[-1] += c
        ab = np.zeros((2, n))
        ab[0, 1:] = off[:-1]
        ab[1] = bdiag
        try:
            chol = cholesky_banded(ab, lower=False, check_finite=True)
        except (LinAlgError, ValueError) as exc:
            raise SolveFailure(f"operator is not positive definite: {exc}") from exc
        w = np.zeros(n)
        w[0] = w[-1] = 1.0
        z = cho_solve_banded((chol, False), w, check_finite=False)
        denom = 1.0 - c * (z[0] + z[-1])
        if not denom > 0:
            raise SolveFailure(f"periodic correction has non-positive pivot {denom:.3g}")
        self._factor = (chol, c, z, denom)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self._factor is None:
            self._factorize()
        chol, c, z, denom = self._factor
        y = cho_solve_banded((chol, False), rhs, check_finite=False)
        return y + c * (y[0] + y[-1]) / denom * z


def t_apply(op: TOperator, V: np.ndarray) -> np.ndarray:
    return op.apply(V)


def t_solve(op: TOperator, rhs: np.ndarray) -> np.ndarray:
    return op.solve(rhs)


def tcal_apply(grid: PeriodicGrid, h: np.ndarray, bathy: Bathymetry, V: np.ndarray) -> np.ndarray:
    """Green-Naghdi operator ``T[h, b] V``; pass an already scaled bathymetry for ``T[h, beta b]``.

    All second derivatives are compositions of the centered first difference.
    """
    D = lambda u: derivative(grid, u)  # noqa: E731
    db = bathy.db
    dV = D(V)
    return (
        -D(h**3 * dV) / (3 * h)
        + (D(h**2 * db * V) - h**2 * db * dV) / (2 * h)
        + db**2 * V
    )


def _layer_velocities(df: DerivedFields, v: np.ndarray, gamma: float):
    den = df.h1 + gamma * df.h2
    return df.h1 * v / den, -df.h2 * v / den


def qbar_apply(grid, df: DerivedFields, bathy: Bathymetry, v, params: RegimeParams) -> np.ndarray:
    gamma = params.gamma
    V2, V1 = _layer_velocities(df, v, gamma)
    flat = Bathymetry.flat(grid.n)
    return tcal_apply(grid, df.h2, bathy.scaled(params.beta), V2) - gamma * tcal_apply(grid, df.h1, flat, V1)


def rbar_apply(grid, df: DerivedFields, bathy: Bathymetry, v, params: RegimeParams) -> np.ndarray:
    gamma, beta = params.gamma, params.beta
    V2, V1 = _layer_velocities(df, v, gamma)
    scaled = bathy.scaled(beta)
    flat = Bathymetry.flat(grid.n)
    D = lambda u: derivative(grid, u)  # noqa: E731
    return (
        0.5 * (-df.h2 * D(V2) + scaled.db * V2) ** 2
        - 0.5 * gamma * (df.h1 * D(V1)) ** 2
        - V2 * tcal_apply(grid, df.h2, scaled, V2)
        + gamma * V1 * tcal_apply(grid, df.h1, flat, V1)
    )


def qfrak_apply(grid, df: DerivedFields, v, f, params: RegimeParams, coeffs: ModelCoefficients) -> np.ndarray:
    """``2 q1 q3 v f + mu kappa d/dx (f dv/dx)``."""
    return 2 * df.q1 * df.q3 * v * f + params.mu * coeffs.kappa * derivative(grid, f * derivative(grid, v))


# -- leading-order expansions ----------------------------------------------

def qbar_expansion(grid, zeta, v, b, params: RegimeParams, coeffs: ModelCoefficients) -> np.ndarray:
    """First-order-in-``(eps, beta)`` approximation of ``Qbar v``."""
    D = lambda u: derivative(grid, u)  # noqa: E731
    D2 = lambda u: D(D(u))  # noqa: E731
    s = params.gamma + params.delta
    c = coeffs
    return (
        -c.lam * D2(v)
        - params.eps * s / 3 * ((c.theta - c.alpha) * v * D2(zeta) + (c.alpha + 2 * c.theta) * D(zeta * D(v)) - c.theta * zeta * D2(v))
        + params.beta * s / 3 * ((c.alpha1 / 2 + c.theta1) * v * D2(b) + (c.alpha1 + 2 * c.theta1) * D(b * D(v)) - c.theta1 * b * D2(v))
    )


def rbar_expansion(grid, v, coeffs: ModelCoefficients) -> np.ndarray:
    dv = derivative(grid, v)
    return coeffs.alpha * (0.5 * dv**2 + v * derivative(grid, dv) / 3)
