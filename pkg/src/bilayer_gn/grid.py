"""Uniform periodic grid and its discrete calculus.

Finite differences (centered, second order) are used for every PDE term;
the discrete Fourier transform is used only for Sobolev-scale norms.
Fields are plain 1-D ``numpy`` arrays of length ``grid.n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class PeriodicGrid:
    """Nodes ``x_j = j * dx`` for ``j = 0..n-1`` on a box of period ``length``."""

    length: float
    n: int

    def __post_init__(self):
        if self.n < 8 or self.n % 2:
            raise ValueError(f"n must be even and >= 8, got {self.n}")
        if not (np.isfinite(self.length) and self.length > 0):
            raise ValueError(f"length must be positive, got {self.length}")

    @property
    def dx(self) -> float:
        return self.length / self.n

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.dx

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers matching ``numpy.fft.rfft`` ordering."""
        return 2 * np.pi * np.fft.rfftfreq(self.n, d=self.dx)

    def check(self, field: np.ndarray) -> np.ndarray:
        field = np.asarray(field, dtype=float)
        if field.shape != (self.n,):
            raise ValueError(f"field has shape {field.shape}, grid expects ({self.n},)")
        return field

    def refine(self, factor: int = 2) -> "PeriodicGrid":
        return PeriodicGrid(self.length, self.n * factor)


def derivative(grid: PeriodicGrid, u: np.ndarray, order: int = 1) -> np.ndarray:
    """Centered second-order difference with periodic wrap."""
    up = np.roll(u, -1)
    um = np.roll(u, 1)
    if order == 1:
        return (up - um) / (2 * grid.dx)
    if order == 2:
        return (up - 2 * u + um) / grid.dx**2
    raise ValueError(f"order must be 1 or 2, got {order}")


def forward_difference(grid: PeriodicGrid, u: np.ndarray) -> np.ndarray:
    return (np.roll(u, -1) - u) / grid.dx


def inner(grid: PeriodicGrid, f: np.ndarray, g: np.ndarray) -> float:
    """Rectangle-rule ``L2`` inner product, exact for trigonometric polynomials."""
    return float(grid.dx * np.dot(f, g))


def lambda_s(grid: PeriodicGrid, u: np.ndarray, s: float) -> np.ndarray:
    """Apply the Fourier multiplier ``(1 + k**2)**(s/2)``."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    if s == 0:
        return u
    symbol = (1 + grid.wavenumbers**2) ** (s / 2)
    return np.fft.irfft(symbol * np.fft.rfft(u), n=grid.n)


def spectral_derivative(grid: PeriodicGrid, u: np.ndarray) -> np.ndarray:
    k = grid.wavenumbers.astype(complex) * 1j
    # Nyquist mode has no odd-symmetric partner; drop it.
    k[-1] = 0
    return np.fft.irfft(k * np.fft.rfft(u), n=grid.n)


def mode_energy(grid: PeriodicGrid, u: np.ndarray) -> float:
    """``sum |u_hat|^2`` scaled so that it equals ``inner(u, u)`` (Parseval)."""
    uh = np.fft.fft(u)
    return float(grid.length / grid.n**2 * np.sum(np.abs(uh) ** 2))


def sobolev_norm(grid: PeriodicGrid, u: np.ndarray, s: float = 0.0) -> float:
    w = lambda_s(grid, u, s)
    return float(np.sqrt(inner(grid, w, w)))


def h1mu_norm(grid: PeriodicGrid, u: np.ndarray, mu: float, s: float = 0.0) -> float:
    """``sqrt(|u|_{H^s}^2 + mu |du/dx|_{H^s}^2)`` with a spectral derivative."""
    du = spectral_derivative(grid, u)
    return float(np.sqrt(sobolev_norm(grid, u, s) ** 2 + mu * sobolev_norm(grid, du, s) ** 2))
