"""The KdV soliton family and its derived profiles.

phi_c(x) = (3c/2) sech^2(sqrt(c) x / 2) travels at speed c. zeta_c is the
primitive of d(phi_c)/dc; it tends to 0 at -inf and to 3/sqrt(c) at +inf.
Closed forms are used for all x- and c-derivatives so that quadratures of
profile combinations are limited only by domain truncation.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exceptions import DomainError
from .grid import SpatialGrid, weighted_norm


def _check_c(c):
    if c <= 0:
        raise DomainError(f"soliton amplitude must be positive, got {c}")


def soliton_profile(c, x):
    _check_c(c)
    z = 0.5 * np.sqrt(c) * np.asarray(x, dtype=float)
    return 1.5 * c / np.cosh(z) ** 2


def soliton_profile_dx(c, x):
    _check_c(c)
    x = np.asarray(x, dtype=float)
    z = 0.5 * np.sqrt(c) * x
    sech2 = 1.0 / np.cosh(z) ** 2
    return -1.5 * c**1.5 * sech2 * np.tanh(z)


def soliton_profile_dxx(c, x):
    # phi'' = c phi - phi^2 from the traveling-wave ODE
    phi = soliton_profile(c, x)
    return c * phi - phi**2


def dphi_dc(c, x):
    """d/dc of phi_c at fixed x."""
    _check_c(c)
    x = np.asarray(x, dtype=float)
    z = 0.5 * np.sqrt(c) * x
    sech2 = 1.0 / np.cosh(z) ** 2
    return 1.5 * sech2 - 0.75 * np.sqrt(c) * x * sech2 * np.tanh(z)


def zeta_profile(c, x):
    """Primitive of dphi_dc: (3/(2 sqrt c))(1 + tanh z) + (3x/4) sech^2 z."""
    _check_c(c)
    x = np.asarray(x, dtype=float)
    z = 0.5 * np.sqrt(c) * x
    return 1.5 / np.sqrt(c) * (1.0 + np.tanh(z)) + 0.75 * x / np.cosh(z) ** 2


def zeta_profile_dx(c, x):
    # zeta' = dphi_dc by definition
    return dphi_dc(c, x)


def zeta_profile_dxx(c, x):
    """d/dx of dphi_dc, in closed form."""
    _check_c(c)
    x = np.asarray(x, dtype=float)
    z = 0.5 * np.sqrt(c) * x
    sech2 = 1.0 / np.cosh(z) ** 2
    th = np.tanh(z)
    return -2.25 * np.sqrt(c) * sech2 * th - 0.375 * c * x * sech2 * (sech2 - 2.0 * th**2)


def dzeta_dc(c, x):
    """d/dc of zeta_c at fixed x (used by the phase-fit Jacobian)."""
    _check_c(c)
    x = np.asarray(x, dtype=float)
    z = 0.5 * np.sqrt(c) * x
    sech2 = 1.0 / np.cosh(z) ** 2
    th = np.tanh(z)
    return (
        -0.75 * c**-1.5 * (1.0 + th)
        + 0.75 * c**-1.5 * z * sech2
        - 0.375 * x**2 / np.sqrt(c) * sech2 * th
    )


@dataclass(frozen=True)
class SolitonContext:
    """Reference soliton data sampled on a grid, shared read-only by solvers."""

    grid: SpatialGrid
    c_star: float
    weight_a: float
    norm_window: tuple = None

    def __post_init__(self):
        _check_c(self.c_star)
        if not 0.0 < self.weight_a < np.sqrt(self.c_star):
            raise DomainError(
                f"weight exponent a={self.weight_a} must lie in (0, sqrt(c*))"
            )
        if self.norm_window is None:
            object.__setattr__(self, "norm_window", (-self.grid.L, self.grid.L))

    @cached_property
    def x(self):
        return self.grid.x

    @cached_property
    def phi(self):
        return soliton_profile(self.c_star, self.x)

    @cached_property
    def dphi(self):
        return soliton_profile_dx(self.c_star, self.x)

    @cached_property
    def d2phi(self):
        return soliton_profile_dxx(self.c_star, self.x)

    @cached_property
    def zeta(self):
        return zeta_profile(self.c_star, self.x)

    @cached_property
    def dzeta(self):
        return dphi_dc(self.c_star, self.x)

    @cached_property
    def d2zeta(self):
        return zeta_profile_dxx(self.c_star, self.x)

    @cached_property
    def dphi_dc(self):
        return dphi_dc(self.c_star, self.x)

    # v-independent profile combinations used throughout the modulation system
    @cached_property
    def a2phi(self):
        """(x d/dx + 2) phi"""
        return self.x * self.dphi + 2.0 * self.phi

    @cached_property
    def q2phi(self):
        """(x^2/2 d^2/dx^2 + 2x d/dx + 1) phi"""
        return 0.5 * self.x**2 * self.d2phi + 2.0 * self.x * self.dphi + self.phi

    @cached_property
    def q3phi(self):
        """(x d^2/dx^2 + 2 d/dx) phi"""
        return self.x * self.d2phi + 2.0 * self.dphi

    @cached_property
    def L0(self):
        """Dense discrete frozen-frame operator -D3 + c* D1 - 2 D1 Diag(phi)."""
        g = self.grid
        return -g.D3 + self.c_star * g.D1 - 2.0 * g.D1 @ np.diag(self.phi)

    def apply_L0(self, v):
        g = self.grid
        return -g.d3(v) + self.c_star * g.d1(v) - 2.0 * g.d1(self.phi * v)

    def weighted_norm(self, v, a=None, window=None):
        a = self.weight_a if a is None else a
        window = self.norm_window if window is None else window
        return weighted_norm(self.grid, v, a, window)
