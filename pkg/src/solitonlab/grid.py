"""Uniform periodic grid with second-order centered difference operators.

The grid has N+1 points x_n = n*dx - L with dx = 2L/N, and all operators wrap
periodically (period (N+1)*dx). Differentiation acts on the last axis, so the
same routines serve single fields (M,) and path batches (B, M).
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import DomainError


@dataclass(frozen=True)
class SpatialGrid:
    L: float
    N: int

    def __post_init__(self):
        if self.L <= 0 or self.N < 8:
            raise DomainError(f"invalid grid: L={self.L}, N={self.N}")

    @cached_property
    def dx(self):
        return 2.0 * self.L / self.N

    @property
    def npoints(self):
        return self.N + 1

    @cached_property
    def x(self):
        return np.arange(self.npoints) * self.dx - self.L

    def d1(self, v):
        return (np.roll(v, -1, axis=-1) - np.roll(v, 1, axis=-1)) / (2.0 * self.dx)

    def d2(self, v):
        return (np.roll(v, -1, axis=-1) - 2.0 * v + np.roll(v, 1, axis=-1)) / self.dx**2

    def d3(self, v):
        return (
            np.roll(v, -2, axis=-1)
            - 2.0 * np.roll(v, -1, axis=-1)
            + 2.0 * np.roll(v, 1, axis=-1)
            - np.roll(v, 2, axis=-1)
        ) / (2.0 * self.dx**3)

    def quad(self, f, g):
        """Periodic quadrature inner product dx * sum(f g) over the last axis."""
        return self.dx * np.sum(f * g, axis=-1)

    def norm(self, f):
        return np.sqrt(self.quad(f, f))

    # Fourier symbols of the difference operators, for circulant solves.

    @cached_property
    def _theta(self):
        return 2.0 * np.pi * np.fft.rfftfreq(self.npoints)

    @cached_property
    def symbol_d1(self):
        return 1j * np.sin(self._theta) / self.dx

    @cached_property
    def symbol_d3(self):
        return 1j * (np.sin(2.0 * self._theta) - 2.0 * np.sin(self._theta)) / self.dx**3

    def rfft(self, v):
        return np.fft.rfft(v, axis=-1)

    def irfft(self, vhat):
        return np.fft.irfft(vhat, n=self.npoints, axis=-1)

    # Dense matrices, for tests and small problems only.

    def _dense(self, op):
        eye = np.eye(self.npoints)
        return np.stack([op(row) for row in eye], axis=1)

    @cached_property
    def D1(self):
        return self._dense(self.d1)

    @cached_property
    def D2(self):
        return self._dense(self.d2)

    @cached_property
    def D3(self):
        return self._dense(self.d3)


def weighted_norm(grid, v, a, window):
    """L2 norm with weight e^{2ax}, restricted to grid points in the window."""
    lo, hi = window
    if lo < -grid.L - 1e-12 or hi > grid.L + 1e-12:
        raise DomainError(f"window {window} exceeds domain [{-grid.L}, {grid.L}]")
    mask = (grid.x >= lo) & (grid.x <= hi)
    w = np.exp(2.0 * a * grid.x) * mask
    return np.sqrt(grid.dx * np.sum(w * v**2, axis=-1))
