"""Direct integrator for the stochastic KdV equation in the lab frame.

du = -(u_xxx + 2 u u_x) dt + sigma u dW on a periodic grid. The first step is
explicit Euler; afterwards the dispersive term is advanced by Crank-Nicolson
(solved by symbol division in Fourier space, the third-difference operator
being circulant) and the transport term by second-order Adams-Bashforth.
Multiplicative noise acts pointwise: u dbeta for a scalar Brownian motion,
u dW cell-wise for (smoothed) space-time white noise.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class DirectState:
    t: float
    u: np.ndarray        # (B, M)
    u_prev: np.ndarray   # (B, M), previous step for Adams-Bashforth
    blown: np.ndarray    # (B,) bool
    step_index: int = 0

    @property
    def active(self):
        return ~self.blown

    @property
    def npaths(self):
        return self.u.shape[0]


class DirectStepper:
    def __init__(self, grid, sigma, noise_kind, dt):
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")
        self.grid = grid
        self.sigma = float(sigma)
        self.noise_kind = noise_kind
        self.dt = float(dt)

    def initial_state(self, u0, npaths=None):
        u0 = np.asarray(u0, dtype=float)
        if u0.ndim == 1:
            if npaths is None:
                npaths = 1
            u0 = np.array(np.broadcast_to(u0, (npaths, u0.shape[-1])))
        return DirectState(
            t=0.0,
            u=u0,
            u_prev=u0.copy(),
            blown=np.zeros(u0.shape[0], dtype=bool),
        )

    def _noise_term(self, u, dw):
        if self.noise_kind == "scalar":
            return self.sigma * u * np.asarray(dw)[..., None]
        return self.sigma * u * dw

    def step(self, state, dw):
        g, dt = self.grid, self.dt
        u, up = state.u, state.u_prev
        noise = self._noise_term(u, dw)
        if state.step_index == 0:
            u_new = u - dt * (g.d3(u) + 2.0 * u * g.d1(u)) + noise
        else:
            expl = noise - 3.0 * dt * u * g.d1(u) + dt * up * g.d1(up)
            sym = 0.5 * dt * g.symbol_d3
            u_new = g.irfft(((1.0 - sym) * g.rfft(u) + g.rfft(expl)) / (1.0 + sym))

        newly_blown = state.active & ~np.isfinite(u_new).all(axis=-1)
        state.blown = state.blown | newly_blown
        keep = state.active[..., None]
        state.u_prev = np.where(keep, u, up)
        state.u = np.where(keep, u_new, u)
        state.t += dt
        state.step_index += 1
        return state

    def run(self, state, noise_block):
        """Advance through a block of increments, first axis = time step."""
        for row in noise_block:
            self.step(state, row)
        return state

    def energy(self, state):
        """Squared L2 norm per path (a geometric Brownian motion in law
        under scalar multiplicative noise)."""
        return self.grid.quad(state.u, state.u)
