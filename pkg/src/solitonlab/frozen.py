"""Frozen-frame solver: perturbation v plus modulation pair (alpha, xi).

The field is written u(t, x) = alpha(t)^{-1} [phi_{c*} + v](t, (x - xi)/alpha)
and evolved in the co-moving, rescaled frame. One time step combines

  * a Crank-Nicolson solve in Fourier space for the circulant linear part
    (-d^3/dx^3 + c* d/dx), advanced by the path-local time dtau = dt alpha^-3,
  * second-order Adams-Bashforth for the non-circulant transport terms
    alpha^-3 (-2 (phi v)_x - 2 v v_x),
  * explicit Euler for the secular correction and the Ito correction sum,
  * the exact martingale increment of the modulation system.

All state is batched: v is (B, M), alpha and xi are (B,). Paths that blow up,
lose the frame (alpha below COLLAPSE_THRESHOLD), or hit a near-singular
projection matrix are frozen at their last good state and flagged; the
surviving paths keep advancing.
"""

from dataclasses import dataclass, field

import numpy as np

from .expansion import (
    apply_s_white,
    drift0_exact,
    drift_exact,
    martingale_exact,
    nonlinearity,
    s_field_scalar,
)
from .noise import NoiseIncrement, rescale_noise
from .projection import check_det, det2, k0_matrix, k_entries, solve2

COLLAPSE_THRESHOLD = 1e-3

FAIL_OK = 0
FAIL_BLOWUP = 1
FAIL_COLLAPSE = 2
FAIL_SINGULAR = 3

FAIL_NAMES = {
    FAIL_OK: "ok",
    FAIL_BLOWUP: "blowup",
    FAIL_COLLAPSE: "frame-collapse",
    FAIL_SINGULAR: "singular-projection",
}


class _BatchSolver:
    """Per-path 2x2 modulation solves with a mask instead of an exception."""

    def __init__(self, ctx, v):
        self.entries = k_entries(ctx, v)
        self.det = det2(self.entries)
        self.ok = check_det(ctx, self.det)
        self.det_safe = np.where(self.ok, self.det, det2(k0_matrix(ctx.c_star)))

    def solve(self, r0, r1):
        return solve2(
            self.entries,
            np.asarray(r0, dtype=float),
            np.asarray(r1, dtype=float),
            det=self.det_safe,
        )


@dataclass
class FrozenState:
    t: float
    v: np.ndarray          # (B, M)
    alpha: np.ndarray      # (B,)
    xi: np.ndarray         # (B,)
    cint: np.ndarray       # (B,), running integral of the local speed
    failure: np.ndarray    # (B,), FAIL_* codes
    step_index: int = 0
    prev_slope: np.ndarray = field(default=None, repr=False)
    last_dwt: np.ndarray = field(default=None, repr=False)  # rescaled increment

    @property
    def active(self):
        return self.failure == FAIL_OK

    @property
    def npaths(self):
        return self.v.shape[0]


class FrozenStepper:
    def __init__(self, ctx, sigma, example, dt):
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")
        self.ctx = ctx
        self.sigma = float(sigma)
        self.example = example
        self.dt = float(dt)
        g = ctx.grid
        # circulant symbol of -d3 + c* d1
        self.symbol = -g.symbol_d3 + ctx.c_star * g.symbol_d1

    def initial_state(self, npaths, v0=None, alpha0=1.0, xi0=0.0):
        m = self.ctx.grid.npoints
        v = np.zeros((npaths, m)) if v0 is None else np.array(
            np.broadcast_to(v0, (npaths, m)), dtype=float
        )
        return FrozenState(
            t=0.0,
            v=v,
            alpha=np.full(npaths, float(alpha0)),
            xi=np.full(npaths, float(xi0)),
            cint=np.zeros(npaths),
            failure=np.zeros(npaths, dtype=int),
        )

    def speed(self, state):
        """Local soliton speed c = c* alpha^-2 per path."""
        return self.ctx.c_star / state.alpha**2

    def omega(self, state):
        """Phase shift: xi minus the accumulated speed integral."""
        return state.xi - state.cint

    def step(self, state, dw):
        """Advance one step of size dt; dw is (B,) or (B, M) per example."""
        ctx, g = self.ctx, self.ctx.grid
        dt, sig = self.dt, self.sigma
        v, al, xi = state.v, state.alpha, state.xi

        solver = _BatchSolver(ctx, v)
        gbar, mbar = martingale_exact(ctx, v, self.example, kmat=solver)
        gd0, md0 = drift0_exact(ctx, v, kmat=solver)
        gd, md, rsum = drift_exact(
            ctx, v, self.example, kmat=solver, gbar=gbar, mbar=mbar
        )

        d1v = g.d1(v)
        a2f = ctx.a2phi + ctx.x * d1v + 2.0 * v
        dxf = ctx.dphi + d1v
        # last correction term re-projects the Ito sum off (phi, zeta)
        rsum_t = rsum + gd[..., None] * a2f + md[..., None] * dxf
        r0 = -gd0[..., None] * a2f - md0[..., None] * dxf

        a3 = al**-3
        slope = a3[..., None] * (-2.0 * g.d1(ctx.phi * v) + nonlinearity(ctx, v))
        if state.prev_slope is None:
            transport = slope
        else:
            transport = 1.5 * slope - 0.5 * state.prev_slope

        c_old = ctx.c_star / al**2
        if self.example == "scalar":
            state.last_dwt = dw
            mart_v = sig * s_field_scalar(ctx, v, gbar, mbar) * dw[..., None]
            ito_v = sig**2 * rsum_t
            dal = dt * (-(al**-2) * gd0 + sig**2 * al * gd) - sig * al * gbar * dw
            dxi = (
                dt * (c_old - al**-2 * md0 + sig**2 * al * md)
                - sig * al * mbar * dw
            )
        else:
            inc = NoiseIncrement(dt=dt, kind="white", field_dW=dw)
            dwt = rescale_noise(inc, al, xi, g).field_dW
            state.last_dwt = dwt
            mart_v = (
                sig * al[..., None] ** -0.5 * apply_s_white(ctx, v, gbar, mbar, dwt)
            )
            ito_v = sig**2 * al[..., None] ** -1 * rsum_t
            pg = g.quad(dwt, gbar)
            pm = g.quad(dwt, mbar)
            dal = dt * (-(al**-2) * gd0 + sig**2 * gd) - sig * np.sqrt(al) * pg
            dxi = dt * (c_old - al**-2 * md0 + sig**2 * md) - sig * np.sqrt(al) * pm

        expl = dt * transport + dt * (a3[..., None] * r0 + ito_v) + mart_v

        dtau = dt * a3
        sym = 0.5 * dtau[..., None] * self.symbol
        v_new = g.irfft(((1.0 + sym) * g.rfft(v) + g.rfft(expl)) / (1.0 - sym))

        al_new = al + dal
        xi_new = xi + dxi

        # classify failures on this step, most specific first
        fail = np.where(~solver.ok, FAIL_SINGULAR, FAIL_OK)
        bad_num = ~(
            np.isfinite(v_new).all(axis=-1)
            & np.isfinite(al_new)
            & np.isfinite(xi_new)
        )
        fail = np.where((fail == FAIL_OK) & bad_num, FAIL_BLOWUP, fail)
        fail = np.where(
            (fail == FAIL_OK) & (al_new < COLLAPSE_THRESHOLD), FAIL_COLLAPSE, fail
        )
        was_active = state.active
        newly_failed = was_active & (fail != FAIL_OK)
        state.failure = np.where(newly_failed, fail, state.failure)

        keep = state.active
        kcol = keep[..., None]
        state.v = np.where(kcol, v_new, v)
        state.alpha = np.where(keep, al_new, al)
        state.xi = np.where(keep, xi_new, xi)
        c_new = ctx.c_star / state.alpha**2
        state.cint = state.cint + np.where(keep, 0.5 * dt * (c_old + c_new), 0.0)
        state.prev_slope = np.where(kcol, slope, 0.0)
        state.t += dt
        state.step_index += 1
        return state

    def run(self, state, noise_block):
        """Advance through a block of increments, first axis = time step."""
        for row in noise_block:
            self.step(state, row)
        return state
