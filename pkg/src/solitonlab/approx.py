"""Hierarchy of amplitude and phase-shift approximations (orders 0, 1, 2).

Order 0 freezes every modulation coefficient at v = 0: a geometric Brownian
motion for alpha in the scalar regime, a squared-Bessel-type SDE in the white
regime. Orders 1 and 2 reinstate the first and second Taylor corrections of
the coefficients, evaluated along auxiliary linear fields V1, V2 that are
co-simulated with the same driving noise. All processes step together, so a
single simulator instance can be run in lockstep with the full frozen-frame
solver on shared increments.

Closed-form statistics of the order-0 processes (means and variances of c and
of the phase shift) are evaluated from the same numerically computed constants;
the negative moments required in the white regime come from a seeded Monte
Carlo sub-estimator of the known noncentral chi-square marginal.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import stats as scipy_stats

from .expansion import (
    apply_s_white_order0,
    apply_s_white_order1,
    coefficient_series,
    drift0_taylor2,
    nonlinearity,
    r0_taylor2,
    r_sum_exact,
    s_field_scalar_order1,
)
from .frozen import (
    COLLAPSE_THRESHOLD,
    FAIL_BLOWUP,
    FAIL_COLLAPSE,
    FAIL_OK,
)


@dataclass(frozen=True)
class ConstantsTable:
    """The v = 0 modulation constants, as functions of the reference c*."""

    c_star: float
    gs_scalar: float        # martingale, amplitude direction (scalar regime)
    ms_scalar: float        # martingale, phase direction
    gd_scalar: float        # sigma^2 drift, amplitude
    md_scalar: float        # sigma^2 drift, phase
    g_white: np.ndarray     # martingale fields (white regime)
    m_white: np.ndarray
    g_white_norm2: float
    m_white_norm2: float
    gm_white: float
    gd_white: float
    md_white: float


def constants_table(ctx):
    z = np.zeros(ctx.grid.npoints)
    q = ctx.grid.quad
    gsI, msI, gdI, mdI = coefficient_series(ctx, z, "scalar")
    gsW, msW, gdW, mdW = coefficient_series(ctx, z, "white")
    gw, mw = np.asarray(gsW[0]), np.asarray(msW[0])
    return ConstantsTable(
        c_star=ctx.c_star,
        gs_scalar=float(gsI[0]),
        ms_scalar=float(msI[0]),
        gd_scalar=float(gdI[0]),
        md_scalar=float(mdI[0]),
        g_white=gw,
        m_white=mw,
        g_white_norm2=float(q(gw, gw)),
        m_white_norm2=float(q(mw, mw)),
        gm_white=float(q(gw, mw)),
        gd_white=float(gdW[0]),
        md_white=float(mdW[0]),
    )


def positivity_margin(tab):
    """delta / (s^2/2) for the order-0 white-regime SDE; > 1 keeps alpha0 > 0."""
    return tab.gd_white / (0.5 * tab.g_white_norm2)


@dataclass
class ApproxState:
    t: float
    beta: np.ndarray                 # accumulated driving Brownian motion (scalar)
    alpha: dict                      # order -> (B,)
    omega: dict                      # order -> (B,)
    fields: dict                     # name -> (B, M)
    slopes: dict = field(default_factory=dict, repr=False)
    clamps: dict = field(default_factory=dict)
    failure: np.ndarray = None
    step_index: int = 0

    @property
    def active(self):
        return self.failure == FAIL_OK

    def speed(self, order, c_star):
        return c_star / self.alpha[order] ** 2


class ApproxSimulator:
    def __init__(self, ctx, sigma, example, dt, max_order=2, with_omega2=None):
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")
        self.ctx = ctx
        self.sigma = float(sigma)
        self.example = example
        self.dt = float(dt)
        self.max_order = int(max_order)
        if with_omega2 is None:
            with_omega2 = max_order >= 2
        self.with_omega2 = bool(with_omega2) and max_order >= 2
        g = ctx.grid
        self.symbol = -g.symbol_d3 + ctx.c_star * g.symbol_d1
        self.tab = constants_table(ctx)
        z = np.zeros(g.npoints)
        if example == "scalar":
            gs0, ms0 = self.tab.gs_scalar, self.tab.ms_scalar
            gd0, md0 = self.tab.gd_scalar, self.tab.md_scalar
            rs = r_sum_exact(ctx, z, gs0, ms0, "scalar")
            self.s0_field = ctx.phi - gs0 * ctx.a2phi - ms0 * ctx.dphi
        else:
            gs0, ms0 = self.tab.g_white, self.tab.m_white
            gd0, md0 = self.tab.gd_white, self.tab.md_white
            rs = r_sum_exact(ctx, z, gs0, ms0, "white")
            self.s0_field = None
        # orthogonalized order-0 Ito correction sum (constant field)
        self.rsum0 = rs + gd0 * ctx.a2phi + md0 * ctx.dphi

    # ------------------------------------------------------------------
    def field_names(self):
        names = []
        if self.max_order >= 1:
            names.append("v1a0")
        if self.max_order >= 2:
            names += ["v1a1", "v2a1"]
        if self.with_omega2:
            names += ["v1a2", "v2a2"]
        return names

    def initial_state(self, npaths):
        m = self.ctx.grid.npoints
        orders = list(range(self.max_order + 1))
        return ApproxState(
            t=0.0,
            beta=np.zeros(npaths),
            alpha={k: np.ones(npaths) for k in orders},
            omega={k: np.zeros(npaths) for k in ([0, 2] if self.with_omega2 else [0])},
            fields={name: np.zeros((npaths, m)) for name in self.field_names()},
            clamps={k: np.zeros(npaths, dtype=int) for k in orders},
            failure=np.zeros(npaths, dtype=int),
        )

    # ------------------------------------------------------------------
    def _field_step(self, state, name, alpha, source, mart):
        g, dt = self.ctx.grid, self.dt
        v = state.fields[name]
        a3 = alpha**-3
        slope = a3[..., None] * (-2.0 * g.d1(self.ctx.phi * v))
        prev = state.slopes.get(name)
        transport = slope if prev is None else 1.5 * slope - 0.5 * prev
        expl = dt * transport + dt * source + mart
        sm = 0.5 * (dt * a3)[..., None] * self.symbol
        v_new = g.irfft(((1.0 + sm) * g.rfft(v) + g.rfft(expl)) / (1.0 - sm))
        state.slopes[name] = slope
        return v_new

    def _v1_mart(self, alpha, dw):
        if self.example == "scalar":
            return self.s0_field * dw[..., None]
        return alpha[..., None] ** -0.5 * apply_s_white_order0(self.ctx, dw)

    def _v2_source(self, v1, alpha):
        a3 = alpha[..., None] ** -3
        src = a3 * (nonlinearity(self.ctx, v1) + r0_taylor2(self.ctx, v1))
        if self.example == "scalar":
            return src + self.rsum0
        return src + alpha[..., None] ** -1 * self.rsum0

    def _v2_mart(self, v1, alpha, dw):
        if self.example == "scalar":
            return s_field_scalar_order1(self.ctx, v1) * dw[..., None]
        return alpha[..., None] ** -0.5 * apply_s_white_order1(self.ctx, v1, dw)

    # ------------------------------------------------------------------
    def step(self, state, dw):
        ctx, g = self.ctx, self.ctx.grid
        dt, sig = self.dt, self.sigma
        tab = self.tab
        scalar = self.example == "scalar"
        q = g.quad

        # Taylor coefficients at step-start fields
        if self.max_order >= 1:
            v1 = sig * state.fields["v1a0"]
            gs1, ms1, gd1, md1 = coefficient_series(ctx, v1, self.example)
        if self.max_order >= 2:
            w1 = sig * state.fields["v1a1"]
            v2 = w1 + sig**2 * state.fields["v2a1"]
            gs_v2, ms_v2, gd_v2, md_v2 = coefficient_series(ctx, v2, self.example)
            gs_w1, ms_w1, gd_w1, md_w1 = coefficient_series(ctx, w1, self.example)
            k02, _ = drift0_taylor2(ctx, w1)
        if self.with_omega2:
            w2 = sig * state.fields["v1a2"]
            v2p = w2 + sig**2 * state.fields["v2a2"]
            _, ms_v2p, _, md_v2p = coefficient_series(ctx, v2p, self.example)
            _, ms_w2, _, md_w2 = coefficient_series(ctx, w2, self.example)
            _, m02 = drift0_taylor2(ctx, w2)

        t_new = state.t + dt
        new_alpha = {}
        new_omega = {}

        if scalar:
            beta_new = state.beta + dw
            rate = (tab.gd_scalar - 0.5 * tab.gs_scalar**2) * sig**2
            new_alpha[0] = np.exp(rate * t_new - tab.gs_scalar * sig * beta_new)
            new_omega[0] = (
                state.omega[0]
                + dt * sig**2 * tab.md_scalar * state.alpha[0]
                - sig * tab.ms_scalar * state.alpha[0] * dw
            )
            # Euler-Maruyama, matching the full solver's modulation update so
            # that discretization noise cancels in pathwise differences
            if self.max_order >= 1:
                k11 = tab.gd_scalar + gd1[1]
                k21 = tab.gs_scalar + gs1[1]
                a1 = state.alpha[1]
                new_alpha[1] = a1 + dt * sig**2 * k11 * a1 - sig * k21 * a1 * dw
            if self.max_order >= 2:
                k12 = tab.gd_scalar + gd_v2[1] + gd_w1[2]
                k22 = tab.gs_scalar + gs_v2[1] + gs_w1[2]
                a2 = state.alpha[2]
                new_alpha[2] = (
                    a2
                    + dt * (-k02 / a2**2 + sig**2 * k12 * a2)
                    - sig * k22 * a2 * dw
                )
            if self.with_omega2:
                m12 = tab.md_scalar + md_v2p[1] + md_w2[2]
                m22 = tab.ms_scalar + ms_v2p[1] + ms_w2[2]
                new_omega[2] = (
                    state.omega[2]
                    + dt * (-m02 / state.alpha[2] ** 2 + sig**2 * m12 * state.alpha[2])
                    - sig * m22 * state.alpha[2] * dw
                )
        else:
            beta_new = state.beta  # unused in the white regime
            a0 = state.alpha[0]
            new_alpha[0] = (
                a0 + dt * sig**2 * tab.gd_white - sig * np.sqrt(a0) * q(dw, tab.g_white)
            )
            new_omega[0] = (
                state.omega[0]
                + dt * sig**2 * tab.md_white
                - sig * np.sqrt(a0) * q(dw, tab.m_white)
            )
            if self.max_order >= 1:
                k11 = tab.gd_white + gd1[1]
                k21f = tab.g_white + gs1[1]
                a1 = state.alpha[1]
                new_alpha[1] = (
                    a1 + dt * sig**2 * k11 - sig * np.sqrt(a1) * q(dw, k21f)
                )
            if self.max_order >= 2:
                k12 = tab.gd_white + gd_v2[1] + gd_w1[2]
                k22f = tab.g_white + gs_v2[1] + gs_w1[2]
                a2 = state.alpha[2]
                new_alpha[2] = (
                    a2
                    + dt * (-k02 / a2**2 + sig**2 * k12)
                    - sig * np.sqrt(a2) * q(dw, k22f)
                )
            if self.with_omega2:
                m12 = tab.md_white + md_v2p[1] + md_w2[2]
                m22f = tab.m_white + ms_v2p[1] + ms_w2[2]
                a2 = state.alpha[2]
                new_omega[2] = (
                    state.omega[2]
                    + dt * (-m02 / a2**2 + sig**2 * m12)
                    - sig * np.sqrt(a2) * q(dw, m22f)
                )

        # positivity: discretization can push alpha through 0; reflect and count
        for k in new_alpha:
            bad = new_alpha[k] <= 0.0
            if np.any(bad):
                new_alpha[k] = np.where(bad, np.abs(new_alpha[k]) + 1e-12, new_alpha[k])
                state.clamps[k] = state.clamps[k] + bad.astype(int)

        # auxiliary fields, driven by the step-start alpha of their order
        new_fields = {}
        if self.max_order >= 1:
            new_fields["v1a0"] = self._field_step(
                state, "v1a0", state.alpha[0], 0.0, self._v1_mart(state.alpha[0], dw)
            )
        if self.max_order >= 2:
            a1 = state.alpha[1]
            v1f = state.fields["v1a1"]
            new_fields["v1a1"] = self._field_step(
                state, "v1a1", a1, 0.0, self._v1_mart(a1, dw)
            )
            new_fields["v2a1"] = self._field_step(
                state,
                "v2a1",
                a1,
                self._v2_source(v1f, a1),
                self._v2_mart(v1f, a1, dw),
            )
        if self.with_omega2:
            a2 = state.alpha[2]
            v1f = state.fields["v1a2"]
            new_fields["v1a2"] = self._field_step(
                state, "v1a2", a2, 0.0, self._v1_mart(a2, dw)
            )
            new_fields["v2a2"] = self._field_step(
                state,
                "v2a2",
                a2,
                self._v2_source(v1f, a2),
                self._v2_mart(v1f, a2, dw),
            )

        # failure classification
        finite = np.ones(state.failure.shape, dtype=bool)
        for arr in new_alpha.values():
            finite &= np.isfinite(arr)
        for arr in new_fields.values():
            finite &= np.isfinite(arr).all(axis=-1)
        for arr in new_omega.values():
            finite &= np.isfinite(arr)
        collapsed = np.zeros_like(finite)
        for arr in new_alpha.values():
            collapsed |= arr < COLLAPSE_THRESHOLD
        fail = np.where(~finite, FAIL_BLOWUP, FAIL_OK)
        fail = np.where(finite & collapsed, FAIL_COLLAPSE, fail)
        newly = state.active & (fail != FAIL_OK)
        state.failure = np.where(newly, fail, state.failure)

        keep = state.active
        kcol = keep[..., None]
        state.beta = np.where(keep, beta_new, state.beta)
        for k in new_alpha:
            state.alpha[k] = np.where(keep, new_alpha[k], state.alpha[k])
        for k in new_omega:
            state.omega[k] = np.where(keep, new_omega[k], state.omega[k])
        for name in new_fields:
            state.fields[name] = np.where(kcol, new_fields[name], state.fields[name])
            state.slopes[name] = np.where(kcol, state.slopes[name], 0.0)
        state.t = t_new
        state.step_index += 1
        return state

    def run(self, state, noise_block):
        """Advance through a block of increments, first axis = time step."""
        for row in noise_block:
            self.step(state, row)
        return state

    def v_k(self, state, k):
        """The order-k perturbation approximation field (k = 1 or 2)."""
        sig = self.sigma
        if k == 1:
            return sig * state.fields["v1a0"]
        if k == 2:
            return sig * state.fields["v1a1"] + sig**2 * state.fields["v2a1"]
        raise ValueError(f"k must be 1 or 2, got {k}")


# ---------------------------------------------------------------------------
# closed-form statistics of the order-0 processes

def alpha0_marginal_white(tab, sigma, t):
    """Noncentral chi-square marginal of alpha0 in the white regime.

    Returns (scale, df, nc): alpha0(t) ~ scale * ncx2(df, nc).
    """
    s2 = sigma**2 * tab.g_white_norm2
    if s2 * t <= 0:
        raise ValueError("need sigma > 0 and t > 0")
    scale = s2 * t / 4.0
    df = 4.0 * tab.gd_white / tab.g_white_norm2
    nc = 4.0 / (s2 * t)
    return scale, df, nc


def negative_moments_white(tab, sigma, ts, powers=(-3, -5), nsamples=400000, seed=202406):
    """Monte Carlo estimates of E[alpha0(t)^p] from the ncx2 marginal.

    The exact integrals diverge (the ncx2 density is positive at 0), but the
    mass near 0 is exponentially suppressed at these noise levels, so a plain
    sample average is a stable, reproducible sub-estimator. Returns
    {p: array over ts} plus {p: standard-error array} in a second dict.
    """
    rng = np.random.default_rng(seed)
    est = {p: np.ones(len(ts)) for p in powers}
    se = {p: np.zeros(len(ts)) for p in powers}
    for i, t in enumerate(ts):
        if t <= 0 or sigma == 0:
            continue
        scale, df, nc = alpha0_marginal_white(tab, sigma, t)
        x = scale * scipy_stats.ncx2.rvs(df, nc, size=nsamples, random_state=rng)
        for p in powers:
            vals = x**p
            est[p][i] = vals.mean()
            se[p][i] = vals.std(ddof=1) / np.sqrt(nsamples)
    return est, se


def _cumtrapz(ts, ys):
    ts = np.asarray(ts, dtype=float)
    ys = np.asarray(ys, dtype=float)
    return np.concatenate([[0.0], np.cumsum(0.5 * (ys[1:] + ys[:-1]) * np.diff(ts))])


def theory_curves(ctx, example, sigma, ts, tab=None, seed=202406):
    """Closed-form order-0 statistics on the time grid ts, as a dict of arrays."""
    if tab is None:
        tab = constants_table(ctx)
    ts = np.asarray(ts, dtype=float)
    c = tab.c_star
    s2 = sigma**2
    out = {"t": ts}
    if example == "scalar":
        a = tab.gd_scalar * s2                 # drift rate of alpha0
        b2 = (tab.gs_scalar * sigma) ** 2      # squared volatility
        out["mean_alpha0"] = np.exp(a * ts)
        out["mean_c0"] = c * np.exp((-2.0 * a + 3.0 * b2) * ts)
        out["var_c0"] = c**2 * np.exp((-4.0 * a + 6.0 * b2) * ts) * (
            np.exp(4.0 * b2 * ts) - 1.0
        )
        if a > 0:
            out["mean_omega0"] = (tab.md_scalar / tab.gd_scalar) * (
                np.exp(a * ts) - 1.0
            )
            k2 = 2.0 * a + b2
            out["var_omega0"] = tab.ms_scalar**2 * s2 * (np.exp(k2 * ts) - 1.0) / k2
        else:
            out["mean_omega0"] = np.zeros_like(ts)
            out["var_omega0"] = np.zeros_like(ts)
        return out
    out["mean_alpha0"] = 1.0 + tab.gd_white * s2 * ts
    out["mean_omega0"] = tab.md_white * s2 * ts
    out["var_omega0"] = tab.m_white_norm2 * s2 * (
        ts + 0.5 * tab.gd_white * s2 * ts**2
    )
    if sigma == 0:
        out["mean_c0"] = np.full_like(ts, c)
        out["var_c0"] = np.zeros_like(ts)
        return out
    est, se = negative_moments_white(tab, sigma, ts, seed=seed)
    out["neg_moment_3"] = est[-3]
    out["neg_moment_3_se"] = se[-3]
    out["neg_moment_5"] = est[-5]
    out["neg_moment_5_se"] = se[-5]
    out["mean_c0"] = c + c * s2 * (
        3.0 * tab.g_white_norm2 - 2.0 * tab.gd_white
    ) * _cumtrapz(ts, est[-3])
    out["var_c0"] = 4.0 * c**2 * s2 * tab.g_white_norm2 * _cumtrapz(ts, est[-5])
    return out
