"""Modulation coefficients: exact evaluation and Taylor expansion in v.

Two driving regimes share one algebra. In the "scalar" regime the martingale
coefficients (gbar_s, mbar_s) are numbers per path; in the "white" regime
(gbar, mbar) are grid fields that the noise increment is paired against. The
sigma^2 drift coefficients (gbar_d, mbar_d) are defined in both regimes as

    (gbar_d, mbar_d) = -K(v)^{-1} (<R, phi>, <R, zeta>),  R = R_1 + ... + R_5,

which makes the corrected drift field orthogonal to (phi, zeta) to rounding.
Truncated expansions around v = 0 are carried as order triples (o0, o1, o2)
and combined by degree-truncated products.
"""

import numpy as np

from .projection import (
    k0_matrix,
    k_matrix,
    kinv_taylor_terms,
    solve2,
)

EXAMPLES = ("scalar", "white")


def _check_example(example):
    if example not in EXAMPLES:
        raise ValueError(f"example must be one of {EXAMPLES}, got {example!r}")


def nonlinearity(ctx, v):
    """Quadratic transport term N(v) = -2 v v_x."""
    return -2.0 * v * ctx.grid.d1(v)


# ---------------------------------------------------------------------------
# order-triple algebra

def tmul(a, b):
    """Degree-truncated product of two order triples."""
    return (
        a[0] * b[0],
        a[0] * b[1] + a[1] * b[0],
        a[0] * b[2] + a[1] * b[1] + a[2] * b[0],
    )


def tadd(*triples):
    return tuple(sum(t[k] for t in triples) for k in range(3))


def tneg(t):
    return tuple(-x for x in t)


def _tcol(t):
    """Lift a scalar-valued triple to broadcast against field triples."""
    return tuple(np.asarray(x)[..., None] for x in t)


def _tinner(ctx, a, b):
    """Triple of <a, b> with both factors expanded to order 2."""
    q = ctx.grid.quad
    return (
        q(a[0], b[0]),
        q(a[0], b[1]) + q(a[1], b[0]),
        q(a[0], b[2]) + q(a[1], b[1]) + q(a[2], b[0]),
    )


def _mat_apply(k, r0, r1, field):
    """2x2 matvec; `field` marks grid-valued rhs so batch entries get a cell axis."""
    a, b = k[..., 0, 0], k[..., 0, 1]
    c, d = k[..., 1, 0], k[..., 1, 1]
    r0 = np.asarray(r0, dtype=float)
    r1 = np.asarray(r1, dtype=float)
    if field and a.ndim > 0:
        a, b, c, d = a[..., None], b[..., None], c[..., None], d[..., None]
    return a * r0 + b * r1, c * r0 + d * r1


def _series_matvec(kterms, rhs0, rhs1, field=False):
    """(sum_i K_i) (sum_j r_j) truncated at order 2, per component."""
    out0 = [0.0, 0.0, 0.0]
    out1 = [0.0, 0.0, 0.0]
    for i in range(3):
        for j in range(3 - i):
            if np.isscalar(rhs0[j]) and rhs0[j] == 0.0 and np.isscalar(rhs1[j]) and rhs1[j] == 0.0:
                continue
            y0, y1 = _mat_apply(kterms[i], rhs0[j], rhs1[j], field)
            out0[i + j] = out0[i + j] + y0
            out1[i + j] = out1[i + j] + y1
    return tuple(out0), tuple(out1)


# ---------------------------------------------------------------------------
# martingale coefficients

def _martingale_rhs(ctx, v, example):
    if example == "scalar":
        q = ctx.grid.quad
        return (
            (q(ctx.phi, ctx.phi), q(v, ctx.phi), 0.0),
            (q(ctx.phi, ctx.zeta), q(v, ctx.zeta), 0.0),
        )
    return (
        (ctx.phi * ctx.phi, v * ctx.phi, 0.0),
        (ctx.phi * ctx.zeta, v * ctx.zeta, 0.0),
    )


def martingale_exact(ctx, v, example, kmat=None):
    """(gbar, mbar) at v: numbers per path ("scalar") or fields ("white")."""
    _check_example(example)
    v = np.asarray(v, dtype=float)
    k = kmat if kmat is not None else k_matrix(ctx, v)
    rg, rm = _martingale_rhs(ctx, v, example)
    return k.solve(rg[0] + rg[1], rm[0] + rm[1])


def martingale_series(ctx, v, example):
    """Order triples of (gbar, mbar) around v = 0."""
    _check_example(example)
    v = np.asarray(v, dtype=float)
    kterms = kinv_taylor_terms(ctx, v)
    rg, rm = _martingale_rhs(ctx, v, example)
    return _series_matvec(kterms, rg, rm, field=(example == "white"))


# ---------------------------------------------------------------------------
# order-0 drift (the projection of the quadratic transport term)

def drift0_exact(ctx, v, kmat=None):
    """(gbar_d0, mbar_d0) = K(v)^{-1} (<N(v), phi>, <N(v), zeta>)."""
    v = np.asarray(v, dtype=float)
    k = kmat if kmat is not None else k_matrix(ctx, v)
    n = nonlinearity(ctx, v)
    return k.solve(ctx.grid.quad(n, ctx.phi), ctx.grid.quad(n, ctx.zeta))


def drift0_taylor2(ctx, v):
    """Leading (quadratic) term of (gbar_d0, mbar_d0); orders 0 and 1 vanish."""
    v = np.asarray(v, dtype=float)
    n = nonlinearity(ctx, v)
    return solve2(
        k0_matrix(ctx.c_star),
        ctx.grid.quad(n, ctx.phi),
        ctx.grid.quad(n, ctx.zeta),
    )


def r0_field(ctx, v, gd0, md0):
    """Secular correction R_0 = -gd0 (x d/dx + 2)(phi+v) - md0 d/dx (phi+v)."""
    g = ctx.grid
    a2f = ctx.a2phi + ctx.x * g.d1(v) + 2.0 * v
    dxf = ctx.dphi + g.d1(v)
    return -np.asarray(gd0)[..., None] * a2f - np.asarray(md0)[..., None] * dxf


def r0_taylor2(ctx, v):
    """Leading term of R_0: coefficients quadratic, profiles at v = 0."""
    gd0, md0 = drift0_taylor2(ctx, v)
    return -np.asarray(gd0)[..., None] * ctx.a2phi - np.asarray(md0)[..., None] * ctx.dphi


# ---------------------------------------------------------------------------
# Ito correction fields R_1..R_5 and the sigma^2 drift coefficients

def _profile_triples(ctx, v):
    g = ctx.grid
    d1v, d2v = g.d1(v), g.d2(v)
    x = ctx.x
    return {
        "pf": (ctx.phi, v, 0.0),
        "dxf": (ctx.dphi, d1v, 0.0),
        "d2f": (ctx.d2phi, d2v, 0.0),
        "a2f": (ctx.a2phi, x * d1v + 2.0 * v, 0.0),
        "q2f": (ctx.q2phi, 0.5 * x**2 * d2v + 2.0 * x * d1v + v, 0.0),
        "q3f": (ctx.q3phi, x * d2v + 2.0 * d1v, 0.0),
    }


def _r_sum_series(ctx, v, gs, ms, example):
    """Order triples of R_1 + .. + R_5 given martingale-coefficient triples."""
    p = _profile_triples(ctx, v)
    x = ctx.x
    if example == "scalar":
        gc, mc = _tcol(gs), _tcol(ms)
        return tadd(
            tmul(tmul(mc, mc), _thalf(p["d2f"])),
            tmul(tmul(gc, gc), p["q2f"]),
            tmul(tmul(gc, mc), p["q3f"]),
            tneg(tmul(gc, p["a2f"])),
            tneg(tmul(mc, p["dxf"])),
        )
    d1 = ctx.grid.d1
    dgs = tuple(d1(t) if not np.isscalar(t) else 0.0 for t in gs)
    dms = tuple(d1(t) if not np.isscalar(t) else 0.0 for t in ms)
    nm2 = _tcol(_tinner(ctx, ms, ms))
    ng2 = _tcol(_tinner(ctx, gs, gs))
    gm = _tcol(_tinner(ctx, gs, ms))
    return tadd(
        tmul(nm2, _thalf(p["d2f"])),
        tmul(ng2, p["q2f"]),
        tmul(gm, p["q3f"]),
        tneg(tmul(p["a2f"], gs)),
        tneg(tmul(tmul(p["pf"], dgs), ((x, 0.0, 0.0)))),
        tneg(tmul(p["dxf"], ms)),
        tneg(tmul(p["pf"], dms)),
    )


def _thalf(t):
    return tuple(0.5 * x for x in t)


def r_sum_exact(ctx, v, gbar, mbar, example):
    """R_1 + .. + R_5 at v with exact martingale coefficients."""
    _check_example(example)
    g = ctx.grid
    v = np.asarray(v, dtype=float)
    d1v, d2v = g.d1(v), g.d2(v)
    x = ctx.x
    pf = ctx.phi + v
    dxf = ctx.dphi + d1v
    d2f = ctx.d2phi + d2v
    a2f = ctx.a2phi + x * d1v + 2.0 * v
    q2f = ctx.q2phi + 0.5 * x**2 * d2v + 2.0 * x * d1v + v
    q3f = ctx.q3phi + x * d2v + 2.0 * d1v
    if example == "scalar":
        gb = np.asarray(gbar)[..., None]
        mb = np.asarray(mbar)[..., None]
        return (
            0.5 * mb**2 * d2f
            + gb**2 * q2f
            + gb * mb * q3f
            - gb * a2f
            - mb * dxf
        )
    nm2 = g.quad(mbar, mbar)[..., None]
    ng2 = g.quad(gbar, gbar)[..., None]
    gm = g.quad(gbar, mbar)[..., None]
    return (
        0.5 * nm2 * d2f
        + ng2 * q2f
        + gm * q3f
        - a2f * gbar
        - x * pf * g.d1(gbar)
        - dxf * mbar
        - pf * g.d1(mbar)
    )


def drift_exact(ctx, v, example, kmat=None, gbar=None, mbar=None, r_sum=None):
    """(gbar_d, mbar_d) at v; also returns the R-field they orthogonalize.

    Returns (gd, md, r_sum).
    """
    _check_example(example)
    v = np.asarray(v, dtype=float)
    k = kmat if kmat is not None else k_matrix(ctx, v)
    if gbar is None or mbar is None:
        gbar, mbar = martingale_exact(ctx, v, example, kmat=k)
    if r_sum is None:
        r_sum = r_sum_exact(ctx, v, gbar, mbar, example)
    q = ctx.grid.quad
    gd, md = k.solve(q(r_sum, ctx.phi), q(r_sum, ctx.zeta))
    return -gd, -md, r_sum


def coefficient_series(ctx, v, example):
    """All four coefficient expansions at once: (gs, ms, gd, md) triples."""
    _check_example(example)
    v = np.asarray(v, dtype=float)
    kterms = kinv_taylor_terms(ctx, v)
    rg0, rm0 = _martingale_rhs(ctx, v, example)
    gs, ms = _series_matvec(kterms, rg0, rm0, field=(example == "white"))
    r = _r_sum_series(ctx, v, gs, ms, example)
    q = ctx.grid.quad
    rg = tuple(q(t, ctx.phi) if not np.isscalar(t) else 0.0 for t in r)
    rm = tuple(q(t, ctx.zeta) if not np.isscalar(t) else 0.0 for t in r)
    gd, md = _series_matvec(kterms, rg, rm)
    return gs, ms, tneg(gd), tneg(md)


def drift_series(ctx, v, example):
    """Order triples of (gbar_d, mbar_d) around v = 0."""
    _, _, gd, md = coefficient_series(ctx, v, example)
    return gd, md


# ---------------------------------------------------------------------------
# the martingale field / operator S and its linearization

def s_field_scalar(ctx, v, gbar, mbar):
    """S(v) for the scalar regime: (phi+v) - gbar (x d/dx + 2)(phi+v) - mbar d/dx(phi+v)."""
    g = ctx.grid
    v = np.asarray(v, dtype=float)
    d1v = g.d1(v)
    a2f = ctx.a2phi + ctx.x * d1v + 2.0 * v
    dxf = ctx.dphi + d1v
    gb = np.asarray(gbar)[..., None]
    mb = np.asarray(mbar)[..., None]
    return (ctx.phi + v) - gb * a2f - mb * dxf


def s_field_scalar_order0(ctx):
    gs, ms = martingale_series(ctx, np.zeros(ctx.grid.npoints), "scalar")
    return s_field_scalar(ctx, np.zeros(ctx.grid.npoints), gs[0], ms[0])


def s_field_scalar_order1(ctx, v):
    """Linearization of S(v) in v for the scalar regime."""
    g = ctx.grid
    v = np.asarray(v, dtype=float)
    gs, ms = martingale_series(ctx, v, "scalar")
    d1v = g.d1(v)
    return (
        v
        - np.asarray(gs[1])[..., None] * ctx.a2phi
        - np.asarray(gs[0])[..., None] * (ctx.x * d1v + 2.0 * v)
        - np.asarray(ms[1])[..., None] * ctx.dphi
        - np.asarray(ms[0])[..., None] * d1v
    )


def apply_s_white(ctx, v, gbar, mbar, h):
    """S(v)[h] for the white regime, h a noise field."""
    g = ctx.grid
    v = np.asarray(v, dtype=float)
    d1v = g.d1(v)
    a2f = ctx.a2phi + ctx.x * d1v + 2.0 * v
    dxf = ctx.dphi + d1v
    return (
        (ctx.phi + v) * h
        - a2f * g.quad(h, gbar)[..., None]
        - dxf * g.quad(h, mbar)[..., None]
    )


def apply_s_white_order0(ctx, h):
    z = np.zeros(ctx.grid.npoints)
    gs, ms = martingale_series(ctx, z, "white")
    q = ctx.grid.quad
    return (
        ctx.phi * h
        - ctx.a2phi * q(h, gs[0])[..., None]
        - ctx.dphi * q(h, ms[0])[..., None]
    )


def apply_s_white_order1(ctx, v, h):
    """Linearization of S(v)[h] in v for the white regime."""
    g = ctx.grid
    v = np.asarray(v, dtype=float)
    gs, ms = martingale_series(ctx, v, "white")
    d1v = g.d1(v)
    q = g.quad
    return (
        v * h
        - ctx.a2phi * q(h, gs[1])[..., None]
        - (ctx.x * d1v + 2.0 * v) * q(h, gs[0])[..., None]
        - ctx.dphi * q(h, ms[1])[..., None]
        - d1v * q(h, ms[0])[..., None]
    )
