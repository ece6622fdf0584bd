"""The 2x2 projection matrix K(v), its inverse, and its Taylor expansion.

K couples the scaling and translation directions of the soliton family to the
orthogonality constraints <., phi> and <., zeta>. All routines accept a single
perturbation (M,) or a batch (B, M); matrix-valued results are stacked along
leading axes as (..., 2, 2).
"""

import numpy as np

from .exceptions import SingularProjectionError

DET_GUARD = 0.1  # reject when |det K(v)| < DET_GUARD * |det K(0)|


def b_functionals(ctx, v):
    """b1..b4: the v-linear parts of the four K entries."""
    g = ctx.grid
    dv = g.d1(v)
    xdv2v = ctx.x * dv + 2.0 * v
    b1 = g.quad(xdv2v, ctx.phi)
    b2 = g.quad(dv, ctx.phi)
    b3 = g.quad(xdv2v, ctx.zeta)
    b4 = g.quad(dv, ctx.zeta)
    return b1, b2, b3, b4


def k0_matrix(c_star):
    return np.array(
        [
            [9.0 * c_star**1.5, 0.0],
            [9.0, -4.5 * np.sqrt(c_star)],
        ]
    )


def k_entries(ctx, v):
    """K(v) as an (..., 2, 2) array of quadrature inner products."""
    b1, b2, b3, b4 = b_functionals(ctx, v)
    k0 = k0_matrix(ctx.c_star)
    out = np.empty(np.shape(b1) + (2, 2))
    out[..., 0, 0] = k0[0, 0] + b1
    out[..., 0, 1] = k0[0, 1] + b2
    out[..., 1, 0] = k0[1, 0] + b3
    out[..., 1, 1] = k0[1, 1] + b4
    return out


def det2(k):
    return k[..., 0, 0] * k[..., 1, 1] - k[..., 0, 1] * k[..., 1, 0]


def solve2(k, rhs0, rhs1, det=None):
    """Solve K [y0; y1] = [rhs0; rhs1] for stacked 2x2 systems.

    rhs components may be scalars per path or grid fields per path; the
    cofactor weights broadcast from the left.
    """
    if det is None:
        det = det2(k)
    a, b = k[..., 0, 0], k[..., 0, 1]
    c, d = k[..., 1, 0], k[..., 1, 1]
    if rhs0.ndim > det.ndim:  # field-valued right-hand side
        det = det[..., None]
        a, b, c, d = a[..., None], b[..., None], c[..., None], d[..., None]
    y0 = (d * rhs0 - b * rhs1) / det
    y1 = (a * rhs1 - c * rhs0) / det
    return y0, y1


def check_det(ctx, det):
    guard = DET_GUARD * abs(det2(k0_matrix(ctx.c_star)))
    return np.abs(det) >= guard


class ProjectionMatrix:
    """K(v) for a single perturbation, with its defining b-functionals."""

    def __init__(self, ctx, v):
        v = np.asarray(v, dtype=float)
        self.ctx = ctx
        self.b = b_functionals(ctx, v)
        self.entries = k_entries(ctx, v)
        self.det = det2(self.entries)

    def require_invertible(self):
        if not np.all(check_det(self.ctx, self.det)):
            worst = float(np.min(np.abs(self.det)))
            raise SingularProjectionError(
                f"|det K(v)| = {worst:.3e} is below the invertibility guard"
            )

    def solve(self, rhs0, rhs1):
        self.require_invertible()
        return solve2(self.entries, np.asarray(rhs0, float), np.asarray(rhs1, float))

    def inverse(self):
        self.require_invertible()
        a, b = self.entries[0]
        c, d = self.entries[1]
        return np.array([[d, -b], [-c, a]]) / self.det


def k_matrix(ctx, v):
    return ProjectionMatrix(ctx, v)


def _adj0(c_star):
    return np.array([[-0.5 * np.sqrt(c_star), 0.0], [-1.0, c_star**1.5]])


def kinv_taylor_terms(ctx, v):
    """Orders 0, 1, 2 of the expansion of K^{-1} around v = 0.

    Derived from the exact adjugate and determinant of K(v) = K(0) + B(v):
    adj K = 9 Adj0 + adj_b, det K = a + d1 + d2 with a = -(81/2) c*^2,
    d1 linear and d2 quadratic in the b-functionals, then a geometric-series
    expansion of 1/det K.
    """
    c = ctx.c_star
    b1, b2, b3, b4 = b_functionals(ctx, v)
    a = -40.5 * c**2
    d1 = 9.0 * c**1.5 * b4 - 4.5 * np.sqrt(c) * b1 - 9.0 * b2
    d2 = b1 * b4 - b3 * b2

    adj0 = _adj0(c)
    adj_b = np.empty(np.shape(b1) + (2, 2))
    adj_b[..., 0, 0] = b4
    adj_b[..., 0, 1] = -b2
    adj_b[..., 1, 0] = -b3
    adj_b[..., 1, 1] = b1

    sh = np.shape(b1) + (1, 1)
    d1 = np.reshape(d1, sh)
    d2 = np.reshape(d2, sh)

    order0 = (9.0 / a) * adj0
    order1 = adj_b / a - (9.0 * d1 / a**2) * adj0
    order2 = -(d1 / a**2) * adj_b + 9.0 * (d1**2 / a**3 - d2 / a**2) * adj0
    if np.shape(b1) == ():
        order0 = np.broadcast_to(order0, (2, 2)).copy()
    else:
        order0 = np.broadcast_to(order0, np.shape(b1) + (2, 2)).copy()
    return order0, order1, order2


def k_inverse_taylor(ctx, v, order):
    """A single Taylor term of K^{-1}(v) around v = 0."""
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order}")
    return kinv_taylor_terms(ctx, v)[order]
