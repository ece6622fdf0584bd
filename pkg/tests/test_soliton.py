import numpy as np
import pytest

from solitonlab.exceptions import DomainError
from solitonlab.grid import SpatialGrid
from solitonlab.soliton import (
    SolitonContext,
    dphi_dc,
    dzeta_dc,
    soliton_profile,
    soliton_profile_dx,
    soliton_profile_dxx,
    zeta_profile,
    zeta_profile_dx,
    zeta_profile_dxx,
)


@pytest.mark.parametrize("c", [1.0, 3.0])
def test_profile_norm_squared(grid, c):
    phi = soliton_profile(c, grid.x)
    assert grid.quad(phi, phi) == pytest.approx(6.0 * c**1.5, abs=1e-6)


def test_peak_value():
    assert soliton_profile(4.0, 0.0) == pytest.approx(6.0)


def test_scaling_law(rng):
    x = rng.uniform(-10, 10, size=50)
    for c in (0.5, 2.0, 3.0):
        lhs = soliton_profile(c, x)
        rhs = c * soliton_profile(1.0, np.sqrt(c) * x)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_nonpositive_amplitude_rejected():
    with pytest.raises(DomainError):
        soliton_profile(-1.0, 0.0)
    with pytest.raises(DomainError):
        zeta_profile(0.0, 0.0)


@pytest.mark.parametrize("c", [1.0, 3.0])
def test_travelling_wave_ode(grid, c):
    # phi'' = c phi - phi^2, with phi'' also available by differencing phi'
    phi = soliton_profile(c, grid.x)
    d2 = soliton_profile_dxx(c, grid.x)
    assert np.allclose(d2, c * phi - phi**2, atol=1e-12)
    fd = grid.d1(soliton_profile_dx(c, grid.x))
    assert np.max(np.abs(fd - d2)) < 0.05 * np.max(np.abs(d2))


def test_dphi_dc_finite_difference(grid):
    eps = 1e-6
    fd = (soliton_profile(1.0 + eps, grid.x) - soliton_profile(1.0 - eps, grid.x)) / (
        2 * eps
    )
    assert np.max(np.abs(fd - dphi_dc(1.0, grid.x))) < 1e-8


@pytest.mark.parametrize("c", [1.0, 3.0])
def test_zeta_closed_form_vs_quadrature(c):
    # independent oracle: cumulative Simpson quadrature of dphi_dc from -inf
    from scipy.integrate import cumulative_simpson

    x = np.linspace(-60.0, 30.0, 36001)
    cum = cumulative_simpson(dphi_dc(c, x), x=x, initial=0.0)
    mask = np.abs(x) <= 30.0
    err = np.max(np.abs(cum[mask] - zeta_profile(c, x[mask])))
    assert err < 1e-7


@pytest.mark.parametrize("c", [1.0, 3.0])
def test_zeta_limits(c):
    assert zeta_profile(c, 60.0) == pytest.approx(3.0 / np.sqrt(c), abs=1e-6)
    assert zeta_profile(c, -60.0) == pytest.approx(0.0, abs=1e-6)


def test_zeta_derivatives(grid):
    assert np.allclose(zeta_profile_dx(1.0, grid.x), dphi_dc(1.0, grid.x))
    fd = grid.d1(zeta_profile_dx(1.0, grid.x))
    assert np.max(np.abs(fd - zeta_profile_dxx(1.0, grid.x))) < 5e-3


def test_dzeta_dc_finite_difference(grid):
    eps = 1e-6
    fd = (zeta_profile(1.0 + eps, grid.x) - zeta_profile(1.0 - eps, grid.x)) / (2 * eps)
    assert np.max(np.abs(fd - dzeta_dc(1.0, grid.x))) < 1e-7


def test_integration_by_parts_identity(ctx):
    # <(x d/dx + 2) phi, phi> = (3/2) ||phi||^2
    got = ctx.grid.quad(ctx.a2phi, ctx.phi)
    want = 1.5 * ctx.grid.quad(ctx.phi, ctx.phi)
    assert got == pytest.approx(want, rel=1e-6)


def test_l0_annihilates_translation_mode(ctx):
    # d/dx phi solves the linearized traveling-wave equation
    res = ctx.apply_L0(ctx.dphi)
    assert np.max(np.abs(res)) < 0.05 * np.max(np.abs(ctx.dphi))


def test_apply_l0_matches_dense(ctx, smooth_v):
    assert np.allclose(ctx.L0 @ smooth_v, ctx.apply_L0(smooth_v), atol=1e-10)


def test_profile_combinations(ctx):
    x, g = ctx.x, ctx.grid
    assert np.allclose(ctx.a2phi, x * ctx.dphi + 2 * ctx.phi)
    assert np.allclose(ctx.q2phi, 0.5 * x**2 * ctx.d2phi + 2 * x * ctx.dphi + ctx.phi)
    assert np.allclose(ctx.q3phi, x * ctx.d2phi + 2 * ctx.dphi)


def test_context_validation(grid):
    with pytest.raises(DomainError):
        SolitonContext(grid=grid, c_star=1.0, weight_a=1.5)  # a >= sqrt(c*)
    with pytest.raises(DomainError):
        SolitonContext(grid=grid, c_star=-1.0, weight_a=0.1)


def test_default_norm_window(ctx):
    assert ctx.norm_window == (-ctx.grid.L, ctx.grid.L)
