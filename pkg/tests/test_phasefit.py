import numpy as np
import pytest

from solitonlab.exceptions import NoConvergenceError
from solitonlab.phasefit import fit_phase, fit_series, phase_shift, translate
from solitonlab.soliton import soliton_profile


def test_translate_roundtrip(grid, rng):
    u = np.exp(-0.3 * grid.x**2) * np.sin(grid.x)
    back = translate(grid, translate(grid, u, 1.7), -1.7)
    assert np.allclose(back, u, atol=1e-10)


def test_exact_soliton_recovery(grid):
    u = soliton_profile(1.0, grid.x)
    fit = fit_phase(grid, u, c_init=0.8)
    assert fit.c == pytest.approx(1.0, abs=1e-8)
    assert fit.xi == pytest.approx(0.0, abs=1e-8)
    assert fit.iterations <= 10


def test_translated_soliton(grid):
    x0 = 4.3
    u = soliton_profile(2.0, grid.x - x0)
    fit = fit_phase(grid, u, c_init=1.5)
    assert fit.c == pytest.approx(2.0, abs=1e-6)
    # xi convention: u(. + xi) recenters the pulse
    assert fit.xi == pytest.approx(x0, abs=1e-6)


@pytest.mark.parametrize("eps", [0.05, 0.1])
def test_scaled_family_member(grid, eps):
    # u = (1+eps)^2 phi_c((1+eps) x) belongs to the family with c = c (1+eps)^2
    s = 1.0 + eps
    u = s**2 * soliton_profile(1.0, s * grid.x)
    fit = fit_phase(grid, u, c_init=1.0)
    assert fit.c == pytest.approx(s**2, rel=1e-6)
    assert abs(fit.xi) < 1e-6


def test_noisy_field_converges(grid, rng):
    u = soliton_profile(1.0, grid.x - 1.0) + 0.02 * rng.standard_normal(grid.npoints)
    fit = fit_phase(grid, u, c_init=1.0)
    assert abs(fit.c - 1.0) < 0.1
    assert abs(fit.xi - 1.0) < 0.2
    assert fit.residual <= 1e-8 * grid.norm(u)


def test_fit_series_warm_start(grid):
    shifts = [0.0, 0.2, 0.4, 0.6]
    fields = [soliton_profile(1.1, grid.x - s) for s in shifts]
    cs, xis = fit_series(grid, fields, c_init=1.0)
    assert np.allclose(cs, 1.1, atol=1e-8)
    assert np.allclose(xis, shifts, atol=1e-8)


def test_no_convergence_raises(grid):
    # a field with no soliton structure stalls the Newton iteration
    u = np.sin(0.5 * grid.x)
    with pytest.raises(NoConvergenceError):
        fit_phase(grid, u, c_init=1.0)


def test_phase_shift_of_unperturbed_motion():
    ts = np.linspace(0.0, 2.0, 21)
    cs = np.full_like(ts, 1.3)
    xis = 1.3 * ts
    assert np.allclose(phase_shift(ts, cs, xis), 0.0, atol=1e-12)


def test_phase_shift_accumulates_offset():
    ts = np.linspace(0.0, 1.0, 11)
    cs = np.ones_like(ts)
    xis = ts + 0.05
    assert np.allclose(phase_shift(ts, cs, xis), 0.05, atol=1e-12)
