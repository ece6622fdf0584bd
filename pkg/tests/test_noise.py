import numpy as np
import pytest

from solitonlab.exceptions import DomainError
from solitonlab.grid import SpatialGrid
from solitonlab.noise import (
    NoiseIncrement,
    NoiseSpec,
    apply_Q_alpha,
    apply_Q_half_alpha,
    gaussian_kernel_symbol,
    make_generator,
    rescale_field,
    rescale_noise,
    sample_block,
    sample_increment,
)


@pytest.fixture(scope="module")
def small_grid():
    return SpatialGrid(L=20.0, N=128)


def test_spec_validation():
    with pytest.raises(DomainError):
        NoiseSpec(kind="pink", seed=0)
    with pytest.raises(DomainError):
        NoiseSpec(kind="colored", seed=0)  # missing correlation length
    NoiseSpec(kind="colored", seed=0, correlation_len=0.5)


def test_streams_reproducible_and_distinct(small_grid):
    spec = NoiseSpec(kind="scalar", seed=42)
    a = sample_block(spec, small_grid, 1e-3, 10, make_generator(spec, 7))
    b = sample_block(spec, small_grid, 1e-3, 10, make_generator(spec, 7))
    c = sample_block(spec, small_grid, 1e-3, 10, make_generator(spec, 8))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_scalar_variance_band(small_grid):
    spec = NoiseSpec(kind="scalar", seed=3)
    dt = 1e-3
    draws = sample_block(spec, small_grid, dt, 100000)
    assert 0.95e-3 < np.var(draws) < 1.05e-3


def test_white_cell_variance(small_grid):
    spec = NoiseSpec(kind="white", seed=4)
    dt = 1e-3
    w = sample_block(spec, small_grid, dt, 4000)
    cell_var = np.var(w, axis=0)
    want = dt / small_grid.dx
    assert np.abs(np.mean(cell_var) / want - 1.0) < 0.05


def test_white_noise_isometry(small_grid):
    # cov(<dW, w1>, <dW, w2>) = dt <w1, w2>
    g = small_grid
    spec = NoiseSpec(kind="white", seed=5)
    dt = 1e-3
    w1 = np.exp(-0.5 * (g.x + 3.0) ** 2)
    w2 = np.exp(-0.5 * (g.x - 1.0) ** 2) * np.sin(g.x)
    gen = make_generator(spec)
    n = 100000
    p1 = np.empty(n)
    p2 = np.empty(n)
    done = 0
    while done < n:
        b = min(20000, n - done)
        blk = sample_block(spec, g, dt, b, gen)
        p1[done : done + b] = g.quad(blk, w1)
        p2[done : done + b] = g.quad(blk, w2)
        done += b
    want = dt * g.quad(w1, w2)
    cov = np.mean(p1 * p2) - np.mean(p1) * np.mean(p2)
    se = np.std(p1 * p2, ddof=1) / np.sqrt(n)
    assert abs(cov - want) < 3.0 * se


def test_kernel_symbol_has_unit_mass(small_grid):
    sym = gaussian_kernel_symbol(small_grid, correlation_len=1.0)
    assert sym[0] == pytest.approx(1.0, abs=1e-6)
    assert np.all(sym <= 1.0 + 1e-12)


def test_half_kernel_squares_to_kernel(small_grid, rng):
    f = rng.standard_normal(small_grid.npoints)
    once = apply_Q_alpha(f, 1.3, 0.8, small_grid)
    twice = apply_Q_half_alpha(
        apply_Q_half_alpha(f, 1.3, 0.8, small_grid), 1.3, 0.8, small_grid
    )
    assert np.allclose(once, twice, atol=1e-10)


def test_rescaling_commutes_with_convolution(small_grid):
    # (Q_b f)(a x + xi) = Q_{ba} [f(a . + xi)](x) for smooth f
    g = small_grid
    f = np.exp(-0.5 * g.x**2) * (1.0 + 0.3 * np.sin(g.x))
    a, b, xi = 1.2, 0.9, 0.7
    lhs = rescale_field(apply_Q_alpha(f, b, 1.0, g), a, xi, g)
    rhs = apply_Q_alpha(rescale_field(f, a, xi, g), b * a, 1.0, g)
    assert np.max(np.abs(lhs - rhs)) < 2e-3 * np.max(np.abs(f))


def test_rescaling_adjoint_identity():
    # <T_{a,xi} f, g> = <f, a^{-1} T_{1/a, -xi/a} g>
    # linear interpolation limits the accuracy, so use a fine grid
    g = SpatialGrid(L=20.0, N=2048)
    f = np.exp(-0.5 * (g.x - 1.0) ** 2)
    h = np.exp(-0.25 * (g.x + 2.0) ** 2) * np.cos(0.5 * g.x)
    a, xi = 1.4, 0.6
    lhs = g.quad(rescale_field(f, a, xi, g), h)
    rhs = g.quad(f, rescale_field(h, 1.0 / a, -xi / a, g) / a)
    assert abs(lhs - rhs) < 1e-5 * abs(lhs)


def test_rescale_field_identity_and_batch(small_grid, rng):
    f = rng.standard_normal(small_grid.npoints)
    assert np.allclose(rescale_field(f, 1.0, 0.0, small_grid), f, atol=1e-12)
    batch = np.stack([f, 2 * f])
    alphas = np.array([1.0, 1.5])
    xis = np.array([0.0, 0.3])
    out = rescale_field(batch, alphas, xis, small_grid)
    assert np.allclose(out[0], f)
    assert np.allclose(out[1], rescale_field(2 * f, 1.5, 0.3, small_grid))


def test_rescale_field_rejects_nonpositive_alpha(small_grid):
    with pytest.raises(DomainError):
        rescale_field(np.zeros(small_grid.npoints), -1.0, 0.0, small_grid)


def test_rescale_noise_identity_frame(small_grid):
    spec = NoiseSpec(kind="white", seed=6)
    inc = sample_increment(spec, small_grid, 1e-3)
    out = rescale_noise(inc, 1.0, 0.0, small_grid)
    assert np.allclose(out.field_dW, inc.field_dW, atol=1e-12)


def test_rescale_noise_scalar_passthrough(small_grid):
    inc = NoiseIncrement(dt=1e-3, kind="scalar", scalar_dW=0.5)
    assert rescale_noise(inc, 2.0, 1.0, small_grid) is inc


def test_rescale_noise_preserves_white_statistics(small_grid):
    # projections of the rescaled increment onto smooth test functions keep
    # the white-noise covariance dt <w1, w2>
    g = small_grid
    spec = NoiseSpec(kind="white", seed=7)
    dt = 1e-3
    gen = make_generator(spec)
    alpha, xi = 1.37, 0.41
    w1 = np.exp(-0.5 * (g.x - 1.0) ** 2)
    w2 = np.exp(-0.25 * g.x**2) * (1.0 + 0.5 * np.cos(0.7 * g.x))
    p1, p2 = [], []
    for _ in range(50):
        blk = sample_block(spec, g, dt, 500, gen)
        inc = NoiseIncrement(dt=dt, kind="white", field_dW=blk)
        out = rescale_noise(inc, alpha, xi, g)
        p1.append(g.quad(out.field_dW, w1))
        p2.append(g.quad(out.field_dW, w2))
    p1 = np.concatenate(p1)
    p2 = np.concatenate(p2)
    n = p1.size
    want = dt * g.quad(w1, w2)
    cov = np.mean(p1 * p2) - np.mean(p1) * np.mean(p2)
    se = np.std(p1 * p2, ddof=1) / np.sqrt(n)
    assert abs(cov - want) < 3.0 * se
    want11 = dt * g.quad(w1, w1)
    var11 = np.var(p1, ddof=1)
    se11 = np.std(p1**2, ddof=1) / np.sqrt(n)
    assert abs(var11 - want11) < 3.0 * se11


def test_sample_block_rejects_negative_dt(small_grid):
    spec = NoiseSpec(kind="scalar", seed=0)
    with pytest.raises(DomainError):
        sample_block(spec, small_grid, -1e-3, 1)
