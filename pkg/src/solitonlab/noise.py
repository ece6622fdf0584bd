"""Seeded noise generation, frame rescaling, and convolution covariances.

Three driving-noise kinds: "scalar" (one Brownian motion multiplying the whole
field), "white" (space-time white noise, one Gaussian per cell with variance
dt/dx), and "colored" (white noise smoothed by the half-kernel of a Gaussian
convolution covariance). Streams are counter-based (Philox) and keyed by
(seed, stream_id), so every Monte Carlo path owns a reproducible substream.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

KINDS = ("scalar", "white", "colored")
RNG_ALGORITHM = "numpy.random.Philox, key = (seed << 64) + stream_id"


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    seed: int
    stream_id: int = 0
    correlation_len: float = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown noise kind {self.kind!r}")
        if self.kind == "colored" and not (
            self.correlation_len and self.correlation_len > 0
        ):
            raise DomainError("colored noise requires correlation_len > 0")


@dataclass
class NoiseIncrement:
    dt: float
    kind: str
    scalar_dW: float = None
    field_dW: np.ndarray = None


def make_generator(spec, stream_id=None):
    sid = spec.stream_id if stream_id is None else stream_id
    key = ((int(spec.seed) & (2**64 - 1)) << 64) + (int(sid) & (2**64 - 1))
    return np.random.Generator(np.random.Philox(key=key))


def gaussian_kernel_symbol(grid, correlation_len, alpha=1.0):
    """rfft symbol of circular convolution with the rescaled Gaussian kernel.

    The kernel (alpha/(2 zeta)) exp(-pi alpha^2 x^2 / (4 zeta^2)) has unit mass,
    so rescaling by alpha is the same kernel with zeta -> zeta/alpha. It is
    sampled on the periodic grid (minimum-image distances) and transformed.
    """
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    zeff = correlation_len / alpha
    period = grid.npoints * grid.dx
    d = np.arange(grid.npoints) * grid.dx
    d = np.where(d > 0.5 * period, d - period, d)
    kernel = 0.5 / zeff * np.exp(-np.pi * d**2 / (4.0 * zeff**2))
    return np.fft.rfft(kernel).real * grid.dx


def apply_Q_alpha(f, alpha, correlation_len, grid):
    sym = gaussian_kernel_symbol(grid, correlation_len, alpha)
    return grid.irfft(grid.rfft(f) * sym)


def apply_Q_half_alpha(f, alpha, correlation_len, grid):
    sym = gaussian_kernel_symbol(grid, correlation_len, alpha)
    return grid.irfft(grid.rfft(f) * np.sqrt(np.clip(sym, 0.0, None)))


def sample_block(spec, grid, dt, nsteps, generator=None):
    """nsteps consecutive increments: (nsteps,) scalars or (nsteps, M) fields."""
    if dt < 0:
        raise DomainError(f"dt must be nonnegative, got {dt}")
    rng = generator if generator is not None else make_generator(spec)
    if spec.kind == "scalar":
        return np.sqrt(dt) * rng.standard_normal(nsteps)
    w = np.sqrt(dt / grid.dx) * rng.standard_normal((nsteps, grid.npoints))
    if spec.kind == "colored":
        sym = np.sqrt(
            np.clip(gaussian_kernel_symbol(grid, spec.correlation_len), 0.0, None)
        )
        w = grid.irfft(grid.rfft(w) * sym)
    return w


def sample_increment(spec, grid, dt, generator=None):
    block = sample_block(spec, grid, dt, 1, generator)
    if spec.kind == "scalar":
        return NoiseIncrement(dt=dt, kind=spec.kind, scalar_dW=float(block[0]))
    return NoiseIncrement(dt=dt, kind=spec.kind, field_dW=block[0])


def _col(a):
    """Shape per-path scalars (B,) -> (B, 1) so they broadcast over cells."""
    a = np.asarray(a, dtype=float)
    return a[..., None] if a.ndim > 0 else a


def _gather(f, i):
    """f[..., i] with an index array that may carry the same batch shape."""
    if i.ndim >= f.ndim and i.ndim > 1:
        return np.take_along_axis(np.broadcast_to(f, i.shape[:-1] + f.shape[-1:]), i, -1)
    return f[..., i]


def rescale_field(f, alpha, xi, grid):
    """Smooth-field version of T_{alpha, xi}: f(alpha x + xi), linear interp.

    alpha and xi may be scalars or per-path arrays (B,) matching f's batch.
    """
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha <= 0):
        raise DomainError("alpha must be positive")
    m = grid.npoints
    f = np.asarray(f, dtype=float)
    t = (_col(alpha) * grid.x + _col(xi) + grid.L) / grid.dx
    i = np.floor(t).astype(int)
    frac = t - i
    i0 = np.mod(i, m)
    i1 = np.mod(i + 1, m)
    return (1.0 - frac) * _gather(f, i0) + frac * _gather(f, i1)


def _cell_average(w, positions, halfwidth, grid):
    """Average of the piecewise-constant field w over [p - h, p + h], periodic."""
    m = grid.npoints
    total = np.sum(w, axis=-1, keepdims=True) * grid.dx
    csum = np.concatenate(
        [np.zeros(w.shape[:-1] + (1,)), np.cumsum(w, axis=-1) * grid.dx], axis=-1
    )

    def antideriv(y):
        # y in edge coordinates, any real value; F grows by `total` per period
        t = (y + grid.L + 0.5 * grid.dx) / grid.dx
        wraps = np.floor(t / m)
        t = t - wraps * m
        i = np.clip(np.floor(t).astype(int), 0, m - 1)
        frac = t - i
        return _gather(csum, i) + frac * _gather(w, i) * grid.dx + wraps * total

    hi = antideriv(positions + halfwidth)
    lo = antideriv(positions - halfwidth)
    return (hi - lo) / (2.0 * halfwidth)


def rescale_noise(inc, alpha, xi, grid):
    """Frame-rescaled noise increment alpha^{1/2} T_{alpha, xi} dW.

    Field increments are resampled by averaging the piecewise-constant noise
    density over the back-transformed cell [alpha x_n + xi +- alpha dx/2],
    which preserves the per-cell variance dt/dx (for alpha >= 1) in a way that
    point interpolation cannot. Scalar increments are returned unchanged.
    alpha and xi may be scalars or per-path arrays (B,).
    """
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha <= 0):
        raise DomainError("alpha must be positive")
    if inc.kind == "scalar":
        return inc
    positions = _col(alpha) * grid.x + _col(xi)
    avg = _cell_average(inc.field_dW, positions, 0.5 * _col(alpha) * grid.dx, grid)
    return NoiseIncrement(
        dt=inc.dt, kind=inc.kind, field_dW=np.sqrt(_col(alpha)) * avg
    )
