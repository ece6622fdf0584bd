"""Single-pass ensemble statistics and least-squares order fitting.

Moments accumulate in the numerically stable (mean, M2, M3, M4) form with the
pairwise-merge update, so path batches can be reduced in any order and any
degree of parallelism gives identical results up to floating-point rounding.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError


class StreamingMoments:
    """Central moments up to order 4, accumulated over axis 0 of added batches.

    All entries are arrays of a fixed trailing shape (e.g. one slot per
    recorded time), so a single accumulator tracks a whole observable series.
    """

    def __init__(self, shape=()):
        self.n = 0
        self.mean = np.zeros(shape)
        self.m2 = np.zeros(shape)
        self.m3 = np.zeros(shape)
        self.m4 = np.zeros(shape)

    def add(self, batch):
        """batch: array (B, *shape) of per-path values."""
        batch = np.asarray(batch, dtype=float)
        other = StreamingMoments(self.mean.shape)
        other.n = batch.shape[0]
        if other.n == 0:
            return self
        other.mean = batch.mean(axis=0)
        d = batch - other.mean
        other.m2 = np.sum(d**2, axis=0)
        other.m3 = np.sum(d**3, axis=0)
        other.m4 = np.sum(d**4, axis=0)
        return self.merge(other)

    def merge(self, other):
        na, nb = self.n, other.n
        if nb == 0:
            return self
        if na == 0:
            self.n = other.n
            self.mean = other.mean.copy()
            self.m2 = other.m2.copy()
            self.m3 = other.m3.copy()
            self.m4 = other.m4.copy()
            return self
        n = na + nb
        d = other.mean - self.mean
        m2 = (
            self.m2
            + other.m2
            + d**2 * na * nb / n
        )
        m3 = (
            self.m3
            + other.m3
            + d**3 * na * nb * (na - nb) / n**2
            + 3.0 * d * (na * other.m2 - nb * self.m2) / n
        )
        m4 = (
            self.m4
            + other.m4
            + d**4 * na * nb * (na**2 - na * nb + nb**2) / n**3
            + 6.0 * d**2 * (na**2 * other.m2 + nb**2 * self.m2) / n**2
            + 4.0 * d * (na * other.m3 - nb * self.m3) / n
        )
        self.mean = self.mean + d * nb / n
        self.n, self.m2, self.m3, self.m4 = n, m2, m3, m4
        return self

    @property
    def variance(self):
        if self.n < 2:
            return np.zeros_like(self.m2)
        return self.m2 / (self.n - 1)

    @property
    def se_mean(self):
        if self.n < 2:
            return np.full_like(self.m2, np.inf)
        return np.sqrt(self.variance / self.n)

    @property
    def se_variance(self):
        """Standard error of the sample variance via the fourth moment."""
        n = self.n
        if n < 4:
            return np.full_like(self.m2, np.inf)
        m4 = self.m4 / n
        s2 = self.variance
        var_of_var = (m4 - (n - 3) / (n - 1) * s2**2) / n
        return np.sqrt(np.clip(var_of_var, 0.0, None))


@dataclass(frozen=True)
class OrderFit:
    beta: float       # fitted exponent in error ~ k * sigma^beta
    k: float
    residual: float   # rms residual of the log-log fit


def fit_order(sigmas, errors):
    """Least squares on log(error) = log(k) + beta log(sigma)."""
    sigmas = np.asarray(sigmas, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if sigmas.size < 3:
        raise DomainError("order fit needs at least 3 noise levels")
    if np.any(sigmas <= 0) or np.any(errors <= 0):
        raise DomainError("order fit requires positive sigmas and errors")
    ls, le = np.log(sigmas), np.log(errors)
    (beta, logk), res, *_ = np.polyfit(ls, le, 1, full=True)
    rms = float(np.sqrt(res[0] / len(ls))) if len(res) else 0.0
    return OrderFit(beta=float(beta), k=float(np.exp(logk)), residual=rms)
