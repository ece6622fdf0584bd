import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solitonlab.exceptions import DomainError
from solitonlab.stats import OrderFit, StreamingMoments, fit_order


def _two_pass(data):
    n = data.shape[0]
    mean = data.mean(axis=0)
    d = data - mean
    return n, mean, np.sum(d**2, 0), np.sum(d**3, 0), np.sum(d**4, 0)


def test_single_batch_matches_two_pass(rng):
    data = rng.standard_normal((500, 7))
    acc = StreamingMoments((7,)).add(data)
    n, mean, m2, m3, m4 = _two_pass(data)
    assert acc.n == n
    assert np.allclose(acc.mean, mean, atol=1e-12)
    assert np.allclose(acc.m2, m2, atol=1e-9)
    assert np.allclose(acc.m3, m3, atol=1e-8)
    assert np.allclose(acc.m4, m4, atol=1e-7)
    assert np.allclose(acc.variance, data.var(axis=0, ddof=1), atol=1e-12)


@given(
    split=st.integers(min_value=1, max_value=199),
    seed=st.integers(min_value=0, max_value=2**16),
)
@settings(max_examples=25, deadline=None)
def test_merge_invariant_under_split(split, seed):
    data = np.random.default_rng(seed).standard_normal((200, 3))
    whole = StreamingMoments((3,)).add(data)
    parts = StreamingMoments((3,)).add(data[:split]).add(data[split:])
    scale = np.maximum(np.abs(whole.m4), 1.0)
    assert parts.n == whole.n
    assert np.allclose(parts.mean, whole.mean, atol=1e-10)
    assert np.allclose(parts.m2, whole.m2, atol=1e-8)
    assert np.allclose(parts.m3, whole.m3, atol=1e-7)
    assert np.allclose(parts.m4 / scale, whole.m4 / scale, atol=1e-8)


def test_merge_order_independent(rng):
    a = rng.standard_normal((40, 2))
    b = rng.standard_normal((60, 2))
    ab = StreamingMoments((2,)).add(a).add(b)
    ba = StreamingMoments((2,)).add(b).add(a)
    assert np.allclose(ab.mean, ba.mean, atol=1e-12)
    assert np.allclose(ab.m4, ba.m4, atol=1e-8)


def test_empty_batch_is_noop():
    acc = StreamingMoments((2,))
    acc.add(np.empty((0, 2)))
    assert acc.n == 0
    assert np.all(acc.se_mean == np.inf)


def test_se_mean_formula(rng):
    data = rng.standard_normal((1000,))
    acc = StreamingMoments(()).add(data)
    want = data.std(ddof=1) / np.sqrt(1000)
    assert acc.se_mean == pytest.approx(want, rel=1e-12)


def test_se_variance_gaussian_scaling(rng):
    # for Gaussian data Var(s^2) ~ 2 sigma^4 / n
    n = 200000
    data = rng.standard_normal((n,))
    acc = StreamingMoments(()).add(data)
    assert acc.se_variance == pytest.approx(np.sqrt(2.0 / n), rel=0.05)


def test_fit_order_exact_power_law():
    sigmas = np.array([0.05, 0.075, 0.1, 0.125])
    errors = 3.7 * sigmas**2.4
    fit = fit_order(sigmas, errors)
    assert isinstance(fit, OrderFit)
    assert fit.beta == pytest.approx(2.4, abs=1e-10)
    assert fit.k == pytest.approx(3.7, rel=1e-10)
    assert fit.residual < 1e-12


def test_fit_order_noisy_power_law(rng):
    sigmas = np.array([0.05, 0.075, 0.1, 0.125])
    errors = 2.0 * sigmas**3 * np.exp(0.02 * rng.standard_normal(4))
    fit = fit_order(sigmas, errors)
    assert abs(fit.beta - 3.0) < 0.2
    assert fit.residual < 0.05


def test_fit_order_input_validation():
    with pytest.raises(DomainError):
        fit_order([0.1, 0.2], [1.0, 2.0])
    with pytest.raises(DomainError):
        fit_order([0.1, 0.2, -0.3], [1.0, 2.0, 3.0])
    with pytest.raises(DomainError):
        fit_order([0.1, 0.2, 0.3], [1.0, 0.0, 3.0])
