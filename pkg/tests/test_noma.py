from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nomacsk import noma


@pytest.mark.parametrize("n,expected", [
    (1, [Fraction(1)]),
    (2, [Fraction(2, 3), Fraction(1, 3)]),
    (4, [Fraction(8, 15), Fraction(4, 15), Fraction(2, 15), Fraction(1, 15)]),
])
def test_power_coefficients(n, expected):
    assert list(noma.power_coefficients(n).coefficients) == expected


@given(st.integers(1, 40))
def test_power_coefficient_invariants(n):
    c = noma.power_coefficients(n).coefficients
    assert sum(c) == 1
    assert all(0 < a <= 1 for a in c)
    assert all(c[i] == 2 * c[i + 1] for i in range(n - 1))


@pytest.mark.parametrize("bad", [0, -1, 2.5])
def test_power_coefficients_reject(bad):
    with pytest.raises(ValueError):
        noma.power_coefficients(bad)


def test_scale_signal_examples():
    np.testing.assert_allclose(noma.scale_signal(np.array([1.0, -1.0]), 1, 1), [1, -1])
    np.testing.assert_allclose(noma.scale_signal(np.array([1.0, -1.0]), 0.25, 4), [1, -1])
    with pytest.raises(ValueError):
        noma.scale_signal(np.ones(2), 0.0, 1)


@given(st.floats(0.01, 1), st.floats(0.01, 100), st.integers(0, 2 ** 31))
def test_scale_signal_energy_ratio(alpha, p, seed):
    x = np.random.default_rng(seed).normal(size=32)
    y = noma.scale_signal(x, alpha, p)
    assert np.sum(y ** 2) / np.sum(x ** 2) == pytest.approx(alpha * p, rel=1e-12)


def test_superpose_examples():
    np.testing.assert_array_equal(noma.superpose([[1, 0], [0, 1]]), [1, 1])
    np.testing.assert_array_equal(noma.superpose([[3 + 1j]]), [3 + 1j])
    with pytest.raises(ValueError):
        noma.superpose([[1, 2], [1, 2, 3]])
    with pytest.raises(ValueError):
        noma.superpose([])


@given(st.permutations(range(4)), st.integers(0, 2 ** 31))
def test_superpose_commutes(perm, seed):
    rng = np.random.default_rng(seed)
    sig = [rng.normal(size=8) + 1j * rng.normal(size=8) for _ in range(4)]
    np.testing.assert_allclose(noma.superpose([sig[i] for i in perm]), noma.superpose(sig), atol=1e-12)


def test_noise_density():
    # Eb = P*beta/N = 16 -> N0 = 16 / 10^(12/10)
    assert noma.noise_density(12.0, 64, 4) == pytest.approx(16 / 10 ** 1.2)
    assert noma.bit_energy(32, 2, 2.0) == 32.0
