import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from subfvas.special import beta_fn, gamma, norm_cdf


class TestGamma:
    def test_against_50_digit_oracle(self):
        mp.mp.dps = 50
        xs = np.linspace(0.2, 5.0, 1000)
        err = max(abs(gamma(x) - float(mp.gamma(mp.mpf(float(x))))) for x in xs)
        assert err <= 1e-12

    @pytest.mark.parametrize("x", [0.01, 0.05, 0.1, 7.5, 12.0])
    def test_relative_accuracy_outside_core_range(self, x):
        mp.mp.dps = 30
        assert gamma(x) == pytest.approx(float(mp.gamma(x)), rel=1e-13)

    def test_integers_and_half(self):
        for k in range(1, 8):
            assert gamma(k) == pytest.approx(math.factorial(k - 1), rel=1e-14)
        assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)

    def test_pole(self):
        with pytest.raises(ValueError):
            gamma(0.0)
        with pytest.raises(ValueError):
            gamma(-2.0)

    @given(st.floats(0.2, 4.0))
    def test_recurrence(self, x):
        assert gamma(x + 1) == pytest.approx(x * gamma(x), rel=1e-13)


def test_beta_fn():
    assert beta_fn(2.0, 3.0) == pytest.approx(1.0 / 12.0, rel=1e-14)
    mp.mp.dps = 30
    assert beta_fn(0.3, 0.7) == pytest.approx(float(mp.beta(0.3, 0.7)), rel=1e-13)


def test_norm_cdf():
    mp.mp.dps = 30
    xs = np.linspace(-8, 8, 101)
    ref = np.array([float(mp.ncdf(x)) for x in xs])
    assert np.max(np.abs(norm_cdf(xs) - ref)) <= 1e-10
