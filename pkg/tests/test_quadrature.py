import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import betainc, beta

from subfvas.errors import DomainError
from subfvas.quadrature import (
    QuadratureSpec,
    gauss_legendre,
    integrate,
    integrate_singular,
    integrate_singular_graded,
    tail_integral,
)


class TestSpec:
    def test_defaults(self):
        q = QuadratureSpec()
        assert (q.panels, q.nodes_per_panel) == (64, 16)

    @pytest.mark.parametrize("kw", [dict(panels=0), dict(nodes_per_panel=1),
                                    dict(singularity_exponent=-1.0), dict(panels=2.5)])
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            QuadratureSpec(**kw)

    def test_refined(self):
        assert QuadratureSpec().refined(10).panels == 640


def test_gauss_legendre_exact_for_polynomials():
    x, w = gauss_legendre(8)
    for k in range(16):
        exact = (1 - (-1) ** (k + 1)) / (k + 1)
        assert np.dot(w, x**k) == pytest.approx(exact, abs=1e-14)


def test_integrate_smooth():
    assert integrate(np.exp, 0.0, 2.0) == pytest.approx(math.expm1(2.0), rel=1e-14)
    assert integrate(np.sin, 1.0, 1.0) == 0.0


@pytest.mark.parametrize("p", [-0.95, -0.8, -0.5, -0.2, 0.0, 0.3, 1.5])
def test_singular_power(p):
    # int_0^2 x^p e^{-x} dx = lower incomplete gamma
    mp.mp.dps = 30
    ref = float(mp.gammainc(p + 1, 0, 2))
    got = integrate_singular(lambda d: np.exp(-d), 0.0, 2.0, p)
    assert got == pytest.approx(ref, rel=1e-13)


@pytest.mark.parametrize("p", [-0.7, 0.2])
def test_singular_right_side(p):
    # int_0^1 (1-x)^p x dx = 1/((p+1)(p+2))
    got = integrate_singular(lambda d: 1.0 - d, 0.0, 1.0, p, side="right")
    assert got == pytest.approx(1.0 / ((p + 1) * (p + 2)), rel=1e-13)


def test_singular_partial_range():
    # int_{0.25}^1 x^-0.5 dx = 2 - 1
    got = integrate_singular(lambda d: np.ones_like(d), 0.0, 1.0, -0.5, lo=0.25)
    assert got == pytest.approx(1.0, rel=1e-14)


def test_graded_resolves_short_scale():
    # int_0^1 x^-0.3 / (x + eps) dx with eps tiny, against mpmath
    eps = 1e-5
    mp.mp.dps = 30
    ref = float(mp.quad(lambda x: x**-0.3 / (x + eps), [0, eps, 1]))
    got = integrate_singular_graded(lambda d: 1.0 / (d + eps), 0.0, 1.0, -0.3, eps)
    assert got == pytest.approx(ref, rel=1e-11)


def test_non_integrable_rejected():
    with pytest.raises(DomainError):
        integrate_singular(np.exp, 0.0, 1.0, -1.0)
    with pytest.raises(DomainError):
        tail_integral(np.array([0.5]), 0.0, -1.2)


class TestTailIntegral:
    a = np.concatenate([[0.0], np.logspace(-9, -0.01, 40), np.linspace(0.5, 0.999, 20)])

    @pytest.mark.parametrize("H", [0.55, 0.7, 0.9])
    def test_against_incomplete_beta(self, H):
        # int_a^1 v^p (1-v)^e dv = B(e+1, p+1) I_{1-a}(e+1, p+1); betainc itself
        # is only good to a few 1e-10 for p near -1, hence the looser bound
        for p, e in ((-H, H - 1.5), (H - 1.0, 1.5 - H)):
            ref = beta(p + 1, e + 1) * betainc(e + 1, p + 1, 1 - self.a)
            got = tail_integral(self.a, p, e)
            assert np.max(np.abs(got / ref - 1)) <= 1e-9

    @pytest.mark.parametrize("a", [1e-45, 1e-20, 1e-9, 3e-4])
    @pytest.mark.parametrize("p,e", [(-0.9, -0.6), (-0.6, -0.3), (-0.2, 0.4), (-1.3, 0.2)])
    def test_tiny_lower_limit(self, a, p, e):
        mp.mp.dps = 30
        A = mp.mpf(a)
        pts = [A * mp.mpf(10) ** k for k in range(int(-math.log10(a)) + 1) if a * 10**k < 0.5]
        ref = float(mp.quad(lambda v: v**p * (1 - v) ** e, pts + [0.5, 1]))
        assert tail_integral(np.array([a]), p, e)[0] == pytest.approx(ref, rel=1e-12)

    def test_from_zero(self):
        for p, e in ((-0.9, -0.6), (-0.3, 0.2)):
            assert tail_integral(np.array([0.0]), p, e)[0] == pytest.approx(beta(p + 1, e + 1), rel=1e-12)

    def test_strongly_singular_lower_end(self):
        H = 0.7
        p, e = H - 2.0, 1.5 - H
        mp.mp.dps = 30
        for av in (1e-8, 1e-3, 0.2, 0.7):
            ref = float(mp.quad(lambda v: v**p * (1 - v) ** e, [av, 1]))
            assert tail_integral(np.array([av]), p, e)[0] == pytest.approx(ref, rel=1e-11)

    limits = st.one_of(st.just(0.0), st.floats(1e-12, 0.99))

    @given(limits, limits)
    def test_additivity(self, a, b):
        lo, hi = sorted((a, b))
        p, e = -0.6, -0.3
        full = tail_integral(np.array([lo, hi]), p, e)
        mp.mp.dps = 30
        pts = [mp.mpf(lo)] + [mp.mpf(x) for x in np.geomspace(max(lo, 1e-300), hi, 30)[1:]] if hi > lo else []
        piece = float(mp.quad(lambda v: v**p * (1 - v) ** e, pts)) if hi > lo else 0.0
        assert full[0] - full[1] == pytest.approx(piece, rel=1e-9, abs=1e-11 * full[1])
