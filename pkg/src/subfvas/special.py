"""Gamma function via a Lanczos approximation (g = 7, 9 terms)."""

import math

import numpy as np

_G = 7.0
_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def gamma(x: float) -> float:
    """Gamma(x) for real x that is not a non-positive integer.

    Relative accuracy is about 1e-15 on [0.2, 5].
    """
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise ValueError(f"gamma has a pole at {x}")
    if x < 0.5:
        # reflection
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    x -= 1.0
    acc = _COEF[0]
    for k in range(1, len(_COEF)):
        acc += _COEF[k] / (x + k)
    tt = x + _G + 0.5
    return _SQRT_2PI * tt ** (x + 0.5) * math.exp(-tt) * acc


def beta_fn(a: float, b: float) -> float:
    return gamma(a) * gamma(b) / gamma(a + b)


def norm_cdf(x):
    """Standard normal CDF, vectorized."""
    x = np.asarray(x, dtype=float)
    return 0.5 * (1.0 + np.vectorize(math.erf, otypes=[float])(x / math.sqrt(2.0)))
