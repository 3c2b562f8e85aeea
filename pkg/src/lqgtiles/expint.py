"""Exponential integral E1 for positive real arguments.

Series expansion below 1, modified-Lentz continued fraction above.
Absolute accuracy target 1e-12; cross-checked in the test suite against
adaptive quadrature of the defining integral and scipy.special.exp1.
"""
import math

import numpy as np

_EULER_GAMMA = 0.57721566490153286060651209008240243

_ABS_TOL = 1e-15
_MAX_ITER = 400


def _e1_series(x: float) -> float:
    # E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
    total = -_EULER_GAMMA - math.log(x)
    term = 1.0
    for k in range(1, _MAX_ITER):
        term *= -x / k
        delta = -term / k
        total += delta
        if abs(delta) < _ABS_TOL * max(1.0, abs(total)):
            return total
    raise RuntimeError(f"E1 series failed to converge at x={x}")


def _e1_contfrac(x: float) -> float:
    # Lentz evaluation of E1(x) = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        a = -i * i
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x)


def e1(x):
    """E1(x) for x > 0, scalar or array."""
    if np.isscalar(x) or isinstance(x, float):
        return _e1_scalar(float(x))
    arr = np.asarray(x, dtype=float)
    out = np.empty_like(arr)
    flat_in = arr.ravel()
    flat_out = out.ravel()
    for i, v in enumerate(flat_in):
        flat_out[i] = _e1_scalar(float(v))
    return out


def _e1_scalar(x: float) -> float:
    if not x > 0.0:
        raise ValueError(f"E1 requires x > 0, got {x}")
    if x > 700.0:
        return 0.0  # below double underflow of e^{-x}
    if x < 1.0:
        return _e1_series(x)
    return _e1_contfrac(x)
