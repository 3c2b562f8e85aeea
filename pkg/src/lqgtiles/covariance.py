"""Analytic covariance kernels for the field oracles.

Two kernels live here:

* ``wp_gff_covariance`` -- the whole-plane log-correlated kernel
  log(|z|_+ |w|_+ / |z - w|), used purely as an analytic reference.
* ``wn_covariance`` -- covariance of the white-noise multiscale process
  h_t(z) built by integrating the heat kernel against space-time white
  noise over time range (t^2, 1).  The closed form follows from the
  Chapman-Kolmogorov identity for the Gaussian transition density:

      Cov(h_{ta}(za), h_{tb}(zb)) = (1/2) (E1(r^2/2) - E1(r^2/(2 tau)))

  with r = |za - zb| > 0 and tau = max(ta, tb)^2, and log(1/max(ta,tb))
  on the diagonal r = 0.
"""
import math

import numpy as np

from .errors import DomainError
from .expint import e1


def wp_gff_covariance(z, w) -> float:
    """Whole-plane GFF kernel log(|z|_+ |w|_+ / |z-w|); diverges at z = w."""
    zx, zy = z
    wx, wy = w
    r = math.hypot(zx - wx, zy - wy)
    if r == 0.0:
        raise DomainError("whole-plane kernel diverges at z = w")
    zp = max(math.hypot(zx, zy), 1.0)
    wp = max(math.hypot(wx, wy), 1.0)
    return math.log(zp * wp / r)


def _check_scale(t: float):
    if not (0.0 < t <= 1.0):
        raise DomainError(f"scale must lie in (0, 1], got {t}")


def wn_covariance(za, ta: float, zb, tb: float) -> float:
    """Covariance of the multiscale white-noise field at two nodes."""
    _check_scale(ta)
    _check_scale(tb)
    r = math.hypot(za[0] - zb[0], za[1] - zb[1])
    tau = max(ta, tb) ** 2
    if r == 0.0:
        return math.log(1.0 / max(ta, tb))
    if tau >= 1.0:
        return 0.0
    return 0.5 * (e1(r * r / 2.0) - e1(r * r / (2.0 * tau)))


def wn_variance(t: float) -> float:
    """Var h_t(z) = log(1/t), any z."""
    _check_scale(t)
    return math.log(1.0 / t)


def layer_covariance(u):
    """Covariance of the octave increment h_{t/2} - h_t at separation
    r = u * t (u is distance in units of the layer scale t).

    Scale-free: depends only on u.  Vectorized over u; u = 0 gives log 2.
    """
    u = np.asarray(u, dtype=float)
    out = np.full(u.shape, math.log(2.0))
    nz = u > 0.0
    if np.any(nz):
        x = u[nz] ** 2
        # coarse scale t = 2^{-n}: argument r^2/(2 t^2) = u^2/2
        # fine scale t/2:          argument r^2/(2 (t/2)^2) = 2 u^2
        with np.errstate(over="ignore"):
            out[nz] = 0.5 * (e1(0.5 * x) - e1(2.0 * x))
    return out if out.shape else float(out)
