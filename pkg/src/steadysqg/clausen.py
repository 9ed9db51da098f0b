"""Clausen-type sums ``Cl2(x) = sum sin(kx)/k^2`` and ``C3(x) = sum cos(kx)/k^3``.

Both use the expansion about the origin in ``z = (x/2pi)^2`` with
``zeta(2n)`` coefficients, valid after reduction to ``[-pi, pi]``, where
``z <= 1/4`` so 32 terms reach double precision.
"""

from __future__ import annotations

import numpy as np
from scipy.special import zeta

_NTERMS = 32
_n = np.arange(1, _NTERMS + 1, dtype=float)
_ZETA_EVEN = zeta(2.0 * _n)
# Horner coefficients: Cl2 uses zeta(2n)/(n(2n+1)), C3 uses zeta(2n)/(n(2n+1)(2n+2)).
_CL2_COEF = _ZETA_EVEN / (_n * (2 * _n + 1))
_C3_COEF = _CL2_COEF / (2 * _n + 2)
ZETA3 = float(zeta(3.0))


def _reduce(x):
    """Map angles into ``[-pi, pi)``."""
    x = np.asarray(x, dtype=float)
    return x - 2.0 * np.pi * np.floor((x + np.pi) / (2.0 * np.pi))


def _power_series(coef, z):
    acc = np.zeros_like(z)
    for c in coef[::-1]:
        acc = (acc + c) * z
    return acc


def cl2(x):
    """Clausen function ``sum_{k>=1} sin(kx)/k^2`` (odd, 2pi-periodic)."""
    t = _reduce(x)
    a = np.abs(t)
    z = (a / (2.0 * np.pi)) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = np.where(a > 0, np.log(np.where(a > 0, a, 1.0)), 0.0)
    val = a - a * lg + a * _power_series(_CL2_COEF, z)
    out = np.sign(t) * val
    return out if out.ndim else float(out)


def cos3(x):
    """``sum_{k>=1} cos(kx)/k^3`` (even, 2pi-periodic); its derivative is ``-cl2``."""
    a = np.abs(_reduce(x))
    z = (a / (2.0 * np.pi)) ** 2
    a2 = a * a
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = np.where(a > 0, np.log(np.where(a > 0, a, 1.0)), 0.0)
    out = ZETA3 - 0.75 * a2 + 0.5 * a2 * lg - a2 * _power_series(_C3_COEF, z)
    return out if out.ndim else float(out)


def cl2_prime(x):
    """``d/dx cl2(x) = -(1/2) log(2 - 2cos x) = -log|2 sin(x/2)|``."""
    x = np.asarray(x, dtype=float)
    out = -np.log(np.abs(2.0 * np.sin(0.5 * x)))
    return out if out.ndim else float(out)
