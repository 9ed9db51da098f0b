"""Fourier multipliers acting on sine series.

Four symbol families are provided:

* ``sqg_folded(m)``: ``-(1/k) (m^2 k^2 - 1)/(m^2 k^2 - 4)``, the SQG symbol
  restricted to multiples of ``m`` and rescaled;
* ``sqg_unfolded``: ``-(1/k) (k^2 - 1)/(k^2 - 4)`` for ``k >= 3``, zero below;
* ``degregorio``: ``-1/k``;
* ``remainder(m)``: ``3/(m^2 k^2 - 4)``, so that
  ``sqg_folded(m) = -(1/k) (1 + remainder(m))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, PreconditionError, SingularModeError
from .sine_series import GridFunction, SineSeries, cosine_on_grid, evaluate

FAMILIES = ("sqg_folded", "sqg_unfolded", "degregorio", "remainder")


@dataclass(frozen=True)
class MultiplierOperator:
    """A diagonal operator on sine coefficients, ``a_k -> sigma(k) a_k``."""

    family: str
    m: Optional[int] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown multiplier family {self.family!r}")
        if self.family in ("sqg_folded", "remainder"):
            if self.m is None or int(self.m) != self.m or self.m < 3:
                raise DomainError(f"{self.family} needs an integer m >= 3, got {self.m}")
            object.__setattr__(self, "m", int(self.m))
        elif self.m is not None:
            raise DomainError(f"{self.family} takes no m")

    def symbol(self, k) -> np.ndarray:
        """Evaluate ``sigma(k)`` for positive integer wavenumbers."""
        k = np.asarray(k, dtype=float)
        if self.family == "degregorio":
            return -1.0 / k
        if self.family == "sqg_unfolded":
            k2 = k * k
            active = k > 2
            denom = np.where(active, k * (k2 - 4.0), 1.0)
            return np.where(active, -(k2 - 1.0) / denom, 0.0)
        mk2 = (self.m * k) ** 2
        if self.family == "sqg_folded":
            return -(mk2 - 1.0) / (k * (mk2 - 4.0))
        return 3.0 / (mk2 - 4.0)

    @property
    def eigen_constant(self) -> float:
        """``-sigma(1)``; for ``sqg_folded(m)`` this is ``(m^2-1)/(m^2-4)``."""
        return float(-self.symbol(1))

    def label(self) -> str:
        return self.family if self.m is None else f"{self.family}({self.m})"


def sqg_folded(m: int) -> MultiplierOperator:
    return MultiplierOperator("sqg_folded", m)


def sqg_unfolded() -> MultiplierOperator:
    return MultiplierOperator("sqg_unfolded")


def degregorio() -> MultiplierOperator:
    return MultiplierOperator("degregorio")


def remainder(m: int) -> MultiplierOperator:
    return MultiplierOperator("remainder", m)


def apply(op: MultiplierOperator, s: SineSeries) -> SineSeries:
    return SineSeries(op.symbol(s.wavenumbers) * s.coeffs)


def apply_inverse(op: MultiplierOperator, s: SineSeries) -> SineSeries:
    """Divide by the symbol mode by mode.

    Raises:
        SingularModeError: if a mode with nonzero amplitude has ``sigma = 0``.
    """
    sigma = op.symbol(s.wavenumbers)
    zero = sigma == 0.0
    bad = zero & (s.coeffs != 0.0)
    if np.any(bad):
        ks = (np.nonzero(bad)[0] + 1).tolist()
        raise SingularModeError(f"{op.label()} vanishes on active modes {ks}")
    out = np.where(zero, 0.0, s.coeffs / np.where(zero, 1.0, sigma))
    return SineSeries(out)


def differentiate_on_grid(s: SineSeries, N: int) -> GridFunction:
    """Sample ``d/dx sum a_k sin(kx) = sum k a_k cos(kx)`` on the ``N``-grid."""
    return GridFunction(cosine_on_grid(s.wavenumbers * s.coeffs, N))


def fold(f: SineSeries, m: int) -> SineSeries:
    """Return ``g`` with ``g_j = f_{jm}``, so ``f(x) = g(mx)``.

    Raises:
        PreconditionError: if ``f`` has a mode that is not a multiple of ``m``.
    """
    k = np.arange(1, f.modes + 1)
    stray = (k % m != 0) & (f.coeffs != 0.0)
    if np.any(stray):
        raise PreconditionError(f"modes {k[stray].tolist()} are not multiples of {m}")
    g = f.coeffs[m - 1::m]
    return SineSeries(g if g.size else np.zeros(1))


def unfold(g: SineSeries, m: int) -> SineSeries:
    """Inverse of :func:`fold`: spread ``g_j`` onto mode ``jm``."""
    a = np.zeros(g.modes * m)
    a[m - 1::m] = g.coeffs
    return SineSeries(a)


def folding_residual(f: SineSeries, m: int, N: int) -> float:
    """Sup over the ``N``-grid of ``(1/m) S_m g(x) - S f(x/m)`` with ``f(x) = g(mx)``.

    Both sides are summed directly at the nodes, so the value measures the
    symbol identity ``sigma_S(jm) = sigma_{S_m}(j)/m`` and nothing else.
    """
    if m < 3:
        raise DomainError(f"m must be >= 3, got {m}")
    g = fold(f, m)
    x = np.arange(N + 1) * (np.pi / N)
    lhs = evaluate(apply(sqg_folded(m), g), x) / m
    rhs = evaluate(apply(sqg_unfolded(), f), x / m)
    return float(np.max(np.abs(lhs - rhs)))
