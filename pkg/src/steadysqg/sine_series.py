"""Odd functions on [0, pi]: sine coefficients, uniform-grid samples, transforms.

A :class:`SineSeries` stores ``a_1..a_K`` of ``sum a_k sin(kx)``; a
:class:`GridFunction` stores samples at ``x_j = j*pi/N``, ``j = 0..N``.
The two are linked by the type-I discrete sine transform, which is the
trapezoid-rule projection onto ``sin(kx)`` on this grid and is exact for
``k < N``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft

from .errors import AliasingError, DomainError, PreconditionError, ResolutionError

_ENDPOINT_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SineSeries:
    """Coefficients of ``sum_{k=1}^{K} a_k sin(kx)``; ``coeffs[0]`` is ``a_1``."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.coeffs)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("SineSeries needs a non-empty 1-D coefficient array")
        object.__setattr__(self, "coeffs", arr)

    @property
    def modes(self) -> int:
        return self.coeffs.size

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(1, self.modes + 1, dtype=float)

    @classmethod
    def from_modes(cls, modes: int, **amplitudes) -> "SineSeries":
        """Build a series from keyword amplitudes like ``a3=5.0``."""
        a = np.zeros(modes)
        for key, val in amplitudes.items():
            k = int(key.lstrip("a"))
            a[k - 1] = val
        return cls(a)

    def resized(self, modes: int) -> "SineSeries":
        """Zero-pad or truncate to ``modes`` coefficients."""
        a = np.zeros(modes)
        n = min(modes, self.modes)
        a[:n] = self.coeffs[:n]
        return SineSeries(a)

    def __call__(self, x):
        return evaluate(self, x)

    def __add__(self, other: "SineSeries") -> "SineSeries":
        n = max(self.modes, other.modes)
        return SineSeries(self.resized(n).coeffs + other.resized(n).coeffs)

    def __sub__(self, other: "SineSeries") -> "SineSeries":
        return self + (-1.0) * other

    def __mul__(self, c: float) -> "SineSeries":
        return SineSeries(c * self.coeffs)

    __rmul__ = __mul__

    def sup_norm_bound(self) -> float:
        """``sum |a_k|``, an upper bound for the sup norm."""
        return float(np.abs(self.coeffs).sum())


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples ``w_0..w_N`` at the nodes ``x_j = j*pi/N``."""

    values: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.values)
        if arr.ndim != 1 or arr.size < 3:
            raise ValueError("GridFunction needs at least three samples")
        object.__setattr__(self, "values", arr)

    @property
    def grid_size(self) -> int:
        return self.values.size - 1

    N = grid_size

    @property
    def nodes(self) -> np.ndarray:
        return grid_nodes(self.grid_size)

    @property
    def spacing(self) -> float:
        return np.pi / self.grid_size

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.values - other.values)

    def __mul__(self, c: float) -> "GridFunction":
        return GridFunction(c * self.values)

    __rmul__ = __mul__


def grid_nodes(N: int) -> np.ndarray:
    return np.arange(N + 1) * (np.pi / N)


def evaluate(s: SineSeries, x) -> np.ndarray:
    """Evaluate the series at arbitrary points (direct summation)."""
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    k = s.wavenumbers
    out = np.empty(flat.size)
    # Chunked so the (points x modes) phase matrix stays small.
    step = max(1, 2_000_000 // max(k.size, 1))
    for lo in range(0, flat.size, step):
        chunk = flat[lo:lo + step]
        out[lo:lo + step] = np.sin(np.outer(chunk, k)) @ s.coeffs
    return out.reshape(x.shape)


def to_grid(s: SineSeries, N: int) -> GridFunction:
    """Sample ``s`` on the ``N``-grid; endpoints are exactly zero.

    Raises:
        ResolutionError: if ``N < K + 1`` (mode ``N`` vanishes on every node).
    """
    K = s.modes
    if N < K + 1:
        raise ResolutionError(f"grid size {N} cannot carry {K} sine modes")
    a = np.zeros(N - 1)
    a[:K] = s.coeffs
    values = np.zeros(N + 1)
    values[1:N] = fft.dst(a, type=1) / 2.0
    return GridFunction(values)


def to_coefficients(w: GridFunction, K: int) -> SineSeries:
    """Project grid samples onto ``sin(ky)``, ``k = 1..K``.

    ``a_k = (2/pi) * trapezoid(w(y) sin(ky))``, computed with a DST-I.

    Raises:
        AliasingError: if ``K >= N``.
        PreconditionError: if the endpoint samples are not zero.
    """
    N = w.grid_size
    if K >= N:
        raise AliasingError(f"{K} modes cannot be recovered from a grid of size {N}")
    scale = max(1.0, w.sup_norm())
    if abs(w.values[0]) > _ENDPOINT_TOL * scale or abs(w.values[-1]) > _ENDPOINT_TOL * scale:
        raise PreconditionError("sine projection needs w(0) = w(pi) = 0")
    a = fft.dst(w.values[1:N], type=1) / N
    return SineSeries(a[:K])


def weighted_sine_integral(w) -> float:
    """``int_0^pi w(y) sin(y) dy`` for a grid function or a sine series.

    On a series this is exactly ``(pi/2) a_1``; on a grid it is the
    composite trapezoid rule.
    """
    if isinstance(w, SineSeries):
        return 0.5 * np.pi * float(w.coeffs[0])
    x = w.nodes
    return float(w.spacing * np.dot(w.values, np.sin(x)))


def trapezoid(w: GridFunction) -> float:
    v = w.values
    return float(w.spacing * (v.sum() - 0.5 * (v[0] + v[-1])))


def pointwise_power(w: GridFunction, p: float) -> GridFunction:
    """Map each sample through ``t -> max(t, 0)**p``.

    Negative samples are clamped to zero first; :func:`negative_mass`
    reports how much was discarded.
    """
    if not p > 0:
        raise DomainError(f"exponent must be positive, got {p}")
    return GridFunction(np.maximum(w.values, 0.0) ** p)


def negative_mass(w: GridFunction) -> float:
    """Trapezoid integral of the negative part, ``int max(-w, 0)``."""
    return trapezoid(GridFunction(np.maximum(-w.values, 0.0)))


def cosine_on_grid(b: np.ndarray, N: int) -> np.ndarray:
    """Evaluate ``sum_{k=1}^{len(b)} b_k cos(k x_j)`` on the ``N``-grid (DCT-I)."""
    K = b.size
    if N < K + 1:
        raise ResolutionError(f"grid size {N} cannot carry {K} cosine modes")
    c = np.zeros(N + 1)
    c[1:K + 1] = b
    return fft.dct(c, type=1) / 2.0
