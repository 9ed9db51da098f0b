"""The integral kernel behind ``-S_m`` and the scalar quantities used to bound it.

For ``w`` vanishing at ``0`` and ``pi``,

    -S_m w (x) = int_0^pi K_m(x, y) w(y) dy,
    K_m(x, y)  = (phi_m(x + y) - phi_m(x - y)) / (2 pi),
    phi_m(u)   = log(1 - cos u) - 6 h_m(u),
    h_m(u)     = sum_k cos(ku) / (k (m^2 k^2 - 4)).

``phi_m`` is even and 2pi-periodic. The De Gregorio family keeps only the
logarithm. ``h_m`` is evaluated as ``C3(u)/m^2`` plus a fast-decaying
remainder series truncated at ``T`` terms, so the truncation error is far
below the conservative bound ``3/(pi m^2 T^2)`` carried in
:attr:`KernelConfig.tail_bound`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from scipy import fft
from scipy.special import digamma

from .clausen import cl2, cos3
from .errors import DomainError, InvalidConfigError, NumericalError, SingularityError
from .sine_series import GridFunction

LOG2 = float(np.log(2.0))
EULER_GAMMA = 0.5772156649015329
ZETA2 = np.pi ** 2 / 6.0
ZETA3 = 1.2020569031595942
# zeta'(-2) = -zeta(3) / (4 pi^2): weight of the h^3 correction for u^2 log|u|.
ZETA_PRIME_M2 = -ZETA3 / (4.0 * np.pi ** 2)


@dataclass(frozen=True)
class KernelConfig:
    """Which kernel to use and how far to sum its smooth series.

    Attributes:
        m: integer ``>= 3`` or the string ``"degregorio"``.
        truncation: number of remainder-series terms ``T``.
        tail_tol: largest acceptable certified tail bound.
    """

    m: Union[int, str] = 3
    truncation: int = 1024
    tail_tol: float = 1e-6

    def __post_init__(self):
        if self.m != "degregorio":
            if isinstance(self.m, str) or int(self.m) != self.m or self.m < 3:
                raise InvalidConfigError(f"m must be an integer >= 3 or 'degregorio', got {self.m!r}")
            object.__setattr__(self, "m", int(self.m))
        if int(self.truncation) < 1:
            raise InvalidConfigError("truncation must be a positive integer")
        if not self.tail_tol > 0:
            raise InvalidConfigError("tail_tol must be positive")
        if self.tail_bound > self.tail_tol:
            raise InvalidConfigError(
                f"tail bound {self.tail_bound:.3e} exceeds tail_tol {self.tail_tol:.3e}; "
                "raise the truncation")

    @property
    def is_degregorio(self) -> bool:
        return self.m == "degregorio"

    @property
    def tail_bound(self) -> float:
        """Bound on the kernel error from truncating ``6/pi sum 1/(m^2k^3-4k)``."""
        if self.is_degregorio:
            return 0.0
        return 3.0 / (np.pi * self.m ** 2 * self.truncation ** 2)

    @property
    def eigen_constant(self) -> float:
        """``rho`` with ``-S_m sin = rho sin``."""
        if self.is_degregorio:
            return 1.0
        m2 = self.m ** 2
        return (m2 - 1.0) / (m2 - 4.0)


# ---------------------------------------------------------------------------
# smooth series pieces

def _remainder_coeffs(cfg: KernelConfig) -> np.ndarray:
    """``c_k = 1/(k^3 (m^2 k^2 - 4))`` for ``k = 1..T``."""
    k = np.arange(1, cfg.truncation + 1, dtype=float)
    return 1.0 / (k ** 3 * (cfg.m ** 2 * k * k - 4.0))


def _trig_sum(coef, u, kind):
    u = np.asarray(u, dtype=float)
    flat = u.ravel()
    k = np.arange(1, coef.size + 1, dtype=float)
    out = np.empty(flat.size)
    trig = np.cos if kind == "cos" else np.sin
    step = max(1, 4_000_000 // coef.size)
    for lo in range(0, flat.size, step):
        out[lo:lo + step] = trig(np.outer(flat[lo:lo + step], k)) @ coef
    return out.reshape(u.shape)


def h_series(u, cfg: KernelConfig):
    """``h_m(u) = sum cos(ku)/(k(m^2k^2-4))`` at arbitrary points."""
    m2 = cfg.m ** 2
    return cos3(u) / m2 + (4.0 / m2) * _trig_sum(_remainder_coeffs(cfg), u, "cos")


def h_at_zero(m: int) -> float:
    """Closed form of ``h_m(0)`` through the digamma function."""
    b = 2.0 / m
    return -0.125 * (digamma(1.0 - b) + digamma(1.0 + b) + 2.0 * EULER_GAMMA)


def _lattice_cos(coef, M):
    """``sum coef_k cos(k l pi/M)`` for ``l = 0..M`` via an oversampled DCT-I."""
    T = coef.size
    r = max(1, -(-(T + 1) // M))
    c = np.zeros(r * M + 1)
    c[1:T + 1] = coef
    return (fft.dct(c, type=1) / 2.0)[::r]


def _lattice_sin(coef, M):
    T = coef.size
    r = max(1, -(-(T + 1) // M))
    a = np.zeros(r * M - 1)
    a[:T] = coef[:r * M - 1]
    vals = np.zeros(r * M + 1)
    vals[1:-1] = fft.dst(a, type=1) / 2.0
    return vals[::r]


def _reduce_even(u):
    """Reduce to ``[0, pi]`` using evenness and 2pi-periodicity."""
    u = np.abs(np.asarray(u, dtype=float))
    u = np.mod(u, 2.0 * np.pi)
    return np.where(u > np.pi, 2.0 * np.pi - u, u)


def _log_one_minus_cos(r):
    # log(1 - cos r) = log 2 + 2 log sin(r/2), accurate for small r.
    return LOG2 + 2.0 * np.log(np.sin(0.5 * r))


def _check_singular(r):
    if np.any(r == 0.0):
        raise SingularityError("phi_m is singular at multiples of 2pi")


def _out(x):
    return x if np.ndim(x) else float(x)


def phi(u, cfg: KernelConfig):
    """Profile ``phi_m(u)``, even and 2pi-periodic, singular at ``u = 0``."""
    r = _reduce_even(u)
    _check_singular(r)
    val = _log_one_minus_cos(r)
    if not cfg.is_degregorio:
        val = val - 6.0 * h_series(r, cfg)
    return _out(val)


def phi_prime(u, cfg: KernelConfig):
    """``phi_m'(u) = cot(u/2) + 6 sum sin(ku)/(m^2k^2-4)``; odd in ``u``."""
    u = np.asarray(u, dtype=float)
    _check_singular(_reduce_even(u))
    val = 1.0 / np.tan(0.5 * u)
    if not cfg.is_degregorio:
        m2 = cfg.m ** 2
        k = np.arange(1, cfg.truncation + 1, dtype=float)
        s = _trig_sum(1.0 / (k * k * (m2 * k * k - 4.0)), u, "sin")
        val = val + (6.0 / m2) * cl2(u) + (24.0 / m2) * s
    return _out(val)


def phi_second(u, cfg: KernelConfig):
    """``phi_m''(u) = -csc^2(u/2)/2 - (3/m^2) log(2-2cos u) + (24/m^2) h_m(u)``."""
    r = _reduce_even(u)
    _check_singular(r)
    val = -0.5 / np.sin(0.5 * r) ** 2
    if not cfg.is_degregorio:
        m2 = cfg.m ** 2
        log22 = 2.0 * np.log(2.0 * np.sin(0.5 * r))
        val = val - (3.0 / m2) * log22 + (24.0 / m2) * h_series(r, cfg)
    return _out(val)


def phi_lattice(M: int, cfg: KernelConfig) -> np.ndarray:
    """``phi_m(l pi / M)`` for ``l = 0..2M``; entries ``0`` and ``2M`` are ``nan``."""
    l = np.arange(M + 1)
    r = l * (np.pi / M)
    with np.errstate(divide="ignore"):
        val = _log_one_minus_cos(r)
    if not cfg.is_degregorio:
        m2 = cfg.m ** 2
        val = val - 6.0 * (cos3(r) / m2 + (4.0 / m2) * _lattice_cos(_remainder_coeffs(cfg), M))
    val[0] = np.nan
    return np.concatenate([val, val[-2::-1]])


# ---------------------------------------------------------------------------
# kernel

def kernel_value(x, y, cfg: KernelConfig):
    """``K_m(x, y)`` for ``x, y`` in ``[0, pi]`` off the diagonal."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x == y):
        raise SingularityError("kernel is singular on the diagonal x = y")
    val = (np.asarray(phi(x + y, cfg)) - np.asarray(phi(x - y, cfg))) / (2.0 * np.pi)
    return _out(val)


def kernel_tilde(u, v, cfg: KernelConfig):
    """Kernel in sum/difference variables, ``(phi_m(u) - phi_m(v)) / (2 pi)``."""
    return _out((np.asarray(phi(u, cfg)) - np.asarray(phi(v, cfg))) / (2.0 * np.pi))


def kernel_matrix(n: int, cfg: KernelConfig):
    """Kernel on the interior lattice ``x_i = i pi/(n+1)``, ``i = 1..n``.

    Returns ``(nodes, K)``; the diagonal of ``K`` is ``nan``.
    """
    M = n + 1
    Phi = phi_lattice(M, cfg)
    i = np.arange(1, n + 1)
    K = (Phi[i[:, None] + i[None, :]] - Phi[np.abs(i[:, None] - i[None, :])]) / (2.0 * np.pi)
    return i * (np.pi / M), K


def _second_difference_periodic(g, h):
    """Fourth-order periodic central difference for ``g''``."""
    return (-np.roll(g, 2) + 16 * np.roll(g, 1) - 30 * g
            + 16 * np.roll(g, -1) - np.roll(g, -2)) / (12.0 * h * h)


def apply_kernel(w: GridFunction, cfg: KernelConfig) -> GridFunction:
    """Evaluate ``int_0^pi K_m(x_j, y) w(y) dy`` at every node of ``w``'s grid.

    The integral equals ``-(1/2pi) int_{-pi}^{pi} phi_m(x - y) w_odd(y) dy``
    over the odd periodic extension, which is a circular convolution on the
    ``2N``-point periodic grid. The logarithmic singularity of ``phi_m`` at 0
    is handled by a corrected trapezoid rule: the centre weight is the
    regular part of ``phi_m`` plus ``2 log(h/2pi)``, and the leading error
    term ``-2 zeta'(-2) h^3 (w'' - 3w/m^2)`` is added back. The rule is
    fourth-order for smooth ``w``.
    """
    N = w.grid_size
    h = np.pi / N
    n = 2 * N
    Phi = phi_lattice(N, cfg)[:n].copy()
    if cfg.is_degregorio:
        r0 = -LOG2
    else:
        r0 = -LOG2 - 6.0 * h_at_zero(cfg.m)
    Phi[0] = r0 + 2.0 * np.log(h / (2.0 * np.pi))
    wt = np.zeros(n)
    wt[:N + 1] = w.values
    wt[N + 1:] = -w.values[N - 1:0:-1]
    conv = fft.irfft(fft.rfft(Phi) * fft.rfft(wt), n) * h
    curv = _second_difference_periodic(wt, h)
    if not cfg.is_degregorio:
        curv = curv - (3.0 / cfg.m ** 2) * wt
    conv += 2.0 * ZETA_PRIME_M2 * h ** 3 * curv
    out = -conv[:N + 1] / (2.0 * np.pi)
    if not np.all(np.isfinite(out)):
        raise NumericalError("kernel quadrature produced non-finite values")
    out[0] = 0.0
    out[N] = 0.0
    return GridFunction(out)


# ---------------------------------------------------------------------------
# windowed integral and appendix quantities

def _log_antiderivative(t):
    """``int_0^t log(1 - cos s) ds = -2 Cl2(t) - t log 2``."""
    return -2.0 * np.asarray(cl2(t)) - np.asarray(t) * LOG2


def window_integral(x, delta: float, cfg: KernelConfig):
    """``int K_m(x, y) dy`` over ``{y in [0, pi] : |x - y| < delta}``.

    The logarithmic part uses the Clausen antiderivative; the series part is
    integrated term by term exactly.
    """
    x = np.asarray(x, dtype=float)
    a = np.maximum(0.0, x - delta)
    b = np.minimum(np.pi, x + delta)
    F = _log_antiderivative
    log_part = (F(x + b) - F(x + a)) - (F(x - a) - F(x - b))
    val = log_part / (2.0 * np.pi)
    if not cfg.is_degregorio:
        k = np.arange(1, cfg.truncation + 1, dtype=float)
        c = 1.0 / (k * k * (cfg.m ** 2 * k * k - 4.0))
        flat_x, flat_a, flat_b = x.ravel(), a.ravel(), b.ravel()
        ser = np.empty(flat_x.size)
        step = max(1, 2_000_000 // k.size)
        for lo in range(0, flat_x.size, step):
            sl = slice(lo, lo + step)
            ser[sl] = (np.sin(np.outer(flat_x[sl], k))
                       * (np.cos(np.outer(flat_a[sl], k)) - np.cos(np.outer(flat_b[sl], k)))) @ c
        val = val + (6.0 / np.pi) * ser.reshape(x.shape)
    return _out(val)


def i_delta(delta: float, cfg: KernelConfig, x_scan=None) -> float:
    """Largest windowed kernel integral over the scan points (default 2049 nodes)."""
    if not 0.0 < delta < np.pi:
        raise DomainError(f"delta must lie in (0, pi), got {delta}")
    if x_scan is None:
        x_scan = np.linspace(0.0, np.pi, 2049)
    return float(np.max(window_integral(np.asarray(x_scan, dtype=float), delta, cfg)))


def rho_delta(x, delta: float):
    """``Cl2(2x - delta) - Cl2(2x + delta)``."""
    x = np.asarray(x, dtype=float)
    return _out(np.asarray(cl2(2.0 * x - delta)) - np.asarray(cl2(2.0 * x + delta)))


def rho_delta_argmax(delta: float, n: int = 4001) -> float:
    """Maximiser of :func:`rho_delta` over ``n`` uniform points of ``[0, pi]``."""
    if not 0.0 < delta < np.pi:
        raise DomainError(f"delta must lie in (0, pi), got {delta}")
    x = np.linspace(0.0, np.pi, n)
    return float(x[np.argmax(rho_delta(x, delta))])


def psi(delta: float) -> float:
    """``(1/4) log(cot(d/4) / (4 sin^2(d/4))) + (3/4) log(4 d)``; tends to ``(5/4) log 4``."""
    if not 0.0 < delta < np.pi:
        raise DomainError(f"delta must lie in (0, pi), got {delta}")
    q = 0.25 * delta
    return float(0.25 * (np.log(1.0 / np.tan(q)) - np.log(4.0) - 2.0 * np.log(np.sin(q)))
                 + 0.75 * np.log(4.0 * delta))


def tau_partial(T: int) -> float:
    """``sum_{k=2}^{T} 1/(k^2 (k-1))``."""
    k = np.arange(2, T + 1, dtype=float)
    return float(np.sum(1.0 / (k * k * (k - 1.0))))


def tau(T: int = 10_000) -> float:
    """``sum_{k>=2} 1/(k^2 (k-1))`` from a partial sum and an Euler-Maclaurin tail."""
    # Tail f(k) = 1/(k^2(k-1)) = 1/(k-1) - 1/k - 1/k^2 integrates in closed form.
    a = T + 1.0
    integral = np.log(a / (a - 1.0)) - 1.0 / a
    f = 1.0 / (a * a * (a - 1.0))
    fp = -(3.0 * a - 2.0) / (a ** 3 * (a - 1.0) ** 2)
    return tau_partial(T) + float(integral + 0.5 * f - fp / 12.0)


class NegativityResult(NamedTuple):
    M0: float
    is_negative: bool
    beta_at_M0: float


def negativity_criterion(A1: float, A2: float, alpha: float) -> NegativityResult:
    """Minimum of ``beta(M) = A1 M^(1/alpha) + A2 - M`` and whether it is negative.

    ``M0 = (A1/alpha)^(1/(1 - 1/alpha))`` is the critical point. The closed
    criterion ``A1^alpha A2^(1-alpha) < (1-alpha)^(1-alpha) alpha^alpha``
    decides the sign and is cross-checked against ``beta(M0)``.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not (A1 > 0 and A2 > 0):
        raise DomainError("A1 and A2 must be positive")
    M0 = (A1 / alpha) ** (1.0 / (1.0 - 1.0 / alpha))
    beta = A1 * M0 ** (1.0 / alpha) + A2 - M0
    lhs = A1 ** alpha * A2 ** (1.0 - alpha)
    rhs = (1.0 - alpha) ** (1.0 - alpha) * alpha ** alpha
    negative = bool(lhs < rhs and not np.isclose(lhs, rhs, rtol=1e-13, atol=0.0))
    if negative and not beta < 0:
        raise NumericalError(f"criterion holds but beta(M0) = {beta} is not negative")
    return NegativityResult(float(M0), negative, float(beta))


def kernel_bound_ratio_scan(cfg: KernelConfig, n: int = 300) -> float:
    """Max of ``K_m(x,y) / (sin y cot(|x-y|/2) + sin y)`` over an interior lattice."""
    x, K = kernel_matrix(n, cfg)
    X, Y = np.meshgrid(x, x, indexing="ij")
    off = X != Y
    denom = np.sin(Y[off]) * (1.0 / np.tan(0.5 * np.abs(X[off] - Y[off])) + 1.0)
    return float(np.max(K[off] / denom))


def kernel_min_scan(cfg: KernelConfig, n: int = 500):
    """Smallest off-diagonal kernel value on the interior lattice, and its tail bound."""
    _, K = kernel_matrix(n, cfg)
    return float(np.nanmin(K)), cfg.tail_bound


# ---------------------------------------------------------------------------
# concavity chain for phi_m

def concavity_polynomial(theta, m: int, corrected: bool = False):
    """Upper bound for ``sin(x/2)^2 phi_m''(x)`` as a polynomial in ``theta = sin(x/2)``.

    With ``corrected=False`` the ``cos x`` term enters as ``1 - 2 theta``;
    ``corrected=True`` uses the identity ``cos x = 1 - 2 theta^2``. Only the
    corrected form is a valid upper bound for every ``m >= 3``.
    """
    t = np.asarray(theta, dtype=float)
    m2 = m * m
    c = 24.0 / (m2 * m2 - 4.0 * m2)
    cos_term = c * (t * t - 2.0 * t ** 4) if corrected else c * (t * t - 2.0 * t ** 3)
    return _out(-0.5 + cos_term + (6.0 / m2) * (t - (1.0 + LOG2) * t * t)
                + (24.0 / m2 ** 2) * tau() * t * t)


def concavity_cubic(theta, m: int):
    """``-48 theta^3/(m^4 - 4m^2) + 6 theta/m^2 - 1/2``."""
    t = np.asarray(theta, dtype=float)
    m2 = m * m
    return _out(-48.0 / (m2 * m2 - 4.0 * m2) * t ** 3 + 6.0 * t / m2 - 0.5)


class ConcavityReport(NamedTuple):
    max_phi_second: float
    max_gap_profile_poly: float
    max_gap_poly_cubic: float
    max_cubic: float
    cubic_at_critical: float
    critical_bound: float


def concavity_chain(m: int, n: int = 2000, corrected: bool = False,
                    truncation: int = 1024) -> ConcavityReport:
    """Margins of ``theta^2 phi'' <= P(theta) <= Q(theta) < 0`` on ``n`` interior points.

    Each ``max_gap`` field is the largest value of left minus right side, so a
    chain link holds when its gap is ``<= 0``.
    """
    cfg = KernelConfig(m, truncation=truncation)
    x = np.pi * np.arange(1, n + 1) / (n + 1)
    t = np.sin(0.5 * x)
    d2 = np.asarray(phi_second(x, cfg))
    P = np.asarray(concavity_polynomial(t, m, corrected))
    Q = np.asarray(concavity_cubic(t, m))
    crit = np.sqrt((m * m - 4.0) / 24.0)
    return ConcavityReport(
        max_phi_second=float(d2.max()),
        max_gap_profile_poly=float(np.max(t * t * d2 - P)),
        max_gap_poly_cubic=float(np.max(P - Q)),
        max_cubic=float(Q.max()),
        cubic_at_critical=float(concavity_cubic(crit, m)),
        critical_bound=1.0 / m - 0.5,
    )
