"""Normalised fixed-point iteration for ``u = S(u^(1/alpha))`` with ``S = -S_m``.

The map ``A v = S(v^(1/alpha))`` is positively homogeneous of degree
``1/alpha``. Iterating the normalised map ``F v = A v / int(A v sin)`` on
the set ``int v sin = 1`` gives a fixed point ``v = A v / lambda``; then
``u* = Gamma v`` with ``Gamma = lambda^(alpha/(alpha-1))`` solves
``A u* = u*``. The stationary profile is ``g = -(u*)^(1/alpha)`` and the
unfolded profile is ``f(x) = g(mx)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import (
    DegenerateInputError,
    DomainError,
    HolderFitError,
    InvalidConfigError,
    NonConvergenceError,
    PreconditionError,
    NumericalError,
)
from .operators import MultiplierOperator, apply, apply_inverse, degregorio, sqg_folded, unfold
from .sine_series import (
    GridFunction,
    SineSeries,
    negative_mass,
    pointwise_power,
    to_coefficients,
    to_grid,
    weighted_sine_integral,
)

log = logging.getLogger(__name__)

LAMBDA_FLOOR = 1e-300


@dataclass(frozen=True)
class SolverConfig:
    """Numerical parameters of a solve.

    Attributes:
        family: ``"sqg"`` (folded SQG symbol, needs ``m >= 3``) or
            ``"degregorio"`` (symbol ``-1/k``, ``m`` must be 1).
        m: folding order.
        alpha: exponent, must exceed 1/2.
        modes: number of sine modes ``K``.
        grid: grid size ``N``, at least ``2K``.
        tol: sup-norm tolerance on grid updates.
        max_iter: iteration budget.
        damping: relaxation ``omega`` in ``(0, 1]``.
        symmetry: drop even sine modes every step.
        M_cap: optional bound ``M`` used only for the V_M diagnostic flags.
    """

    family: str = "sqg"
    m: int = 3
    alpha: float = 2.0
    modes: int = 256
    grid: int = 1024
    tol: float = 1e-10
    max_iter: int = 500
    damping: float = 1.0
    symmetry: bool = False
    M_cap: Optional[float] = None

    def __post_init__(self):
        if self.family not in ("sqg", "degregorio"):
            raise InvalidConfigError(f"family must be 'sqg' or 'degregorio', got {self.family!r}")
        if self.family == "sqg" and (int(self.m) != self.m or self.m < 3):
            raise InvalidConfigError(f"sqg family needs an integer m >= 3, got {self.m}")
        if self.family == "degregorio" and self.m != 1:
            raise InvalidConfigError("degregorio family is unfolded; use m = 1")
        if not self.alpha > 0.5:
            raise DomainError(f"alpha must exceed 1/2, got {self.alpha}")
        if self.modes < 1 or self.grid < 2 * self.modes:
            raise InvalidConfigError(f"need modes >= 1 and grid >= 2*modes, got K={self.modes}, N={self.grid}")
        if not self.tol > 0:
            raise InvalidConfigError("tol must be positive")
        if self.max_iter < 1:
            raise InvalidConfigError("max_iter must be positive")
        if not 0.0 < self.damping <= 1.0:
            raise InvalidConfigError(f"damping must lie in (0, 1], got {self.damping}")
        if self.M_cap is not None and not self.M_cap > 0:
            raise InvalidConfigError("M_cap must be positive")

    @property
    def operator(self) -> MultiplierOperator:
        """The multiplier ``S_m`` (so that ``A = -S_m`` composed with the power)."""
        return sqg_folded(self.m) if self.family == "sqg" else degregorio()

    @property
    def eigen_constant(self) -> float:
        return self.operator.eigen_constant

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True, eq=False)
class SolutionBundle:
    """A solve result: ``v``, ``lambda``, ``Gamma``, ``u*``, ``g``, ``f`` and diagnostics.

    ``g`` and ``f`` are the ``K``-mode projections of the grid profile
    ``-(u*)^(1/alpha)``; :meth:`g_values` and :meth:`g_derivative` give the
    pointwise profile, which is exact at the fixed point.
    """

    config: SolverConfig
    v: SineSeries
    lam: float
    gamma: float
    u_star: GridFunction
    g: SineSeries
    f: SineSeries
    converged: bool
    iterations: int
    update_norm: float
    residual: float
    clamped_mass: float
    history: Tuple[float, ...] = ()
    diagnostics: dict = field(default_factory=dict)

    @property
    def alpha(self) -> float:
        return self.config.alpha

    @property
    def m(self) -> int:
        return self.config.m

    @property
    def v_grid(self) -> GridFunction:
        return to_grid(self.v, self.config.grid)

    @property
    def u_series(self) -> SineSeries:
        return self.gamma * self.v

    @property
    def g_grid(self) -> GridFunction:
        return GridFunction(-np.maximum(self.u_star.values, 0.0) ** (1.0 / self.alpha))

    def g_values(self, u_vals) -> np.ndarray:
        """``g = -sgn(u) |u|^(1/alpha)``, the odd extension of ``-u^(1/alpha)``."""
        u_vals = np.asarray(u_vals, dtype=float)
        return -np.sign(u_vals) * np.abs(u_vals) ** (1.0 / self.alpha)

    def g_derivative(self, u_vals, du_vals) -> np.ndarray:
        """Chain rule ``g' = -(1/alpha) |u|^(1/alpha - 1) u'``; infinite where ``u = 0``."""
        u_vals = np.asarray(u_vals, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return -(1.0 / self.alpha) * np.abs(u_vals) ** (1.0 / self.alpha - 1.0) * du_vals


def _power_projection(v: GridFunction, cfg: SolverConfig) -> Tuple[SineSeries, float]:
    # Check the endpoints before the power amplifies rounding noise there.
    vals = v.values.copy()
    scale = max(1.0, v.sup_norm())
    if abs(vals[0]) > 1e-12 * scale or abs(vals[-1]) > 1e-12 * scale:
        raise PreconditionError("A needs v(0) = v(pi) = 0")
    vals[0] = vals[-1] = 0.0
    p = pointwise_power(GridFunction(vals), 1.0 / cfg.alpha)
    return to_coefficients(p, cfg.modes), negative_mass(v)


def operator_A(v: GridFunction, cfg: SolverConfig) -> GridFunction:
    """``A v = -S_m(P_K(max(v,0)^(1/alpha)))`` sampled on the solve grid.

    ``v`` may live on any grid finer than ``K``; the result is sampled on
    ``v``'s grid.
    """
    c, _ = _power_projection(v, cfg)
    out = to_grid(apply(cfg.operator, c) * -1.0, v.grid_size)
    if not np.all(np.isfinite(out.values)):
        raise NumericalError("operator A produced non-finite values")
    return out


def _apply_A_series(v: SineSeries, cfg: SolverConfig) -> Tuple[SineSeries, float]:
    c, clamped = _power_projection(to_grid(v, cfg.grid), cfg)
    out = apply(cfg.operator, c) * -1.0
    if not np.all(np.isfinite(out.coeffs)):
        raise NumericalError("operator A produced non-finite values")
    return out, clamped


def map_F(v: GridFunction, cfg: SolverConfig) -> Tuple[GridFunction, float]:
    """Normalised map ``F v = A v / lambda`` with ``lambda = int A v sin``.

    Raises:
        DegenerateInputError: if ``lambda`` is not positive.
    """
    Av = operator_A(v, cfg)
    lam = weighted_sine_integral(Av)
    if not lam > LAMBDA_FLOOR:
        raise DegenerateInputError(f"int(A v sin) = {lam:.3e}; input is effectively zero")
    return Av * (1.0 / lam), lam


def _initial_iterate(cfg: SolverConfig) -> SineSeries:
    a = np.zeros(cfg.modes)
    a[0] = 2.0 / np.pi
    return SineSeries(a)


def _odd_harmonics(s: SineSeries) -> SineSeries:
    a = s.coeffs.copy()
    a[1::2] = 0.0
    return SineSeries(a)


def _fixed_point_residual(u: SineSeries, cfg: SolverConfig) -> Tuple[float, GridFunction]:
    u_grid = to_grid(u, cfg.grid)
    Au, _ = _apply_A_series(u, cfg)
    diff = to_grid(Au - u, cfg.grid)
    return diff.sup_norm() / max(u_grid.sup_norm(), LAMBDA_FLOOR), u_grid


def _assemble(cfg: SolverConfig, v: SineSeries, lam: float, converged: bool,
              iterations: int, history, clamped: float) -> SolutionBundle:
    alpha = cfg.alpha
    if alpha == 1.0:
        gamma = 1.0
    else:
        gamma = lam ** (alpha / (alpha - 1.0))
    u = gamma * v
    if alpha == 1.0:
        Fv, _ = _apply_A_series(v, cfg)
        diff = to_grid(Fv * (1.0 / lam) - v, cfg.grid)
        residual = diff.sup_norm() / to_grid(v, cfg.grid).sup_norm()
        u_grid = to_grid(u, cfg.grid)
    else:
        residual, u_grid = _fixed_point_residual(u, cfg)
    g_grid = GridFunction(-np.maximum(u_grid.values, 0.0) ** (1.0 / alpha))
    g = to_coefficients(g_grid, cfg.modes)
    f = unfold(g, cfg.m)
    v_grid = to_grid(v, cfg.grid)
    # Spectral cross-check: S_m g = A u* = u*, so g also equals S_m^{-1} u*.
    g_spec = apply_inverse(cfg.operator, u)
    cross = float(np.max(np.abs(to_grid(g_spec - g, cfg.grid).values)))
    sup_v = v_grid.sup_norm()
    interior = v_grid.values[1:-1]
    ints = weighted_sine_integral(pointwise_power(v_grid, 1.0 / alpha))
    if alpha > 1:
        lower = sup_v ** (1.0 / alpha - 1.0)
    elif alpha < 1:
        lower = 2.0 ** (1.0 - 1.0 / alpha)
    else:
        lower = 1.0
    diagnostics = {
        "iterations": iterations,
        "update_norm": float(history[-1]) if len(history) else 0.0,
        "residual": float(residual),
        "clamped_mass": float(clamped),
        "sup_v": float(sup_v),
        "min_v": float(interior.min()),
        "normalization": float(weighted_sine_integral(v)),
        "power_moment": float(ints),
        "power_moment_lower_bound": float(lower),
        "power_moment_bound_holds": bool(ints >= lower * (1 - 1e-12)),
        "within_M_cap": None if cfg.M_cap is None else bool(sup_v <= cfg.M_cap),
        "spectral_g_gap": cross,
    }
    return SolutionBundle(
        config=cfg, v=v, lam=float(lam), gamma=float(gamma), u_star=u_grid, g=g, f=f,
        converged=converged, iterations=iterations,
        update_norm=diagnostics["update_norm"], residual=float(residual),
        clamped_mass=float(clamped), history=tuple(float(h) for h in history),
        diagnostics=diagnostics)


def _closed_form(cfg: SolverConfig) -> SolutionBundle:
    v = _initial_iterate(cfg)
    lam = cfg.eigen_constant
    return _assemble(cfg, v, lam, True, 0, (0.0,), 0.0)


def solve(cfg: SolverConfig) -> SolutionBundle:
    """Run the damped normalised iteration from ``v0 = (2/pi) sin``.

    ``alpha = 1`` is linear and returns the exact eigenfunction bundle
    ``v = (2/pi) sin``, ``lambda = rho``, ``Gamma = 1``.

    Raises:
        NonConvergenceError: if ``max_iter`` is reached; ``.partial`` holds a
            bundle built from the last iterate.
        DegenerateInputError: if ``int(A v sin)`` collapses.
    """
    if cfg.alpha == 1.0:
        return _closed_form(cfg)
    v = _initial_iterate(cfg)
    v_grid = to_grid(v, cfg.grid)
    omega = cfg.damping
    history = []
    increases = 0
    lam = float("nan")
    clamped = 0.0
    for it in range(1, cfg.max_iter + 1):
        Av, clamped = _apply_A_series(v, cfg)
        lam = weighted_sine_integral(Av)
        if not lam > LAMBDA_FLOOR:
            raise DegenerateInputError(f"int(A v sin) = {lam:.3e} at iteration {it}")
        new = (1.0 - omega) * v + omega * (Av * (1.0 / lam))
        if cfg.symmetry:
            new = _odd_harmonics(new)
        new_grid = to_grid(new, cfg.grid)
        upd = float(np.max(np.abs(new_grid.values - v_grid.values)))
        history.append(upd)
        v, v_grid = new, new_grid
        if upd < cfg.tol:
            log.debug("converged after %d iterations, update %.3e", it, upd)
            # lambda belongs to the last evaluated iterate; refresh it at the fixed point.
            Av, clamped = _apply_A_series(v, cfg)
            lam = weighted_sine_integral(Av)
            return _assemble(cfg, v, lam, True, it, history, clamped)
        if len(history) >= 2 and history[-1] > history[-2]:
            increases += 1
            if increases >= 2 and omega > 0.5:
                log.info("update norm grew twice; damping lowered to 0.5 at iteration %d", it)
                omega = 0.5
        else:
            increases = 0
    partial = _assemble(cfg, v, lam, False, cfg.max_iter, history, clamped)
    raise NonConvergenceError(
        f"no convergence in {cfg.max_iter} iterations (last update {history[-1]:.3e})",
        last_iterate=v, history=history, partial=partial)


def holder_exponent(sol, fit_window=(1e-3, 1e-1), grid: Optional[int] = None) -> float:
    """Slope of ``log|g|`` against ``log x`` over nodes in ``fit_window``.

    Args:
        sol: a :class:`SolutionBundle` (uses the pointwise profile on its
            grid) or a :class:`SineSeries` (evaluated on a grid of size
            ``grid``, default 1024).
        fit_window: ``(x_lo, x_hi)`` with ``0 < x_lo < x_hi <= pi/4``.

    Raises:
        HolderFitError: if the window is invalid, holds fewer than three
            nodes, or ``g`` vanishes or changes sign inside it.
    """
    lo, hi = fit_window
    if not 0.0 < lo < hi <= np.pi / 4:
        raise HolderFitError(f"fit window must satisfy 0 < lo < hi <= pi/4, got {fit_window}")
    if isinstance(sol, SolutionBundle):
        vals = sol.g_grid
    else:
        vals = to_grid(sol, grid or max(1024, 2 * sol.modes))
    x = vals.nodes
    sel = (x >= lo) & (x <= hi)
    if sel.sum() < 3:
        raise HolderFitError("fewer than three grid nodes inside the fit window")
    gw = vals.values[sel]
    if np.any(gw == 0.0) or np.any(np.sign(gw) != np.sign(gw[0])):
        raise HolderFitError("g vanishes or changes sign inside the fit window")
    slope = np.polyfit(np.log(x[sel]), np.log(np.abs(gw)), 1)[0]
    return float(slope)
