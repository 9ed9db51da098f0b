"""Pseudo-spectral RK4 integrator for ``f_t = alpha S f f_x - (S f)_x f``.

Used only to check that computed profiles stay put; no stability verdict
is drawn from short runs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Tuple

import numpy as np

from .errors import InstabilityError, InvalidConfigError, NumericalError
from .operators import MultiplierOperator, apply, differentiate_on_grid
from .sine_series import GridFunction, SineSeries, to_coefficients, to_grid

log = logging.getLogger(__name__)

BLOWUP_FACTOR = 1e6


@dataclass(frozen=True)
class EvolutionConfig:
    """Time-stepping parameters.

    Attributes:
        alpha: exponent in the equation.
        operator: multiplier ``S``.
        modes: number of retained sine modes ``K``.
        grid: collocation grid size ``N``; at least ``3K`` when de-aliasing.
        dt: time step.
        T: horizon.
        dealias: form products on the ``N``-grid (``True``) or on the
            minimal ``K + 1`` grid, which aliases (``False``).
        record_every: steps between history rows.
    """

    alpha: float
    operator: MultiplierOperator
    modes: int
    grid: int
    dt: float
    T: float
    dealias: bool = True
    record_every: int = 10

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidConfigError(f"dt must be positive, got {self.dt}")
        if not self.T >= self.dt:
            raise InvalidConfigError(f"horizon T={self.T} is shorter than dt={self.dt}")
        if self.modes < 1:
            raise InvalidConfigError("modes must be positive")
        if self.dealias and self.grid < 3 * self.modes:
            raise InvalidConfigError(f"de-aliasing needs grid >= 3*modes, got N={self.grid}, K={self.modes}")
        if self.record_every < 1:
            raise InvalidConfigError("record_every must be positive")

    @property
    def steps(self) -> int:
        return int(round(self.T / self.dt))


class EvolutionResult(NamedTuple):
    f_T: SineSeries
    drift: float
    history: List[Tuple[float, float, float]]


def rhs(f: SineSeries, cfg: EvolutionConfig) -> SineSeries:
    """``alpha S f f_x - f (S f)_x`` projected onto ``K`` sine modes."""
    f = f.resized(cfg.modes)
    N = cfg.grid if cfg.dealias else cfg.modes + 1
    Sf = apply(cfg.operator, f)
    prod = (cfg.alpha * to_grid(Sf, N).values * differentiate_on_grid(f, N).values
            - to_grid(f, N).values * differentiate_on_grid(Sf, N).values)
    if not np.all(np.isfinite(prod)):
        raise NumericalError("right-hand side is not finite")
    prod[0] = prod[-1] = 0.0
    return to_coefficients(GridFunction(prod), cfg.modes)


def _sup(f: SineSeries, N: int) -> float:
    return to_grid(f, N).sup_norm()


def evolve(f0: SineSeries, cfg: EvolutionConfig) -> EvolutionResult:
    """Classical RK4 to ``T``; drift is ``||f_T - f0||_inf / ||f0||_inf`` on the grid.

    Raises:
        InstabilityError: if the sup norm grows by more than ``1e6`` or
            becomes non-finite; carries the blow-up time and history.
    """
    f0 = f0.resized(cfg.modes)
    N = max(cfg.grid, cfg.modes + 1)
    base = _sup(f0, N)
    if base == 0.0:
        base = 1.0
    f = f0
    dt = cfg.dt
    history = [(0.0, 0.0, _sup(f0, N))]
    for step in range(1, cfg.steps + 1):
        t = step * dt
        try:
            k1 = rhs(f, cfg)
            k2 = rhs(f + (0.5 * dt) * k1, cfg)
            k3 = rhs(f + (0.5 * dt) * k2, cfg)
            k4 = rhs(f + dt * k3, cfg)
        except NumericalError as exc:
            raise InstabilityError(f"non-finite state at t={t:.6g}", t, history) from exc
        f = f + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        sup = _sup(f, N)
        if not np.isfinite(sup) or sup > BLOWUP_FACTOR * base:
            raise InstabilityError(f"sup norm {sup:.3e} exceeded blow-up threshold at t={t:.6g}", t, history)
        if step % cfg.record_every == 0 or step == cfg.steps:
            drift = _sup(f - f0, N) / base
            history.append((t, drift, sup))
    drift = _sup(f - f0, N) / base
    return EvolutionResult(f, float(drift), history)
