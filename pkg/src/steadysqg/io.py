"""Solution files, CSV exports and run manifests."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from .errors import PreconditionError
from .sine_series import SineSeries, evaluate
from .solver import SolutionBundle, SolverConfig, _apply_A_series, _assemble

SCHEMA_KEYS = ("family", "m", "alpha", "modes", "grid", "coeffs_v", "lambda", "gamma",
               "coeffs_g", "coeffs_f", "diagnostics")


def bundle_to_dict(b: SolutionBundle) -> dict:
    cfg = b.config
    d = b.diagnostics
    return {
        "family": cfg.family,
        "m": cfg.m,
        "alpha": cfg.alpha,
        "modes": cfg.modes,
        "grid": cfg.grid,
        "coeffs_v": b.v.coeffs.tolist(),
        "lambda": b.lam,
        "gamma": b.gamma,
        "coeffs_g": b.g.coeffs.tolist(),
        "coeffs_f": b.f.coeffs.tolist(),
        "diagnostics": {
            "iterations": b.iterations,
            "update_norm": b.update_norm,
            "residual": b.residual,
            "clamped_mass": b.clamped_mass,
            "sup_v": d["sup_v"],
            "min_v": d["min_v"],
            "converged": b.converged,
            "spectral_g_gap": d["spectral_g_gap"],
            "power_moment_bound_holds": d["power_moment_bound_holds"],
        },
        "solver": {"tol": cfg.tol, "max_iter": cfg.max_iter, "damping": cfg.damping,
                   "symmetry": cfg.symmetry, "M_cap": cfg.M_cap},
    }


def bundle_from_dict(d: dict) -> SolutionBundle:
    """Rebuild a bundle from its serialised form.

    ``lambda`` and every derived quantity are recomputed from ``coeffs_v``;
    the stored values stay in the file for comparison.
    """
    missing = [k for k in SCHEMA_KEYS if k not in d]
    if missing:
        raise PreconditionError(f"solution file lacks fields {missing}")
    extra = d.get("solver", {})
    cfg = SolverConfig(family=d["family"], m=int(d["m"]), alpha=float(d["alpha"]),
                       modes=int(d["modes"]), grid=int(d["grid"]),
                       tol=float(extra.get("tol", 1e-10)), max_iter=int(extra.get("max_iter", 500)),
                       damping=float(extra.get("damping", 1.0)), symmetry=bool(extra.get("symmetry", False)),
                       M_cap=extra.get("M_cap"))
    v = SineSeries(np.asarray(d["coeffs_v"], dtype=float))
    if v.modes != cfg.modes:
        raise PreconditionError(f"coeffs_v has {v.modes} entries, expected {cfg.modes}")
    diag = d["diagnostics"]
    Av, clamped = _apply_A_series(v, cfg)
    lam = 0.5 * np.pi * float(Av.coeffs[0])
    return _assemble(cfg, v, lam, bool(diag.get("converged", True)), int(diag.get("iterations", 0)),
                     [float(diag.get("update_norm", 0.0))], clamped)


def save_solution(b: SolutionBundle, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(bundle_to_dict(b), indent=1) + "\n")
    return path


def load_solution_dict(path) -> dict:
    return json.loads(Path(path).read_text())


def load_solution(path) -> SolutionBundle:
    return bundle_from_dict(load_solution_dict(path))


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_csv(path, header: List[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def profile_values(b: SolutionBundle, x) -> Dict[str, np.ndarray]:
    """Pointwise ``v``, ``g`` and ``f`` at angles ``x`` (odd 2pi-periodic extensions)."""
    x = np.asarray(x, dtype=float)
    u = evaluate(b.u_series, x)
    uf = evaluate(b.u_series, b.m * x)
    return {"v": evaluate(b.v, x), "g": b.g_values(u), "f": b.g_values(uf)}


def theta_values(b: SolutionBundle, x1, x2) -> np.ndarray:
    """Homogeneous scalar ``theta = r f(angle)`` on the plane."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    r = np.hypot(x1, x2)
    ang = np.arctan2(x2, x1)
    f = b.g_values(evaluate(b.u_series, b.m * ang.ravel())).reshape(ang.shape)
    return r * f


def export_profile(b: SolutionBundle, n: int, path) -> Path:
    x = np.linspace(0.0, 2.0 * np.pi, n + 1)
    vals = profile_values(b, x)
    return write_csv(path, ["x", "v", "g", "f"], zip(x, vals["v"], vals["g"], vals["f"]))


def export_theta(b: SolutionBundle, n: int, extent: float, path) -> Path:
    s = np.linspace(-extent, extent, n)
    X1, X2 = np.meshgrid(s, s, indexing="ij")
    th = theta_values(b, X1, X2)
    return write_csv(path, ["x1", "x2", "theta"], zip(X1.ravel(), X2.ravel(), th.ravel()))


@dataclass
class RunManifest:
    command: str
    config: dict
    version: str = __version__
    duration_s: float = 0.0
    outputs: List[str] = field(default_factory=list)
    exit_code: Optional[int] = None

    def write(self, path) -> Path:
        path = Path(path)
        if str(path) not in self.outputs:
            self.outputs.append(str(path))
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(asdict(self), indent=1, default=str) + "\n")
        return path

    @classmethod
    def read(cls, path) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text()))
