"""Acceptance criteria, one function each, at their stated tolerances.

Each ``criterion_N`` returns ``(passed, detail)``. Under pytest every
criterion is a test and a PASS/FAIL line per criterion is printed in the
terminal summary; ``python tests/test_acceptance.py`` prints the same lines.
"""

import functools
import json
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from steadysqg import kernel as kn
from steadysqg.cli import main as cli_main
from steadysqg.clausen import cl2
from steadysqg.dynamics import EvolutionConfig, evolve
from steadysqg.operators import folding_residual, sqg_folded, sqg_unfolded
from steadysqg.sine_series import SineSeries, pointwise_power
from steadysqg.solver import SolverConfig, holder_exponent, solve
from steadysqg.verification import (cross_path_check, eigen_identity_check, i_delta_slope, random_nonneg,
                                    stationary_residual)

M_ALL = (3, 4, 5, 6, 7, 8)
RESULTS = {}


@functools.lru_cache(maxsize=None)
def _timed_solve(alpha, family="sqg", m=3):
    t0 = time.perf_counter()
    b = solve(SolverConfig(family=family, m=m, alpha=alpha, modes=256, grid=1024, tol=1e-10, max_iter=500))
    return b, time.perf_counter() - t0


def criterion_1():
    with tempfile.TemporaryDirectory() as d:
        out = Path(d) / "sol.json"
        code = cli_main(["solve", "--family", "sqg", "--m", "3", "--alpha", "1", "--out", str(out)])
        sol = json.loads(out.read_text())
    f = np.array(sol["coeffs_f"])
    stray = float(np.max(np.abs(np.delete(f, 2))) / abs(f[2]))
    err = abs(sol["lambda"] - 8 / 5)
    ok = code == 0 and err <= 1e-12 and stray <= 1e-12
    return ok, f"|lambda - 8/5| = {err:.1e}, off-sin(3x) content {stray:.1e}"


def criterion_2():
    rng = np.random.default_rng(0)
    worst = 0.0
    for i in range(100):
        m = (3, 4, 5, 6)[i % 4]
        worst = max(worst, eigen_identity_check(random_nonneg(rng, 512), "sqg", m))
    return worst < 1e-12, f"max relative error {worst:.1e} over 100 inputs, m = 3..6"


def criterion_3():
    b, secs = _timed_solve(2.0)
    ws, _ = stationary_residual(b, N=2 * b.config.grid)
    control, _ = stationary_residual(SineSeries.from_modes(2, a2=1.0), 2.0, sqg_folded(3), 2 * b.config.grid)
    ratio = control / ws
    ok = (b.converged and b.iterations <= 500 and b.residual <= 1e-8 and ws <= 1e-6 and ratio >= 1e4
          and secs <= 30)
    return ok, (f"{b.iterations} iterations, fixed-point residual {b.residual:.1e}, stationary {ws:.1e}, "
                f"control ratio {ratio:.1e}, {secs:.3f} s")


def criterion_4():
    b, _ = _timed_solve(2.0)
    e_sol = cross_path_check(pointwise_power(b.v_grid, 1 / b.alpha), "sqg", 3)
    rng = np.random.default_rng(1)
    e_rand = max(cross_path_check(random_nonneg(rng, 1024), "sqg", 3) for _ in range(20))
    return max(e_sol, e_rand) <= 1e-6, f"v^(1/alpha) {e_sol:.1e}, worst of 20 random {e_rand:.1e}"


def criterion_5():
    mins = {m: kn.kernel_min_scan(kn.KernelConfig(m), 500)[0] for m in M_ALL}
    worst = min(mins.values())
    return worst >= -1e-10, f"smallest kernel value {worst:.2e} over m = 3..8"


def criterion_6():
    worst_link, worst_m, all_ok = -np.inf, None, True
    for m in M_ALL:
        r = kn.concavity_chain(m, n=2000, corrected=False)
        link = max(r.max_gap_profile_poly, r.max_gap_poly_cubic)
        ok = r.max_phi_second < 0 and link <= 0 and r.max_cubic < 0
        all_ok &= ok
        if link > worst_link:
            worst_link, worst_m = link, m
    fixed = max(max(r.max_gap_profile_poly, r.max_gap_poly_cubic)
                for r in (kn.concavity_chain(m, n=2000, corrected=True) for m in M_ALL))
    t = kn.tau()
    terr = abs(t - (2 - kn.ZETA2))
    ok = all_ok and terr <= 1e-10 and t < 9 / 20
    return ok, (f"largest chain gap {worst_link:.2e} (m={worst_m}; must be <= 0), "
                f"with cos x = 1 - 2 theta^2 the gap is {fixed:.1e}, "
                f"|tau - (2 - zeta(2))| = {terr:.1e}, tau = {t:.6f}")


def criterion_7():
    rng = np.random.default_rng(2)
    x = rng.uniform(0.05, 2 * np.pi - 0.05, 50)
    eps = 1e-5
    fd = (np.asarray(cl2(x + eps)) - np.asarray(cl2(x - eps))) / (2 * eps)
    cerr = float(np.max(np.abs(fd + 0.5 * np.log(2 - 2 * np.cos(x)))))
    perr = abs(kn.psi(1e-6) - 1.25 * np.log(4))
    n = 4001
    aerr = abs(kn.rho_delta_argmax(0.2, n) - np.pi / 2)
    ok = cerr <= 1e-7 and perr <= 1e-3 and aerr <= np.pi / (n - 1)
    return ok, f"Cl2 derivative {cerr:.1e}, psi limit {perr:.1e}, rho argmax offset {aerr:.1e}"


def criterion_8():
    slopes = {m: i_delta_slope(kn.KernelConfig(m)) for m in M_ALL}
    ok = all(0.88 <= s < 1.00 for s in slopes.values())
    return ok, f"slopes {min(slopes.values()):.4f}..{max(slopes.values()):.4f} over m = 3..8"


def criterion_9():
    h2 = holder_exponent(_timed_solve(2.0)[0])
    h3 = holder_exponent(_timed_solve(3.0)[0])
    ok = abs(h2 - 0.5) <= 0.05 and abs(h3 - 1 / 3) <= 0.05
    return ok, f"alpha=2 exponent {h2:.3f}, alpha=3 exponent {h3:.3f}"


def criterion_10():
    rng = np.random.default_rng(4)
    worst = 0.0
    for m in M_ALL:
        for _ in range(10):
            a = np.zeros(m * 12)
            a[m - 1::m] = rng.standard_normal(12) / np.arange(1, 13) ** 2
            worst = max(worst, folding_residual(SineSeries(a), m, 512))
    return worst <= 1e-12, f"max folding residual {worst:.1e} over 60 series, m = 3..8"


def criterion_11():
    b, _ = _timed_solve(2.0, "degregorio", 1)
    ok = b.converged and b.residual <= 1e-8 and b.diagnostics["min_v"] > 0
    return ok, f"{b.iterations} iterations, residual {b.residual:.1e}, min interior v {b.diagnostics['min_v']:.2e}"


def _drift(b):
    f = b.f
    cfg = EvolutionConfig(b.alpha, sqg_unfolded(), f.modes, 3 * f.modes, dt=1e-4, T=0.1, record_every=100)
    return evolve(f, cfg).drift


def criterion_12():
    d2 = _drift(_timed_solve(2.0)[0])
    d1 = _drift(_timed_solve(1.0)[0])
    return d2 <= 1e-5 and d1 <= 1e-10, f"alpha=2 drift {d2:.1e} (<= 1e-5), alpha=1 drift {d1:.1e} (<= 1e-10)"


def criterion_13():
    bd = kn.negativity_criterion(0.5, 0.5, 0.5)
    ok = abs(bd.beta_at_M0) <= 1e-12 and not bd.is_negative
    worst = 0.0
    M = np.geomspace(1e-6, 1e6, 200001)
    for A1, A2, a in [(0.5, 0.4, 0.5), (0.2, 0.3, 0.25), (0.8, 0.1, 0.7), (1.5, 1.0, 0.5), (0.3, 2.0, 0.8)]:
        r = kn.negativity_criterion(A1, A2, a)
        with np.errstate(over="ignore"):
            beta = A1 * M ** (1 / a) + A2 - M
        scan_min = float(np.min(beta))
        worst = max(worst, abs(scan_min - r.beta_at_M0) / max(1.0, abs(r.beta_at_M0)))
        ok &= r.is_negative == (scan_min < 0)
    ok &= worst <= 1e-6
    return ok, f"boundary beta(M0) = {bd.beta_at_M0:.1e}, worst scan mismatch {worst:.1e}"


CRITERIA = [globals()[f"criterion_{i}"] for i in range(1, 14)]


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 14)])
def test_acceptance(crit):
    n = int(crit.__name__.split("_")[1])
    ok, detail = crit()
    RESULTS[n] = (ok, detail)
    assert ok, detail


def report_lines():
    return [f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}" for n, (ok, detail) in sorted(RESULTS.items())]


if __name__ == "__main__":
    for i, c in enumerate(CRITERIA, 1):
        RESULTS[i] = c()
    print("\n".join(report_lines()))
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
