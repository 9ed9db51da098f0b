"""Command-line interface: ``steadysqg {solve,verify,scan,evolve,export}``.

Exit codes: 0 ok, 2 non-convergence, 3 invalid input, 4 verification
failure, 5 blow-up during evolution.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import kernel as kn
from . import verification as ver
from .dynamics import EvolutionConfig, evolve
from .errors import InstabilityError, NonConvergenceError, SteadySQGError
from .io import (
    RunManifest,
    bundle_from_dict,
    export_profile,
    export_theta,
    load_solution_dict,
    save_solution,
    write_csv,
)
from .operators import degregorio, sqg_unfolded
from .solver import SolverConfig, solve

log = logging.getLogger("steadysqg")

EXIT_OK = 0
EXIT_NONCONVERGED = 2
EXIT_INVALID = 3
EXIT_VERIFY_FAILED = 4
EXIT_BLOWUP = 5

THREADS_ENV = "STEADYSQG_THREADS"
DEFAULT_SEED = 0


class _InvalidArgs(Exception):
    pass


def _default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _m_list(text: str):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise _InvalidArgs(f"bad --m-list {text!r}") from exc


def _manifest_path(args, fallback: Path) -> Path:
    return Path(args.manifest) if args.manifest else fallback.with_name(fallback.name + ".manifest.json")


def _finish(manifest: RunManifest, args, anchor: Path, start: float, code: int) -> int:
    manifest.duration_s = time.perf_counter() - start
    manifest.exit_code = code
    manifest.write(_manifest_path(args, anchor))
    return code


def _load_bundle(path):
    if path is None:
        raise _InvalidArgs("--solution is required")
    p = Path(path)
    if not p.is_file():
        raise _InvalidArgs(f"solution file {p} not found")
    try:
        d = load_solution_dict(p)
        return d, bundle_from_dict(d)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise _InvalidArgs(f"cannot read solution file {p}: {exc}") from exc


# ---------------------------------------------------------------------------

def cmd_solve(args) -> int:
    start = time.perf_counter()
    m = args.m if args.m is not None else (3 if args.family == "sqg" else 1)
    cfg = SolverConfig(family=args.family, m=m, alpha=args.alpha, modes=args.modes, grid=args.grid,
                       tol=args.tol, max_iter=args.max_iter, damping=args.damping,
                       symmetry=args.symmetry, M_cap=args.M_cap)
    out = Path(args.out)
    manifest = RunManifest("solve", cfg.to_dict())
    try:
        bundle = solve(cfg)
        code = EXIT_OK
    except NonConvergenceError as exc:
        log.error("%s", exc)
        bundle = exc.partial
        code = EXIT_NONCONVERGED
    manifest.outputs.append(str(save_solution(bundle, out)))
    ws, _ = ver.stationary_residual(bundle)
    print(f"lambda = {bundle.lam!r}")
    print(f"gamma = {bundle.gamma!r}")
    print(f"iterations = {bundle.iterations}")
    print(f"fixed_point_residual = {bundle.residual:.3e}")
    print(f"stationary_residual = {ws:.3e}")
    print(f"converged = {bundle.converged}")
    return _finish(manifest, args, out, start, code)


def cmd_verify(args) -> int:
    start = time.perf_counter()
    m_list = _m_list(args.m_list)
    suites = ["identity", "kernel", "lemmas", "residual"] if args.suite == "all" else [args.suite]
    stored = bundle = None
    if args.solution is not None or "residual" in suites:
        if args.solution is None:
            raise _InvalidArgs("the residual suite needs --solution")
        stored, bundle = _load_bundle(args.solution)
    report = ver.VerificationReport(args.suite)
    for name in suites:
        if name == "identity":
            report.extend(ver.run_identity_suite(m_list, bundle, seed=args.seed,
                                                 stored_lambda=None if stored is None else stored["lambda"]))
        elif name == "kernel":
            report.extend(ver.run_kernel_suite(m_list, seed=args.seed, bundle=bundle))
        elif name == "lemmas":
            report.extend(ver.run_lemma_suite(m_list, seed=args.seed))
        elif name == "residual":
            report.extend(ver.run_residual_suite(bundle))
    for line in report.summary_lines():
        print(line)
    print("overall:", "PASS" if report.passed else "FAIL")
    report_path = Path(args.report)
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(json.dumps(report.to_dict(), indent=1) + "\n")
    manifest = RunManifest("verify", {"suite": args.suite, "m_list": m_list, "solution": args.solution,
                                      "seed": args.seed}, outputs=[str(report_path)])
    return _finish(manifest, args, report_path, start, EXIT_OK if report.passed else EXIT_VERIFY_FAILED)


def _scan_one(what: str, m, n: int):
    cfg = kn.KernelConfig(m)
    if what == "positivity":
        kmin, tail = kn.kernel_min_scan(cfg, n)
        return [(m, kmin, tail)]
    if what == "ratio":
        return [(m, kn.kernel_bound_ratio_scan(cfg, n))]
    if what == "concavity":
        c = kn.concavity_chain(m, n=n, corrected=True)
        p = kn.concavity_chain(m, n=n, corrected=False)
        return [(m, c.max_phi_second, p.max_gap_profile_poly, c.max_gap_profile_poly,
                 c.max_gap_poly_cubic, c.max_cubic)]
    if what == "i-delta":
        return [(m, d, kn.i_delta(d, cfg)) for d in np.logspace(-1, -6, 11)]
    raise _InvalidArgs(f"unknown scan {what!r}")


SCAN_HEADERS = {
    "positivity": ["m", "kernel_min", "tail_bound"],
    "ratio": ["m", "max_ratio"],
    "concavity": ["m", "max_phi_second", "gap_published_poly", "gap_corrected_poly", "gap_poly_cubic",
                  "max_cubic"],
    "i-delta": ["m", "delta", "i_delta"],
    "psi": ["delta", "psi"],
}


def cmd_scan(args) -> int:
    start = time.perf_counter()
    out = Path(args.out)
    if args.what == "psi":
        rows = [(d, kn.psi(d)) for d in np.logspace(-1, -8, 15)]
    else:
        m_list = _m_list(args.m_list)
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            parts = list(pool.map(lambda m: _scan_one(args.what, m, args.n), m_list))
        rows = [r for part in parts for r in part]
    write_csv(out, SCAN_HEADERS[args.what], rows)
    for r in rows:
        print(", ".join(format(float(v), ".6g") for v in r))
    manifest = RunManifest("scan", {"what": args.what, "m_list": args.m_list, "n": args.n,
                                    "threads": args.threads}, outputs=[str(out)])
    return _finish(manifest, args, out, start, EXIT_OK)


def cmd_evolve(args) -> int:
    start = time.perf_counter()
    if not args.dt > 0 or not args.T >= args.dt:
        raise _InvalidArgs("need dt > 0 and T >= dt")
    _, bundle = _load_bundle(args.solution)
    f0 = bundle.f
    op = sqg_unfolded() if bundle.config.family == "sqg" else degregorio()
    K = f0.modes
    cfg = EvolutionConfig(alpha=bundle.alpha, operator=op, modes=K, grid=args.grid or 3 * K,
                          dt=args.dt, T=args.T, record_every=args.record_every)
    out = Path(args.out)
    manifest = RunManifest("evolve", {"solution": args.solution, "T": args.T, "dt": args.dt,
                                      "grid": cfg.grid, "modes": K})
    try:
        res = evolve(f0, cfg)
        rows, code = res.history, EXIT_OK
        print(f"drift = {res.drift:.3e}")
    except InstabilityError as exc:
        rows, code = exc.history, EXIT_BLOWUP
        print(f"blow-up at t = {exc.time:.6g}")
    manifest.outputs.append(str(write_csv(out, ["t", "drift", "sup_norm"], rows)))
    return _finish(manifest, args, out, start, code)


def cmd_export(args) -> int:
    start = time.perf_counter()
    if args.grid_size < 2:
        raise _InvalidArgs("--grid-size must be at least 2")
    if not args.extent > 0:
        raise _InvalidArgs("--extent must be positive")
    _, bundle = _load_bundle(args.solution)
    out = Path(args.out)
    if args.what == "profile":
        export_profile(bundle, args.grid_size, out)
    else:
        export_theta(bundle, args.grid_size, args.extent, out)
    manifest = RunManifest("export", {"solution": args.solution, "what": args.what,
                                      "grid_size": args.grid_size, "extent": args.extent},
                           outputs=[str(out)])
    return _finish(manifest, args, out, start, EXIT_OK)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="steadysqg", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--manifest", default=None, help="manifest path (default: <output>.manifest.json)")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--threads", type=int, default=_default_threads(),
                        help=f"worker threads for scans (env {THREADS_ENV})")

    s = sub.add_parser("solve", help="run the fixed-point solver")
    s.add_argument("--family", choices=["sqg", "degregorio"], default="sqg")
    s.add_argument("--m", type=int, default=None)
    s.add_argument("--alpha", type=float, default=2.0)
    s.add_argument("--modes", type=int, default=256)
    s.add_argument("--grid", type=int, default=1024)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--max-iter", type=int, default=500)
    s.add_argument("--damping", type=float, default=1.0)
    s.add_argument("--symmetry", action="store_true")
    s.add_argument("--M-cap", dest="M_cap", type=float, default=None)
    s.add_argument("--out", default="solution.json")
    common(s)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", choices=["identity", "kernel", "lemmas", "residual", "all"], default="lemmas")
    v.add_argument("--m-list", default="3,4,5,6,7,8")
    v.add_argument("--solution", default=None)
    v.add_argument("--report", default="report.json")
    common(v)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("scan", help="kernel and profile scans to CSV")
    c.add_argument("--what", choices=sorted(SCAN_HEADERS), default="positivity")
    c.add_argument("--m-list", default="3,4,5,6,7,8")
    c.add_argument("--n", type=int, default=500)
    c.add_argument("--out", default="scan.csv")
    common(c)
    c.set_defaults(func=cmd_scan)

    e = sub.add_parser("evolve", help="time-integrate an unfolded profile")
    e.add_argument("--solution", default=None)
    e.add_argument("--T", type=float, default=0.1)
    e.add_argument("--dt", type=float, default=1e-4)
    e.add_argument("--grid", type=int, default=None)
    e.add_argument("--record-every", type=int, default=10)
    e.add_argument("--out", default="evolve.csv")
    common(e)
    e.set_defaults(func=cmd_evolve)

    x = sub.add_parser("export", help="export profile or planar scalar to CSV")
    x.add_argument("--solution", default=None)
    x.add_argument("--what", choices=["profile", "theta"], default="profile")
    x.add_argument("--grid-size", type=int, default=512)
    x.add_argument("--extent", type=float, default=1.0)
    x.add_argument("--out", default="export.csv")
    common(x)
    x.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except _InvalidArgs as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SteadySQGError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
