"""Command-line front end: solve, sweep and verify.

Exit codes: 0 success / verified, 1 bad configuration or schema,
2 solver failure, 3 verification failure.  Data files are byte-deterministic
for a fixed configuration; run metadata (timestamps) goes to a sidecar.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .convergence import (summary_dict, sweep, max_workers_from_env,
                          write_plot_data, write_sweep_csv)
from .model import (ConfigError, HypothesesError, MFGError, ProblemSpec,
                    Regime, SolutionTriple, SolverError, parse_config,
                    problem_from_config)
from .numerics import RootFindError
from .plots import plot_solution, plot_sweep
from .solver import solve
from .verifier import verify_regular

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_VERIFY = 3


def _fail(code: int, message: str) -> int:
    print(f"mfg1d: error: {message}", file=sys.stderr)
    return code


def _load_spec(config_path: str) -> ProblemSpec:
    return problem_from_config(parse_config(config_path))


def _write_sidecar(out_path: Path, config_path: str) -> None:
    meta = {
        "tool": "mfg1d",
        "version": __version__,
        "config": str(config_path),
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    out_path.with_suffix(out_path.suffix + ".meta.json").write_text(
        json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def solution_dict(spec: ProblemSpec, sol: SolutionTriple, report) -> dict:
    out = {
        "regime": sol.regime.value,
        "h_bar": sol.h_bar,
        "p": sol.p,
        "grid": list(map(float, spec.x)),
        "u": list(map(float, sol.u)),
        "m": list(map(float, sol.m)),
        "verification": report.as_dict(),
    }
    if sol.d_switch is not None:
        out["d_switch"] = sol.d_switch
    return out


def cmd_solve(args) -> int:
    try:
        spec = _load_spec(args.config)
    except (ConfigError, OSError) as exc:
        return _fail(EXIT_CONFIG, str(exc))
    try:
        sol = solve(spec)
    except (SolverError, HypothesesError, RootFindError) as exc:
        return _fail(EXIT_SOLVER, str(exc))
    report = verify_regular(spec, sol)
    out = Path(args.out)
    out.write_text(json.dumps(solution_dict(spec, sol, report)) + "\n",
                   encoding="utf-8")
    _write_sidecar(out, args.config)
    if args.plot:
        plot_solution(spec, sol, out.with_suffix(".png"))
    if not report.passed:
        return _fail(EXIT_VERIFY,
                     "verification failed: " + ", ".join(report.failing()))
    print(f"solved regime {sol.regime.value}: h_bar = {sol.h_bar!r}, wrote {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.eps_count < 3:
        return _fail(EXIT_CONFIG, "ladder too short for fit (need --eps-count >= 3)")
    if args.eps_max <= 0:
        return _fail(EXIT_CONFIG, "--eps-max must be positive")
    try:
        spec = _load_spec(args.config)
    except (ConfigError, OSError) as exc:
        return _fail(EXIT_CONFIG, str(exc))
    ladder = [args.eps_max * 2.0 ** (-k) for k in range(args.eps_count)]
    try:
        report = sweep(spec, ladder, max_workers=max_workers_from_env())
    except (SolverError, HypothesesError, RootFindError, ValueError) as exc:
        return _fail(EXIT_SOLVER, str(exc))
    out = Path(args.out)
    write_sweep_csv(report, out)
    stem = out.with_suffix("")
    summary_path = Path(str(stem) + "_summary.json")
    summary_path.write_text(json.dumps(summary_dict(report), indent=2) + "\n",
                            encoding="utf-8")
    write_plot_data(report, Path(str(stem) + "_loglog.dat"))
    if not args.no_plot:
        plot_sweep(report, Path(str(stem) + ".png"))
    _write_sidecar(out, args.config)
    solved = [r for r in report.rows if r.error is None]
    if len(solved) < 3:
        return _fail(EXIT_SOLVER,
                     f"only {len(solved)} of {len(report.rows)} rungs solved; "
                     "cannot fit slopes")
    for r in report.rows:
        if r.error is not None:
            print(f"  rung eps={r.epsilon:g} failed: {r.error}", file=sys.stderr)
    if not all(r.verified for r in solved):
        return _fail(EXIT_VERIFY, "some sweep rows failed verification")
    print(f"swept {len(solved)} rungs at N={report.n_grid}: "
          f"slope_H={report.slope_h.slope:.3f} slope_m={report.slope_m.slope:.3f} "
          f"slope_u={report.slope_u.slope:.3f}; wrote {out}")
    return EXIT_OK


def _solution_from_json(payload: dict, spec: ProblemSpec) -> SolutionTriple:
    for key in ("regime", "h_bar", "p", "grid", "u", "m"):
        if key not in payload:
            raise ConfigError(f"solution file missing key {key!r}")
    grid = np.asarray(payload["grid"], dtype=float)
    if grid.shape[0] != spec.n_grid or np.max(np.abs(grid - spec.x)) > 1e-12:
        raise ConfigError("grid mismatch between solution file and config")
    try:
        regime = Regime(payload["regime"])
    except ValueError as exc:
        raise ConfigError(f"unknown regime tag {payload['regime']!r}") from exc
    u = np.asarray(payload["u"], dtype=float)
    m = np.asarray(payload["m"], dtype=float)
    if u.shape[0] != spec.n_grid or m.shape[0] != spec.n_grid:
        raise ConfigError("solution arrays do not match the grid size")
    return SolutionTriple(u=u, m=m, h_bar=float(payload["h_bar"]),
                          p=float(payload["p"]), regime=regime,
                          d_switch=payload.get("d_switch"))


def cmd_verify(args) -> int:
    try:
        spec = _load_spec(args.config)
        payload = json.loads(Path(args.solution).read_text(encoding="utf-8"))
        sol = _solution_from_json(payload, spec)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        return _fail(EXIT_CONFIG, str(exc))
    report = verify_regular(spec, sol)
    if args.out:
        Path(args.out).write_text(json.dumps(report.as_dict(), indent=2) + "\n",
                                  encoding="utf-8")
    if not report.passed:
        return _fail(EXIT_VERIFY,
                     "verification failed: " + ", ".join(report.failing()))
    print("verification passed (checks i-iv)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mfg1d",
        description="1-D stationary mean-field game solver and verifier")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one configuration")
    p_solve.add_argument("--config", required=True)
    p_solve.add_argument("--out", required=True)
    p_solve.add_argument("--plot", action="store_true",
                         help="render the solution figure next to the JSON")
    p_solve.set_defaults(func=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="vanishing-potential epsilon sweep")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--eps-max", type=float, required=True)
    p_sweep.add_argument("--eps-count", type=int, required=True)
    p_sweep.add_argument("--no-plot", action="store_true")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="re-verify a solution file")
    p_verify.add_argument("--config", required=True)
    p_verify.add_argument("--solution", required=True)
    p_verify.add_argument("--out", default=None)
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MFGError as exc:
        return _fail(EXIT_CONFIG, str(exc))


if __name__ == "__main__":
    sys.exit(main())
