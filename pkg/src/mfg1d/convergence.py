"""Vanishing-potential sweep: errors against the eps = 0 limit, fitted
convergence orders, and margins against the explicit constant bounds.

Every regime converges to (u, m, h_bar) = (0, 1, j^2/2 - g(1)).  The
predicted envelopes are

    |h_bar_eps - h_bar_0| <= max|V| * eps                      (all regimes)
    sup|m - 1|  <= 2 (maxV - minV) / |h'(1)| * eps             (m*(j) != 1)
    sup|u|      <= 8 |j| (maxV - minV) / |h'(1)| * eps         (j != 0)
    sup|m - 1|  <= 2 sqrt(maxV - minV) / sqrt(h''(1)) * sqrt(eps)   (m* = 1)
    sup|u|      <= 16 |j| sqrt(maxV - minV) / sqrt(h''(1)) * sqrt(eps)

with u identically zero when j = 0.  Orders are fitted by least squares on
(log eps, log err) over the small-eps half of the ladder, where the
asymptotic statements apply.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import coupling_analysis as ca
from . import solver as _solver
from . import verifier as _verifier
from .model import (HypothesesError, ProblemSpec, Regime, SolverError,
                    SweepReport, SweepRow)
from .numerics import RootFindError


@dataclass(frozen=True)
class RatePrediction:
    """Predicted convergence orders and constants for one specification."""

    regime: Regime
    order_h: float
    order_m: float
    order_u: float
    c_h: float
    c_m: float
    c_u: float
    u_exact: bool

    def as_dict(self):
        return {"regime": self.regime.value,
                "order_h": self.order_h, "order_m": self.order_m,
                "order_u": self.order_u, "c_h": self.c_h, "c_m": self.c_m,
                "c_u": self.c_u, "u_exact": self.u_exact}


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    status: str = "ok"          # "ok" | "exact" | "insufficient"
    n_points: int = 0

    @property
    def exact(self) -> bool:
        return self.status == "exact"

    def as_dict(self):
        return {"slope": self.slope, "intercept": self.intercept,
                "r_squared": self.r_squared, "status": self.status,
                "n_points": self.n_points}


def predict_rates(spec: ProblemSpec) -> RatePrediction:
    """Orders and constants of the regime's error envelopes."""
    regime, _ = _solver.classify_regime(spec)
    j = abs(spec.j)
    pot = spec.potential
    c_h = pot.abs_max
    if regime is Regime.E_DEC_MSTAR_EQ1:
        h2 = ca.eval_h_second(1.0, j, spec.coupling)
        if h2 <= 0:
            raise HypothesesError("h''(1) <= 0 in the critical regime")
        c_m = 2.0 * math.sqrt(pot.span) / math.sqrt(h2)
        c_u = 16.0 * j * math.sqrt(pot.span) / math.sqrt(h2)
        return RatePrediction(regime, 1.0, 0.5, 0.5, c_h, c_m, c_u, False)
    h1 = ca.eval_h_prime(1.0, j, spec.coupling)
    if h1 == 0.0:
        raise HypothesesError("h'(1) = 0 outside the critical regime")
    c_m = 2.0 * pot.span / abs(h1)
    if j == 0.0:
        return RatePrediction(regime, 1.0, 1.0, 1.0, c_h, c_m, 0.0, True)
    c_u = 8.0 * j * pot.span / abs(h1)
    return RatePrediction(regime, 1.0, 1.0, 1.0, c_h, c_m, c_u, False)


def fit_loglog(pairs) -> FitResult:
    """Least-squares slope of log err against log eps.

    All-zero errors are reported as exact (the quantity is identically its
    limit); fewer than three usable (positive-error) rows is an error.
    """
    pairs = [(float(e), float(r)) for e, r in pairs]
    if any(r < 0 for _, r in pairs):
        raise ValueError("errors must be nonnegative")
    usable = [(e, r) for e, r in pairs if r > 0.0]
    if not usable and pairs:
        return FitResult(math.nan, math.nan, 1.0, status="exact", n_points=len(pairs))
    if len(usable) < 3:
        raise ValueError(f"fewer than 3 usable rows for the log-log fit ({len(usable)})")
    le = np.log([e for e, _ in usable])
    lr = np.log([r for _, r in usable])
    slope, intercept = np.polyfit(le, lr, 1)
    fitted = slope * le + intercept
    ss_res = float(np.sum((lr - fitted) ** 2))
    ss_tot = float(np.sum((lr - lr.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FitResult(float(slope), float(intercept), r2, n_points=len(usable))


def refinement_n_grid(eps_min: float, base: int = 256) -> int:
    """Grid size rule: keep discretization error far below the smallest
    measured error, N = max(256, ceil(32 / sqrt(eps_min)))."""
    return max(base, int(math.ceil(32.0 / math.sqrt(eps_min))))


def _margin(err: float, c: float, eps: float, order: float) -> float:
    if c == 0.0:
        return 0.0 if err == 0.0 else math.inf
    return err / (c * eps ** order)


def _solve_row(spec_eps: ProblemSpec, h_bar_limit: float,
               pred: RatePrediction) -> SweepRow:
    eps = spec_eps.epsilon
    try:
        sol = _solver.solve(spec_eps)
    except (SolverError, HypothesesError, RootFindError) as exc:
        return SweepRow(epsilon=eps, error=str(exc))
    res_hj, res_tr = _verifier.residuals(spec_eps, sol)
    report = _verifier.verify_regular(spec_eps, sol)
    err_h = abs(sol.h_bar - h_bar_limit)
    err_m = float(np.max(np.abs(sol.m - 1.0)))
    err_u = float(np.max(np.abs(sol.u)))
    return SweepRow(
        epsilon=eps, h_bar=sol.h_bar,
        err_h=err_h, err_m=err_m, err_u=err_u,
        res_hj=res_hj, res_transport=res_tr,
        d_switch=sol.d_switch,
        margin_h=_margin(err_h, pred.c_h, eps, pred.order_h),
        margin_m=_margin(err_m, pred.c_m, eps, pred.order_m),
        margin_u=_margin(err_u, pred.c_u, eps, pred.order_u),
        verified=report.passed,
    )


def max_workers_from_env(default: int = 1) -> int:
    raw = os.environ.get("MFG1D_THREADS", "")
    try:
        return max(1, int(raw)) if raw else default
    except ValueError:
        return default


def sweep(spec_template: ProblemSpec, epsilon_ladder,
          max_workers: int = 1) -> SweepReport:
    """Solve along a strictly decreasing epsilon ladder and assemble the
    error table, slope fits and bound margins.

    Rows are solved independently (optionally on a thread pool) and the
    report is assembled in ladder order, so the output does not depend on
    completion order.  Failed rows are annotated and excluded from fits.
    """
    ladder = [float(e) for e in epsilon_ladder]
    if len(ladder) < 3:
        raise ValueError("ladder too short for fit (need at least 3 rungs)")
    if any(e <= 0 for e in ladder) or any(a <= b for a, b in zip(ladder, ladder[1:])):
        raise ValueError("epsilon ladder must be positive and strictly decreasing")

    n_grid = refinement_n_grid(ladder[-1], base=max(256, spec_template.n_grid))
    pred = predict_rates(spec_template)
    h_bar_limit = _solver.limit_h_bar(spec_template)
    specs = [spec_template.with_epsilon(e, n_grid) for e in ladder]

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(lambda s: _solve_row(s, h_bar_limit, pred), specs))
    else:
        rows = [_solve_row(s, h_bar_limit, pred) for s in specs]

    # fit on the small-eps half, where the asymptotic envelopes apply
    # (but never fewer rungs than the fit itself requires)
    n_half = min(len(ladder), max(3, (len(ladder) + 1) // 2))
    tail = [r for r in rows[len(ladder) - n_half:] if r.error is None]

    def fit_of(attr: str) -> FitResult:
        try:
            return fit_loglog([(r.epsilon, getattr(r, attr)) for r in tail])
        except ValueError:
            return FitResult(math.nan, math.nan, math.nan,
                             status="insufficient", n_points=len(tail))

    return SweepReport(
        rows=tuple(rows),
        slope_h=fit_of("err_h"),
        slope_m=fit_of("err_m"),
        slope_u=fit_of("err_u"),
        prediction=pred,
        n_grid=n_grid,
        h_bar_limit=h_bar_limit,
    )


# ---------------------------------------------------------------------------
# report files
# ---------------------------------------------------------------------------

CSV_HEADER = ("epsilon,h_bar,err_H,err_m,err_u,res_hj,res_transport,"
              "d_switch,bound_margin_H,bound_margin_m,bound_margin_u")


def _fmt(v) -> str:
    if v is None:
        return ""
    return format(float(v), ".17g")


def write_sweep_csv(report: SweepReport, path) -> None:
    lines = [CSV_HEADER]
    for r in report.rows:
        lines.append(",".join([
            _fmt(r.epsilon), _fmt(r.h_bar), _fmt(r.err_h), _fmt(r.err_m),
            _fmt(r.err_u), _fmt(r.res_hj), _fmt(r.res_transport),
            _fmt(r.d_switch), _fmt(r.margin_h), _fmt(r.margin_m),
            _fmt(r.margin_u),
        ]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def summary_dict(report: SweepReport) -> dict:
    return {
        "n_grid": report.n_grid,
        "h_bar_limit": report.h_bar_limit,
        "prediction": report.prediction.as_dict(),
        "slopes": {
            "err_H": report.slope_h.as_dict(),
            "err_m": report.slope_m.as_dict(),
            "err_u": report.slope_u.as_dict(),
        },
        "rows": len(report.rows),
        "failed_rows": [r.epsilon for r in report.rows if r.error is not None],
        "all_verified": all(r.verified for r in report.rows if r.error is None),
    }


def write_plot_data(report: SweepReport, path) -> None:
    """Log-log table: one abscissa column and one column per error kind
    (zero or missing errors rendered as nan)."""
    def log10(v: float) -> str:
        if v is None or not math.isfinite(v) or v <= 0.0:
            return "nan"
        return format(math.log10(v), ".17g")

    lines = ["# log10_epsilon log10_err_H log10_err_m log10_err_u"]
    for r in report.rows:
        if r.error is not None:
            continue
        lines.append(" ".join([log10(r.epsilon), log10(r.err_h),
                               log10(r.err_m), log10(r.err_u)]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
