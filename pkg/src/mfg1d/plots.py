"""Matplotlib figure rendering for the report paths."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .model import ProblemSpec, SolutionTriple, SweepReport

_PNG_META = {"Software": "mfg1d"}


def plot_solution(spec: ProblemSpec, sol: SolutionTriple, path) -> None:
    """Two-panel figure: density m(x) and value correction u(x)."""
    fig, (ax_m, ax_u) = plt.subplots(2, 1, figsize=(6.0, 6.0), sharex=True)
    ax_m.plot(spec.x, sol.m, "b-", lw=1.2)
    ax_m.axhline(1.0, color="0.6", lw=0.8, ls=":")
    ax_m.set_ylabel("m(x)")
    ax_u.plot(spec.x, sol.u, "r-", lw=1.2)
    ax_u.axhline(0.0, color="0.6", lw=0.8, ls=":")
    ax_u.set_ylabel("u(x)")
    ax_u.set_xlabel("x")
    if sol.d_switch is not None:
        for ax in (ax_m, ax_u):
            ax.axvline(sol.d_switch, color="k", lw=0.8, ls="--")
    title = (f"regime {sol.regime.value}, eps={spec.epsilon:g}, j={spec.j:g}, "
             f"h_bar={sol.h_bar:.6g}")
    ax_m.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_PNG_META)
    plt.close(fig)


def plot_sweep(report: SweepReport, path) -> None:
    """Log-log error decay with the fitted slopes in the legend."""
    rows = [r for r in report.rows if r.error is None]
    eps = [r.epsilon for r in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    series = [
        ("err_H", [r.err_h for r in rows], report.slope_h, "ko-"),
        ("err_m", [r.err_m for r in rows], report.slope_m, "bs-"),
        ("err_u", [r.err_u for r in rows], report.slope_u, "r^-"),
    ]
    for name, vals, fit, style in series:
        pts = [(e, v) for e, v in zip(eps, vals) if v > 0 and math.isfinite(v)]
        if not pts:
            continue
        label = name if fit.status != "ok" else f"{name} (slope {fit.slope:.2f})"
        ax.loglog([p[0] for p in pts], [p[1] for p in pts], style,
                  ms=4, lw=1.0, label=label)
    pred = report.prediction
    if eps:
        e0, e1 = max(eps), min(eps)
        ref = pred.c_m * e0 ** pred.order_m
        ax.loglog([e0, e1], [ref, ref * (e1 / e0) ** pred.order_m],
                  "g--", lw=0.8, label=f"bound slope {pred.order_m:g}")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    ax.set_title(f"vanishing-potential convergence, regime {pred.regime.value}",
                 fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_PNG_META)
    plt.close(fig)
