"""Construction of the unique regular solution for each coupling regime.

Dispatch is on (monotonicity of g, current j, minimizer m*(j)):

  A  increasing g, j != 0 : m = h^-1(h_bar - eps V) on the global branch,
                            h_bar fixed by unit mass (strictly decreasing map).
  B  increasing g, j == 0 : m = [g^-1(eps V - h_bar)]^+, u = 0, p = 0.
  C  decreasing g, m* > 1 : lower branch, mass map strictly decreasing in h_bar.
  D  decreasing g, m* < 1 : upper branch, mass map strictly increasing.
  E  decreasing g, m* = 1 : h_bar pinned at its floor eps*max V + h(m*); the
                            density switches from the lower to the upper branch
                            at the unique d in (0,1) restoring unit mass.
  F  decreasing g, j == 0 : m = g^-1(eps V - h_bar), mass map increasing.

At eps = 0 every regime degenerates to the exact solution
(u, m, h_bar, p) = (0, 1, j^2/2 - g(1), j), which is returned verbatim
without any root finding.
"""

from __future__ import annotations

import warnings
from types import SimpleNamespace

import numpy as np

from . import coupling_analysis as ca
from . import numerics as num
from .model import (HypothesesError, ProblemSpec, Regime, SolutionTriple,
                    SolverError, reflected_spec)

# |m*(j) - 1| at or below this means the critical (piecewise) regime
M_STAR_TOL = 1e-9

_D_HI = 1.0 - 2.0 ** -20   # switch-point bracket stays inside [0, 1)


def classify_regime(spec: ProblemSpec):
    """Regime tag plus the validated branch structure of h.

    Classification is invariant under the j < 0 reflection, so |j| is used.
    """
    j = abs(spec.j)
    coupling = spec.coupling
    bf = ca.branch_function(j, coupling, spec.tol_root)
    if coupling.increasing:
        return (Regime.A_INC_JNZ if j != 0 else Regime.B_INC_J0), bf
    if j == 0:
        return Regime.F_DEC_J0, bf
    if abs(bf.m_star - 1.0) <= M_STAR_TOL:
        return Regime.E_DEC_MSTAR_EQ1, bf
    if bf.m_star > 1.0:
        return Regime.C_DEC_MSTAR_GT1, bf
    return Regime.D_DEC_MSTAR_LT1, bf


def limit_h_bar(spec: ProblemSpec) -> float:
    """The eps = 0 effective Hamiltonian j^2/2 - g(1) (= h(1))."""
    return ca.eval_h(1.0, abs(spec.j), spec.coupling)


def solve(spec: ProblemSpec) -> SolutionTriple:
    """Unique regular solution of the system for the given specification."""
    regime, bf = classify_regime(spec)
    if spec.epsilon == 0.0:
        n = spec.n_grid
        return SolutionTriple(
            u=np.zeros(n), m=np.ones(n),
            h_bar=limit_h_bar(spec), p=float(spec.j),
            regime=regime, d_switch=None,
        )
    if spec.j < 0:
        return _reflect_back(spec, solve(reflected_spec(spec)))
    if regime is Regime.A_INC_JNZ:
        return solve_increasing_jnz(spec, bf)
    if regime is Regime.B_INC_J0:
        return solve_increasing_j0(spec)
    if regime is Regime.C_DEC_MSTAR_GT1:
        return solve_decreasing_branch(spec, ca.LOWER, bf)
    if regime is Regime.D_DEC_MSTAR_LT1:
        return solve_decreasing_branch(spec, ca.UPPER, bf)
    if regime is Regime.E_DEC_MSTAR_EQ1:
        return solve_decreasing_critical(spec, bf)
    return solve_decreasing_j0(spec)


def _reflect_back(spec: ProblemSpec, rsol: SolutionTriple) -> SolutionTriple:
    """Map the solution of the reflected problem (j -> -j, V(x) -> V(-x))
    back to the original orientation: u(x) = u_r(-x), m(x) = m_r(-x),
    p = -p_r; a downward gradient jump stays downward."""
    n = rsol.n_grid
    idx = (-np.arange(n)) % n
    d = rsol.d_switch
    return SolutionTriple(
        u=rsol.u[idx], m=rsol.m[idx],
        h_bar=rsol.h_bar, p=-rsol.p,
        regime=rsol.regime,
        d_switch=None if d is None else (1.0 - d) % 1.0,
    )


# ---------------------------------------------------------------------------
# effective-Hamiltonian search setup (shared with the dense-scan oracle)
# ---------------------------------------------------------------------------

def h_bar_search_setup(spec: ProblemSpec, bf=None) -> SimpleNamespace:
    """Scalar mass objective, its monotone direction and a sign-changing
    bracket for the h_bar search of the current regime.

    The critical regime assigns h_bar instead of searching; use
    ``switch_search_setup`` for its switch-point search.
    """
    regime, bf_fresh = classify_regime(spec)
    if bf is None:
        bf = bf_fresh
    coupling, eps, v_x = spec.coupling, spec.epsilon, spec.v_x
    j = abs(spec.j)
    h1 = ca.eval_h(1.0, j, coupling)

    if regime is Regime.A_INC_JNZ:
        def objective(h_bar: float) -> float:
            # branch tag is ignored for an increasing coupling (global inverse)
            m = ca.invert_h_branch(h_bar - eps * v_x, ca.LOWER, j, coupling,
                                   spec.tol_root, bf=bf)
            return num.integrate_periodic(m) - 1.0
        direction = num.DECREASING
        pad = 0.5 + eps * spec.potential.abs_max
        lo, hi = num.expand_bracket(objective, (h1 - pad, h1 + pad), direction)
    elif regime is Regime.B_INC_J0:
        g0 = float(coupling.g(0.0))
        def objective(h_bar: float) -> float:
            m = coupling.g_inverse(np.maximum(eps * v_x - h_bar, g0))
            return num.integrate_periodic(m) - 1.0
        direction = num.DECREASING
        pad = 0.5 + eps * spec.potential.abs_max
        lo, hi = num.expand_bracket(objective, (h1 - pad, h1 + pad), direction)
    elif regime in (Regime.C_DEC_MSTAR_GT1, Regime.D_DEC_MSTAR_LT1):
        branch = ca.LOWER if regime is Regime.C_DEC_MSTAR_GT1 else ca.UPPER
        h_bar_cr = eps * spec.potential.v_max + bf.h_at_star
        def objective(h_bar: float) -> float:
            m = ca.invert_h_branch(h_bar - eps * v_x, branch, j, coupling,
                                   spec.tol_root, bf=bf)
            return num.integrate_periodic(m) - 1.0
        direction = num.DECREASING if branch == ca.LOWER else num.INCREASING
        width = max(1.0, eps * spec.potential.span)
        lo, hi = num.expand_bracket(objective, (h_bar_cr, h_bar_cr + width),
                                    direction, lo_limit=h_bar_cr)
    elif regime is Regime.F_DEC_J0:
        def objective(h_bar: float) -> float:
            m = coupling.g_inverse(eps * v_x - h_bar)
            return num.integrate_periodic(m) - 1.0
        direction = num.INCREASING
        pad = 0.5 + eps * spec.potential.abs_max
        lo, hi = num.expand_bracket(objective, (h1 - pad, h1 + pad), direction)
    else:
        raise ValueError("critical regime pins h_bar at its floor; no scalar search")

    return SimpleNamespace(regime=regime, bf=bf, objective=objective,
                           direction=direction, lo=lo, hi=hi)


def switch_search_setup(spec: ProblemSpec, bf=None) -> SimpleNamespace:
    """Mass-versus-switch-point objective phi(d) - 1 for the critical regime,
    together with the branch samples it is built from."""
    regime, bf = classify_regime(spec) if bf is None else (Regime.E_DEC_MSTAR_EQ1, bf)
    coupling, eps = spec.coupling, spec.epsilon
    j = abs(spec.j)
    h_bar = eps * spec.potential.v_max + bf.h_at_star
    y = h_bar - eps * spec.v_x
    m_lo = ca.invert_h_branch(y, ca.LOWER, j, coupling, spec.tol_root, bf=bf)
    m_hi = ca.invert_h_branch(y, ca.UPPER, j, coupling, spec.tol_root, bf=bf)

    def branch_at(d: float):
        yd = h_bar - eps * float(spec.potential.v(d))
        return (ca.invert_h_branch(yd, ca.LOWER, j, coupling, spec.tol_root, bf=bf),
                ca.invert_h_branch(yd, ca.UPPER, j, coupling, spec.tol_root, bf=bf))

    def objective(d: float) -> float:
        lo_d, hi_d = branch_at(d)
        return num.integrate_piecewise(m_lo, m_hi, d, lo_d, hi_d) - 1.0

    return SimpleNamespace(regime=Regime.E_DEC_MSTAR_EQ1, bf=bf, h_bar=h_bar,
                           m_lower=m_lo, m_upper=m_hi, branch_at=branch_at,
                           objective=objective, direction=num.DECREASING,
                           lo=0.0, hi=_D_HI)


# ---------------------------------------------------------------------------
# regimes
# ---------------------------------------------------------------------------

def solve_increasing_jnz(spec: ProblemSpec, bf=None) -> SolutionTriple:
    """Increasing coupling, nonzero current: global-branch inversion with the
    mass map strictly decreasing in h_bar."""
    setup = h_bar_search_setup(spec, bf)
    h_bar = num.find_root_monotone(setup.objective, (setup.lo, setup.hi),
                                   setup.direction, spec.tol_root)
    m = ca.invert_h_branch(h_bar - spec.epsilon * spec.v_x, ca.LOWER,
                           abs(spec.j), spec.coupling, spec.tol_root,
                           bf=setup.bf)  # branch tag unused: global inverse
    u, p = reconstruct_u(m, spec.j)
    return SolutionTriple(u=u, m=m, h_bar=float(h_bar), p=p,
                          regime=Regime.A_INC_JNZ)


def solve_increasing_j0(spec: ProblemSpec) -> SolutionTriple:
    """Increasing coupling, vanishing current: m = [g^-1(eps V - h_bar)]^+.

    Below eps0 = (g(1) - g(0)) / (max V - min V) the positive part is
    inactive and the density is smooth; past it we warn and keep the
    truncated candidate (which is then not a regular solution)."""
    coupling, eps = spec.coupling, spec.epsilon
    g0 = float(coupling.g(0.0))
    g1 = float(coupling.g(1.0))
    eps0 = (g1 - g0) / spec.potential.span
    if eps >= eps0:
        warnings.warn(
            f"epsilon {eps:g} is at or above the smoothness threshold {eps0:g}; "
            "proceeding with the truncated inverse", UserWarning, stacklevel=2)
    setup = h_bar_search_setup(spec)
    h_bar = num.find_root_monotone(setup.objective, (setup.lo, setup.hi),
                                   setup.direction, spec.tol_root)
    m = np.asarray(coupling.g_inverse(np.maximum(eps * spec.v_x - h_bar, g0)),
                   dtype=float)
    return SolutionTriple(u=np.zeros(spec.n_grid), m=m, h_bar=float(h_bar),
                          p=0.0, regime=Regime.B_INC_J0)


def solve_decreasing_branch(spec: ProblemSpec, branch: str, bf=None) -> SolutionTriple:
    """Decreasing coupling, j != 0, m*(j) != 1: single-branch solution.

    Lower branch (m* > 1) requires alpha_minus > 1 at the critical level,
    upper branch (m* < 1) requires alpha_plus < 1; both hold once eps is
    small enough, and their failure is reported as 'epsilon too large'."""
    if bf is None:
        _, bf = classify_regime(spec)
    j = abs(spec.j)
    h_bar_cr, alpha_minus, alpha_plus = ca.critical_quantities(
        j, spec.coupling, spec.potential, spec.epsilon,
        n_grid=spec.n_grid, tol=spec.tol_root, bf=bf)
    if branch == ca.LOWER and not alpha_minus > 1.0:
        raise SolverError(
            f"epsilon too large for regime: alpha_minus = {alpha_minus:.6g} <= 1")
    if branch == ca.UPPER and not alpha_plus < 1.0:
        raise SolverError(
            f"epsilon too large for regime: alpha_plus = {alpha_plus:.6g} >= 1")
    setup = h_bar_search_setup(spec, bf)
    h_bar = num.find_root_monotone(setup.objective, (setup.lo, setup.hi),
                                   setup.direction, spec.tol_root,
                                   lo_limit=h_bar_cr)
    m = ca.invert_h_branch(h_bar - spec.epsilon * spec.v_x, branch, j,
                           spec.coupling, spec.tol_root, bf=bf)
    u, p = reconstruct_u(m, spec.j)
    regime = Regime.C_DEC_MSTAR_GT1 if branch == ca.LOWER else Regime.D_DEC_MSTAR_LT1
    return SolutionTriple(u=u, m=m, h_bar=float(h_bar), p=p, regime=regime)


def solve_decreasing_critical(spec: ProblemSpec, bf=None) -> SolutionTriple:
    """Decreasing coupling at the critical current (m*(j) = 1).

    No solution exists above the floor eps*max V + h(m*), so h_bar is
    assigned, not searched.  The density follows the lower branch on
    [0, d) and the upper branch on [d, 1); the switch point d is the unique
    root of the mass function phi(d) - 1, which strictly decreases because
    the lower branch lies below the upper one.  The two branches agree at
    x = 0 (the potential's maximum), the only admissible continuity point.
    """
    if bf is None:
        _, bf = classify_regime(spec)
    pot = spec.potential
    if not pot.single_max:
        raise HypothesesError("critical regime requires a single-maximum potential")
    if min(pot.argmax, 1.0 - pot.argmax) > 1e-9:
        raise HypothesesError(
            f"critical regime requires the potential maximum at x = 0, got {pot.argmax}")

    setup = switch_search_setup(spec, bf)
    alpha_minus = num.integrate_periodic(setup.m_lower)
    alpha_plus = num.integrate_periodic(setup.m_upper)
    if not (alpha_minus < 1.0 < alpha_plus):
        raise SolverError(
            "switch-point sign condition fails "
            f"(alpha_minus = {alpha_minus:.6g}, alpha_plus = {alpha_plus:.6g}); "
            "epsilon too large or hypotheses violated")
    d = num.find_root_monotone(setup.objective, (setup.lo, setup.hi),
                               setup.direction, spec.tol_root,
                               lo_limit=0.0, hi_limit=_D_HI)
    m = np.where(spec.x < d, setup.m_lower, setup.m_upper)
    u, p = reconstruct_u(m, spec.j, d_switch=d, m_at_switch=setup.branch_at(d))
    return SolutionTriple(u=u, m=m, h_bar=float(setup.h_bar), p=p,
                          regime=Regime.E_DEC_MSTAR_EQ1, d_switch=float(d))


def solve_decreasing_j0(spec: ProblemSpec) -> SolutionTriple:
    """Decreasing concave coupling, vanishing current: u = 0 forces
    m = g^-1(eps V - h_bar) with h_bar fixed by unit mass (increasing map);
    requires eps*(max V - min V) < g(0) - g(1) so the density stays positive."""
    coupling, eps = spec.coupling, spec.epsilon
    gpp = ca.eval_h_second(ca._CONVEXITY_GRID, 0.0, coupling)
    if not np.all(gpp >= -1e-9):
        raise HypothesesError("h = -g is not convex on the sampled range")
    g0 = float(coupling.g(0.0))
    g1 = float(coupling.g(1.0))
    if eps * spec.potential.span >= g0 - g1:
        warnings.warn(
            f"epsilon {eps:g} violates the positivity threshold "
            f"{(g0 - g1) / spec.potential.span:g}", UserWarning, stacklevel=2)
        raise SolverError("epsilon too large for regime: density would vanish")
    setup = h_bar_search_setup(spec)
    h_bar = num.find_root_monotone(setup.objective, (setup.lo, setup.hi),
                                   setup.direction, spec.tol_root)
    m = np.asarray(coupling.g_inverse(eps * spec.v_x - h_bar), dtype=float)
    if np.any(m <= 0.0):
        raise SolverError("density not positive after the mass search")
    return SolutionTriple(u=np.zeros(spec.n_grid), m=m, h_bar=float(h_bar),
                          p=0.0, regime=Regime.F_DEC_J0)


# ---------------------------------------------------------------------------
# u reconstruction
# ---------------------------------------------------------------------------

def reconstruct_u(m, j: float, d_switch: float | None = None,
                  m_at_switch: tuple[float, float] | None = None):
    """Recover (u, p) from the density: p = int j/m over the torus and
    u(x) = int_0^x j/m - p x, so u(0) = 0 and u is 1-periodic exactly.

    With a branch switch at ``d_switch`` the integration path carries a
    double node there; the one-sided densities are taken from
    ``m_at_switch`` or extrapolated from the neighbouring nodes.
    """
    m = np.asarray(m, dtype=float)
    if np.any(m <= 0.0):
        raise SolverError("m <= 0 at a grid node; cannot reconstruct u")
    n = m.shape[0]
    if j == 0.0:
        return np.zeros(n), 0.0
    x = np.arange(n) / n
    w = j / m
    if d_switch is None:
        f_cum = num.cumulative_integral(w)
        p = f_cum[-1]
        return f_cum[:-1] - p * x, float(p)
    if m_at_switch is None:
        m_at_switch = (num.extrapolate_one_sided(m, d_switch, "left"),
                       num.extrapolate_one_sided(m, d_switch, "right"))
    pos, vals, offsets = num.break_path(w, w, d_switch,
                                        j / m_at_switch[0], j / m_at_switch[1])
    f_cum = num.cumulative_trapezoid_path(pos, vals)
    p = f_cum[-1]
    return f_cum[offsets] - p * x, float(p)
