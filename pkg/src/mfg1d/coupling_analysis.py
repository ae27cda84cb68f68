"""The auxiliary function h(m) = j^2/(2 m^2) - g(m) and its branch structure.

For increasing g, h is a strictly decreasing bijection (h' = -g' - j^2/m^3 < 0)
and has a single global inverse branch.  For decreasing g with h strictly
convex and coercive at 0+ and +infinity, h has a unique interior minimizer
m*(j); a level y >= h(m*) is attained by two branch values
m_lower(y) <= m*(j) <= m_upper(y), which drive all the decreasing-coupling
solution regimes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Coupling, HypothesesError, Potential
from .numerics import (INCREASING, RootFindError, bisect_array,
                       find_root_monotone, integrate_periodic)

LOWER = "lower"
UPPER = "upper"

# |y - h(m*)| below this returns m* for either branch (junction rule)
JUNCTION_TOL = 1e-12

_FD_STEP = 1e-6


def eval_h(m, j: float, coupling: Coupling):
    """h(m) = j^2/(2 m^2) - g(m) for m > 0 (scalar or array)."""
    m_arr = np.asarray(m, dtype=float)
    if np.any(m_arr <= 0.0):
        raise ValueError("h(m) requires m > 0")
    out = j * j / (2.0 * m_arr * m_arr) - np.asarray(coupling.g(m_arr), dtype=float)
    return float(out) if np.isscalar(m) or m_arr.ndim == 0 else out


def eval_h_prime(m, j: float, coupling: Coupling):
    """h'(m) = -j^2/m^3 - g'(m)."""
    m_arr = np.asarray(m, dtype=float)
    out = -j * j / (m_arr ** 3) - np.asarray(coupling.g_prime(m_arr), dtype=float)
    return float(out) if np.isscalar(m) or m_arr.ndim == 0 else out


def eval_h_second(m, j: float, coupling: Coupling):
    """h''(m) = 3 j^2/m^4 - g''(m); g'' falls back to a centered difference
    of g' when the coupling does not carry it analytically."""
    m_arr = np.asarray(m, dtype=float)
    if coupling.g_second is not None:
        gpp = np.asarray(coupling.g_second(m_arr), dtype=float)
    else:
        s = _FD_STEP * np.maximum(1.0, np.abs(m_arr))
        gpp = (np.asarray(coupling.g_prime(m_arr + s), dtype=float)
               - np.asarray(coupling.g_prime(m_arr - s), dtype=float)) / (2.0 * s)
    out = 3.0 * j * j / (m_arr ** 4) - gpp
    return float(out) if np.isscalar(m) or m_arr.ndim == 0 else out


@dataclass(frozen=True)
class BranchFunction:
    """Validated branch structure of h for a given current.

    For a decreasing coupling with j != 0, ``m_star`` is the interior
    minimizer and ``h_at_star`` = h(m_star); for an increasing coupling h is
    globally decreasing and both are None.
    """

    j: float
    coupling: Coupling
    m_star: float | None
    h_at_star: float | None


_CONVEXITY_GRID = np.geomspace(1e-2, 1e2, 96)


def branch_function(j: float, coupling: Coupling, tol_root: float = 1e-12) -> BranchFunction:
    """Build and validate the branch structure of h.

    Decreasing coupling, j != 0: checks strict convexity of h on a log grid,
    locates m* by bisection on the increasing h' (with a short Newton polish,
    safe because h'' > 0 there), and checks coercivity by requiring h at the
    far ends of the sampled range to exceed h(m*) + 10.
    """
    j = float(j)
    if coupling.increasing:
        hp = eval_h_prime(_CONVEXITY_GRID, j, coupling)
        if not np.all(hp < 0):
            raise HypothesesError("h is not strictly decreasing for the increasing coupling")
        return BranchFunction(j, coupling, None, None)
    if j == 0.0:
        return BranchFunction(j, coupling, None, None)

    hpp = eval_h_second(_CONVEXITY_GRID, j, coupling)
    if not np.all(hpp > 0):
        bad = float(_CONVEXITY_GRID[int(np.argmin(hpp))])
        raise HypothesesError(f"convexity violated: h'' <= 0 near m = {bad:.6g}")

    # h' is increasing under convexity; bracket its sign change around m = 1
    lo, hi = 0.5, 2.0
    for _ in range(80):
        if eval_h_prime(lo, j, coupling) < 0.0:
            break
        lo *= 0.5
    else:
        raise HypothesesError("no interior minimum: h' has no sign change (low side)")
    for _ in range(80):
        if eval_h_prime(hi, j, coupling) > 0.0:
            break
        hi *= 2.0
    else:
        raise HypothesesError("no interior minimum: h' has no sign change (high side)")
    m_star = find_root_monotone(
        lambda m: eval_h_prime(m, j, coupling), (lo, hi), INCREASING, tol_root,
        lo_limit=lo, hi_limit=hi,
    )
    # Newton polish: quadratically sharpens the bisection result and lands on
    # the exact float when the minimizer is exactly representable (the
    # critical-current case m* = 1).
    for _ in range(3):
        hp = eval_h_prime(m_star, j, coupling)
        if hp == 0.0:
            break
        step = hp / eval_h_second(m_star, j, coupling)
        m_next = m_star - step
        if not lo <= m_next <= hi:
            break
        m_star = m_next
        if abs(step) <= 4.0 * np.finfo(float).eps * m_star:
            if eval_h_prime(m_star, j, coupling) == 0.0:
                break

    h_star = eval_h(m_star, j, coupling)
    for end in (_CONVEXITY_GRID[0] * min(1.0, m_star), _CONVEXITY_GRID[-1] * max(1.0, m_star)):
        if eval_h(end, j, coupling) <= h_star + 10.0:
            raise HypothesesError(
                f"h not coercive: h({end:.3g}) fails to exceed h(m*) + 10")
    return BranchFunction(j, coupling, float(m_star), float(h_star))


def minimizer_m_star(j: float, coupling: Coupling, tol_root: float = 1e-12) -> float:
    """The unique minimizer m*(j) > 0 of h for a decreasing coupling, j != 0."""
    if j == 0.0:
        raise ValueError("m*(j) requires j != 0")
    if coupling.increasing:
        raise ValueError("m*(j) is defined for decreasing couplings only")
    bf = branch_function(j, coupling, tol_root)
    return bf.m_star


def _expand_down(f_hits, start: float) -> float:
    """Smallest geometric step start*2^-k with f_hits(value) true."""
    v = start
    for _ in range(60):
        v *= 0.5
        if f_hits(v):
            return v
    raise RootFindError("no sign change after bracket expansion (branch low side)")


def _expand_up(f_hits, start: float) -> float:
    v = start
    for _ in range(60):
        v *= 2.0
        if f_hits(v):
            return v
    raise RootFindError("no sign change after bracket expansion (branch high side)")


def invert_h_branch(y, branch: str, j: float, coupling: Coupling,
                    tol: float = 1e-12, bf: BranchFunction | None = None):
    """Solve h(m) = y on the requested branch (scalar or array y).

    Decreasing coupling: 'lower' returns the unique m in (0, m*] (h decreasing
    there), 'upper' the unique m in [m*, inf).  Values with |y - h(m*)| <=
    junction tolerance return m* for either branch; y below h(m*) is an error.
    Increasing coupling: the single global branch of the decreasing bijection.
    """
    scalar = np.isscalar(y) or np.asarray(y).ndim == 0
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    if bf is None:
        bf = branch_function(j, coupling)

    if coupling.increasing:
        y_max = float(np.max(y_arr))
        y_min = float(np.min(y_arr))
        lo = _expand_down(lambda v: eval_h(v, j, coupling) >= y_max, 2.0)
        hi = _expand_up(lambda v: eval_h(v, j, coupling) <= y_min, 0.5)
        out = bisect_array(lambda m: y_arr - eval_h(m, j, coupling),
                           np.full_like(y_arr, lo), np.full_like(y_arr, hi), tol)
        return float(out[0]) if scalar else out

    if branch not in (LOWER, UPPER):
        raise ValueError(f"branch must be 'lower' or 'upper', got {branch!r}")
    m_star, h_star = bf.m_star, bf.h_at_star
    scale = max(1.0, abs(h_star))
    if np.any(y_arr < h_star - max(tol, JUNCTION_TOL * scale)):
        raise ValueError("below minimum: h(m) = y has no solution for y < h(m*)")
    junction = np.abs(y_arr - h_star) <= JUNCTION_TOL * scale
    out = np.full_like(y_arr, m_star)
    active = ~junction
    if np.any(active):
        y_act = np.maximum(y_arr[active], h_star)
        y_max = float(np.max(y_act))
        if branch == LOWER:
            lo = _expand_down(lambda v: eval_h(v, j, coupling) >= y_max, m_star)
            hi = m_star
            f = lambda m: eval_h(m, j, coupling) - y_act  # decreasing in m
        else:
            lo = m_star
            hi = _expand_up(lambda v: eval_h(v, j, coupling) >= y_max, m_star)
            f = lambda m: y_act - eval_h(m, j, coupling)  # decreasing in m
        out[active] = bisect_array(f, np.full_like(y_act, lo),
                                   np.full_like(y_act, hi), tol)
    return float(out[0]) if scalar else out


def critical_quantities(j: float, coupling: Coupling, potential: Potential,
                        epsilon: float, n_grid: int = 2048,
                        tol: float = 1e-12, bf: BranchFunction | None = None):
    """Floor of the effective Hamiltonian and the two branch masses there.

    h_bar_cr = eps * max V + h(m*); alpha_minus / alpha_plus are the torus
    integrals of the lower / upper branch evaluated pointwise at
    y(x) = h_bar_cr - eps V(x).
    """
    if bf is None:
        bf = branch_function(j, coupling, tol)
    if bf.m_star is None:
        raise ValueError("critical quantities require a decreasing coupling with j != 0")
    x = np.arange(n_grid) / n_grid
    v_x = np.asarray(potential.v(x), dtype=float)
    h_bar_cr = epsilon * potential.v_max + bf.h_at_star
    y = h_bar_cr - epsilon * v_x
    m_minus = invert_h_branch(y, LOWER, j, coupling, tol, bf=bf)
    m_plus = invert_h_branch(y, UPPER, j, coupling, tol, bf=bf)
    return h_bar_cr, integrate_periodic(m_minus), integrate_periodic(m_plus)


def critical_current(coupling: Coupling) -> float:
    """The current at which m*(j) = 1, i.e. the root of h'(1) = 0: since
    h'(1) = -j^2 - g'(1), this is sqrt(-g'(1)) (needs g'(1) < 0)."""
    gp1 = float(coupling.g_prime(1.0))
    if gp1 >= 0:
        raise ValueError(f"critical current requires g'(1) < 0, got {gp1}")
    return float(np.sqrt(-gp1))
