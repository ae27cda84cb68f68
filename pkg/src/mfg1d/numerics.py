"""Root finding and periodic quadrature primitives.

Bisection is used everywhere instead of Newton: the auxiliary function's
derivative vanishes exactly at the minimizer where the decreasing regimes
operate, so derivative-based iterations are unsafe there, while bisection
converges unconditionally on a monotone bracket.  All routines are pure and
deterministic: identical inputs give bit-identical outputs.
"""

from __future__ import annotations

import numpy as np

INCREASING = "increasing"
DECREASING = "decreasing"

_MAX_EXPAND = 60
_MAX_BISECT = 260


class RootFindError(RuntimeError):
    """Bracket expansion or bisection failed (no sign change / nonmonotone)."""


def expand_bracket(
    f,
    bracket: tuple[float, float],
    direction: str,
    lo_limit: float | None = None,
    hi_limit: float | None = None,
) -> tuple[float, float]:
    """Grow a bracket by geometric doubling until f changes sign across it.

    Each side is expanded at most ``_MAX_EXPAND`` times and may be clamped by
    ``lo_limit`` / ``hi_limit``.  Raises on failure; never shrinks the input.
    """
    if direction not in (INCREASING, DECREASING):
        raise ValueError(f"direction must be 'increasing' or 'decreasing', got {direction!r}")
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError(f"bracket must satisfy lo < hi, got {bracket}")
    sgn = 1.0 if direction == INCREASING else -1.0
    flo = sgn * f(lo)
    fhi = sgn * f(hi)
    # for an increasing f we need f(lo) <= 0 <= f(hi)
    w = hi - lo
    n = 0
    while flo > 0.0:
        if n >= _MAX_EXPAND or (lo_limit is not None and lo <= lo_limit):
            raise RootFindError("no sign change after bracket expansion (low side)")
        lo -= w
        if lo_limit is not None:
            lo = max(lo, lo_limit)
        w *= 2.0
        n += 1
        flo = sgn * f(lo)
    n = 0
    while fhi < 0.0:
        if n >= _MAX_EXPAND or (hi_limit is not None and hi >= hi_limit):
            raise RootFindError("no sign change after bracket expansion (high side)")
        hi += w
        if hi_limit is not None:
            hi = min(hi, hi_limit)
        w *= 2.0
        n += 1
        fhi = sgn * f(hi)
    return lo, hi


def find_root_monotone(
    f,
    bracket: tuple[float, float],
    direction: str,
    tol: float,
    lo_limit: float | None = None,
    hi_limit: float | None = None,
) -> float:
    """Root of a continuous monotone scalar function by bracketed bisection.

    The initial bracket is expanded by geometric doubling (see
    ``expand_bracket``) until f changes sign, then bisected until the bracket
    width is <= tol.  Midpoint samples that violate the declared direction
    by more than a small slack raise ``nonmonotone detected``.
    """
    lo, hi = expand_bracket(f, bracket, direction, lo_limit, hi_limit)
    sgn = 1.0 if direction == INCREASING else -1.0
    flo = sgn * f(lo)
    fhi = sgn * f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi

    slack = tol + 1e-12 * (abs(flo) + abs(fhi))
    it = 0
    while hi - lo > tol and it < _MAX_BISECT:
        mid = 0.5 * (lo + hi)
        fm = sgn * f(mid)
        if fm < flo - slack or fm > fhi + slack:
            raise RootFindError(
                f"nonmonotone detected at x={mid!r}: f outside bracket value range"
            )
        if fm == 0.0:
            return mid
        if fm < 0.0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        it += 1
    return 0.5 * (lo + hi)


def bisect_array(f, lo, hi, tol: float, max_iter: int = _MAX_BISECT) -> np.ndarray:
    """Elementwise bisection for a vectorized f with sign-changing brackets.

    ``lo`` and ``hi`` are arrays (or scalars broadcast) with f(lo) and f(hi)
    of opposite sign elementwise.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    lo, hi = np.broadcast_arrays(lo, hi)
    lo, hi = lo.copy(), hi.copy()
    flo = np.asarray(f(lo), dtype=float)
    for _ in range(max_iter):
        if float(np.max(hi - lo)) <= tol:
            break
        mid = 0.5 * (lo + hi)
        fm = np.asarray(f(mid), dtype=float)
        exact = fm == 0.0
        same = (np.sign(fm) == np.sign(flo)) & ~exact
        lo = np.where(same | exact, mid, lo)
        hi = np.where(~same | exact, mid, hi)
        flo = np.where(same, fm, flo)
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# quadrature on the uniform periodic grid
# ---------------------------------------------------------------------------

def integrate_periodic(values) -> float:
    """Integral over the torus of samples on the uniform N-grid of [0, 1).

    The rectangle rule (1/N) * sum equals the periodic trapezoid rule and is
    spectrally accurate for smooth periodic integrands.
    """
    values = np.asarray(values, dtype=float)
    return float(values.mean())


def trapezoid_path(positions, values) -> float:
    """Composite trapezoid along an explicit node path (repeated positions
    carry a jump exactly: the zero-width cell contributes nothing)."""
    positions = np.asarray(positions, dtype=float)
    values = np.asarray(values, dtype=float)
    dx = np.diff(positions)
    return float(np.sum(dx * 0.5 * (values[1:] + values[:-1])))


def cumulative_trapezoid_path(positions, values) -> np.ndarray:
    """Running integral F(positions[k]) = int_0^{x_k} along a node path."""
    positions = np.asarray(positions, dtype=float)
    values = np.asarray(values, dtype=float)
    dx = np.diff(positions)
    out = np.empty_like(positions)
    out[0] = 0.0
    np.cumsum(dx * 0.5 * (values[1:] + values[:-1]), out=out[1:])
    return out


def break_path(left_values, right_values, d: float, left_at_break: float,
               right_at_break: float):
    """Node path for a piecewise function: left branch on [0, d), right
    branch on [d, 1), with an interior double node inserted at the break.

    Both branch arrays are sampled on the full uniform grid; the one-sided
    values at the break are supplied exactly by the caller.  The wrap value
    at x = 1 is the right branch at node 0 (periodicity).  Returns
    ``(positions, values, node_offsets)`` where ``node_offsets[k]`` locates
    grid node k inside the path.
    """
    left_values = np.asarray(left_values, dtype=float)
    right_values = np.asarray(right_values, dtype=float)
    n = left_values.shape[0]
    if right_values.shape[0] != n:
        raise ValueError("left and right branch arrays must share the grid")
    if not 0.0 <= d < 1.0:
        raise ValueError(f"break point d outside [0,1): {d}")
    x = np.arange(n) / n
    k = int(np.searchsorted(x, d, side="left"))  # first node with x >= d
    positions = np.concatenate([x[:k], [d, d], x[k:], [1.0]])
    values = np.concatenate(
        [left_values[:k], [left_at_break, right_at_break], right_values[k:],
         [right_values[0]]]
    )
    offsets = np.concatenate([np.arange(k), np.arange(k, n) + 2])
    return positions, values, offsets


def integrate_piecewise(left_values, right_values, d: float,
                        left_at_break: float | None = None,
                        right_at_break: float | None = None) -> float:
    """Torus integral of a two-branch piecewise function with break at d.

    Splitting the cell containing d removes the first-order-in-N quadrature
    error the naive rule would commit at the discontinuity.  When the
    one-sided values at d are not supplied they are interpolated linearly
    within the respective smooth branch.
    """
    left_values = np.asarray(left_values, dtype=float)
    right_values = np.asarray(right_values, dtype=float)
    n = left_values.shape[0]
    x = np.arange(n) / n
    if left_at_break is None:
        left_at_break = float(np.interp(d, np.append(x, 1.0),
                                        np.append(left_values, left_values[0])))
    if right_at_break is None:
        right_at_break = float(np.interp(d, np.append(x, 1.0),
                                         np.append(right_values, right_values[0])))
    positions, values, _ = break_path(left_values, right_values, d,
                                      left_at_break, right_at_break)
    return trapezoid_path(positions, values)


def extrapolate_one_sided(values, d: float, side: str) -> float:
    """One-sided value at an off-grid point d of a piecewise-smooth function
    sampled on the uniform grid, by quadratic extrapolation through the up to
    three nearest nodes strictly on the requested side (torus-periodic)."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    x = np.arange(n) / n
    k = int(np.searchsorted(x, d, side="left"))  # first node with x >= d
    if side == "left":
        idx = np.arange(k - 3, k)
    elif side == "right":
        idx = np.arange(k, k + 3)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    # unwrap positions so they are monotone around d
    pos = idx / n
    vals = values[idx % n]
    pts = [(p, v) for p, v in zip(pos, vals)]
    # Lagrange evaluation at d
    out = 0.0
    for i, (xi, vi) in enumerate(pts):
        li = 1.0
        for kk, (xk, _) in enumerate(pts):
            if kk != i:
                li *= (d - xk) / (xi - xk)
        out += vi * li
    return float(out)


def cumulative_integral(values) -> np.ndarray:
    """Cumulative trapezoid F(x_k) = int_0^{x_k} f for f sampled on the
    uniform N-grid; returns N+1 values including the wrap endpoint x = 1,
    so F[-1] equals integrate_periodic(values) for periodic samples."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    positions = np.append(np.arange(n) / n, 1.0)
    closed = np.append(values, values[0])
    return cumulative_trapezoid_path(positions, closed)
