"""Shared construction helpers for the test suite."""

import numpy as np

import mfg1d as M
from mfg1d import numerics as num
from mfg1d import solver as slv


def linear_dec():
    return M.Coupling.linear_decreasing()


def power(theta=1.0):
    return M.Coupling.power_increasing(theta)


def vcos(amplitude=1.0):
    return M.Potential.cosine(amplitude)


def make(coupling, j, eps, n=256, **kw):
    return M.make_problem(coupling, vcos(), j, eps, n, **kw)


def cubic_branches(y, j=1.0):
    """Independent branch oracle for g(m) = -m: the roots of
    2 m^3 - 2 y m^2 + j^2 = 0 give the two positive solutions of h(m) = y."""
    r = np.roots([2.0, -2.0 * y, 0.0, j * j])
    r = sorted(t.real for t in r if abs(t.imag) < 1e-5 and t.real > 0)
    if not r:
        return 1.0, 1.0
    return r[0], r[-1]


def branch_swapped_solution(spec):
    """Adversarial twin of the critical-regime solution: upper branch first,
    then lower, with the switch point chosen so the mass is still one.  Its
    gradient jump goes upward, so it must fail the jump-sign check."""
    setup = slv.switch_search_setup(spec)

    def psi(d):
        lo_d, hi_d = setup.branch_at(d)
        return num.integrate_piecewise(setup.m_upper, setup.m_lower, d,
                                       hi_d, lo_d) - 1.0

    d = num.find_root_monotone(psi, (0.0, 1.0 - 2.0 ** -20), "increasing",
                               spec.tol_root, lo_limit=0.0,
                               hi_limit=1.0 - 2.0 ** -20)
    m = np.where(spec.x < d, setup.m_upper, setup.m_lower)
    lo_d, hi_d = setup.branch_at(d)
    u, p = slv.reconstruct_u(m, spec.j, d_switch=d, m_at_switch=(hi_d, lo_d))
    return M.SolutionTriple(u=u, m=m, h_bar=setup.h_bar, p=p,
                            regime=M.Regime.E_DEC_MSTAR_EQ1, d_switch=float(d))
