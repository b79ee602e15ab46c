"""Numeric location of rank-one points and rationalization of the results.

Nothing here is trusted: every point leaving this module is only a proposal,
to be certified exactly by the caller.
"""

from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
from scipy.optimize import least_squares

from cupform import kernels
from cupform.exactpoly import ProjPoint


def flattening_coefficients(F):
    """Float array ``C[h, i, J]`` with ``sum_h p_h C[h, i, J] = H_F(p)[i, J]``.

    Columns run over multisets J of size n - 2, which drops the repeated
    columns of the symmetric flattening without changing its rank.
    """
    from cupform.analysis import symmetric_entry_fn

    k, n = F.num_vars, F.degree
    value = symmetric_entry_fn(F)
    cols = list(combinations_with_replacement(range(k), n - 2))
    C = np.empty((k, k, len(cols)))
    for h in range(k):
        for i in range(k):
            for c, J in enumerate(cols):
                C[h, i, c] = float(value(tuple(sorted((h, i) + J))))
    scale = np.max(np.abs(C))
    if scale > 0:
        C /= scale
    return C


def minor_cost(C, p):
    res, _ = kernels.minor_residuals(C, p, False)
    return float(res @ res)


def _solve(C, x0, free, fixed, max_nfev=400, on_sphere=True):
    """Least squares on the 2x2 minors over the ``free`` coordinates."""
    k = C.shape[0]
    base = np.zeros(k)
    for i, v in fixed.items():
        base[i] = v

    def full(z):
        x = base.copy()
        x[free] = z
        return x

    def fun(z):
        x = full(z)
        r, _ = kernels.minor_residuals(C, x, False)
        return np.append(r, x @ x - 1.0) if on_sphere else r

    def jac(z):
        x = full(z)
        _, J = kernels.minor_residuals(C, x, True)
        J = J[:, free]
        return np.vstack([J, 2.0 * x[free]]) if on_sphere else J

    m = len(fun(x0))
    method = "lm" if m >= len(free) else "trf"
    sol = least_squares(fun, x0, jac=jac, method=method, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev)
    x = full(sol.x)
    return x, minor_cost(C, x)


def multistart(F, seed=0, starts=24, tol=1e-20, accept=1e-10, initial_points=()):
    """Converged real points with squared-minor residual below ``accept``.

    The optimizer itself runs to ``tol`` or its evaluation budget. Returns a
    list of ``(point, residual)`` sorted by residual then coordinates.
    """
    k = F.num_vars
    if k < 2 or F.degree < 3:
        return []
    C = flattening_coefficients(F)
    rng = np.random.default_rng(seed)
    inits = [np.asarray([float(c) for c in p], dtype=float) for p in initial_points]
    inits += [rng.standard_normal(k) for _ in range(starts)]
    out = []
    for x0 in inits:
        x0 = x0 / np.linalg.norm(x0)
        if minor_cost(C, x0) <= tol:
            x, cost = x0, minor_cost(C, x0)
        else:
            x, cost = _solve(C, x0, list(range(k)), {})
        if cost <= accept and np.linalg.norm(x) > 0.5:
            out.append((x / np.linalg.norm(x), cost))
    out.sort(key=lambda t: (t[1], tuple(np.round(t[0], 12))))
    return out


def rationalize(x, max_den):
    """Continued-fraction rationalization in the chart of the largest coordinate."""
    x = np.asarray(x, dtype=float)
    j = int(np.argmax(np.abs(x)))
    y = x / x[j]
    coords = [Fraction(float(v)).limit_denominator(max_den) for v in y]
    coords[j] = Fraction(1)
    if not any(coords):
        return None
    return ProjPoint(coords)


def denominator_ladder(max_den):
    out, d = [], 10
    while d < max_den:
        out.append(d)
        d *= 100
    out.append(max_den)
    return out


def certify_near(F, x, certify, C=None, max_den=10**6, fix_den=100, accept=1e-10):
    """Try to turn a numeric rank-one point into an exactly certified one.

    First rationalizes directly. If that fails (typically on a positive
    dimensional component where the point is irrational), fixes coordinates
    one at a time to nearby small-denominator rationals, re-solves for the
    rest, and rationalizes again. ``certify`` maps a ProjPoint to a result or
    None.
    """
    for den in denominator_ladder(max_den):
        p = rationalize(x, den)
        if p is not None:
            got = certify(p)
            if got is not None:
                return got
    if C is None:
        C = flattening_coefficients(F)
    k = len(x)
    j = int(np.argmax(np.abs(x)))
    y = np.asarray(x, dtype=float) / x[j]
    others = [i for i in range(k) if i != j]
    for first in others:
        order = [first] + [i for i in others if i != first]
        fixed = {j: 1.0}
        cur = y.copy()
        for i in order[:-1]:
            fixed[i] = float(Fraction(float(cur[i])).limit_denominator(fix_den))
            free = [t for t in range(k) if t not in fixed]
            cur, cost = _solve(C, cur[free], free, fixed, on_sphere=False)
            if cost > accept:
                break
            p = rationalize(cur, max_den)
            if p is not None:
                got = certify(p)
                if got is not None:
                    return got
    return None
