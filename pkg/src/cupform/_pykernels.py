"""Reference implementations of the hot kernels (numpy / pure Python).

Imported when the compiled ``_ckernels`` extension is unavailable or when
``CUPFORM_PURE_PYTHON`` is set. Both backends must agree exactly on
``bareiss_rank`` and to rounding on ``minor_residuals``.
"""

import numpy as np


def bareiss_rank(rows):
    """Rank of an integer matrix by fraction-free (Bareiss) elimination.

    ``rows`` is a list of equal-length lists of Python ints; it is copied.
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    if nrows == 0:
        return 0
    ncols = len(m[0])
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = r
        while piv < nrows and m[piv][c] == 0:
            piv += 1
        if piv == nrows:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        pr = m[r]
        akk = pr[c]
        for i in range(r + 1, nrows):
            row = m[i]
            aik = row[c]
            for j in range(c + 1, ncols):
                row[j] = (row[j] * akk - aik * pr[j]) // prev
            row[c] = 0
        prev = akk
        r += 1
    return r


def minor_residuals(coef, p, want_jac=True):
    """All 2x2 minors of ``M(p) = sum_h p[h] * coef[h]`` and their Jacobian.

    ``coef`` has shape ``(k, rows, cols)``. Minors are ordered by row pair
    (i < j) then column pair (c < d), both lexicographic. The Jacobian has
    shape ``(n_minors, k)``.
    """
    coef = np.asarray(coef, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    k, nr, nc = coef.shape
    ri, rj = np.triu_indices(nr, 1)
    ci, cj = np.triu_indices(nc, 1)
    m = np.tensordot(p, coef, axes=1)
    a = m[ri][:, ci]
    b = m[rj][:, cj]
    c = m[ri][:, cj]
    d = m[rj][:, ci]
    res = (a * b - c * d).ravel()
    if not want_jac:
        return res, None
    ga = coef[:, ri][:, :, ci]
    gb = coef[:, rj][:, :, cj]
    gc = coef[:, ri][:, :, cj]
    gd = coef[:, rj][:, :, ci]
    jac = ga * b + a * gb - gc * d - c * gd
    return res, jac.reshape(k, -1).T.copy()
