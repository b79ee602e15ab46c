# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the kernels in ``_pykernels``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def bareiss_rank(rows):
    cdef Py_ssize_t nrows = len(rows)
    if nrows == 0:
        return 0
    cdef list m = [list(row_in) for row_in in rows]
    cdef Py_ssize_t ncols = len(m[0])
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef list pr, row
    cdef object prev = 1, akk, aik
    for c in range(ncols):
        if r == nrows:
            break
        piv = r
        while piv < nrows and (<list>m[piv])[c] == 0:
            piv += 1
        if piv == nrows:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        pr = <list>m[r]
        akk = pr[c]
        for i in range(r + 1, nrows):
            row = <list>m[i]
            aik = row[c]
            if aik == 0:
                if prev != akk:
                    for j in range(c + 1, ncols):
                        row[j] = (row[j] * akk) // prev
            else:
                for j in range(c + 1, ncols):
                    row[j] = (row[j] * akk - aik * pr[j]) // prev
            row[c] = 0
        prev = akk
        r += 1
    return r


def minor_residuals(coef_in, p_in, bint want_jac=True):
    cdef double[:, :, ::1] coef = np.ascontiguousarray(coef_in, dtype=np.float64)
    cdef double[::1] p = np.ascontiguousarray(p_in, dtype=np.float64)
    cdef Py_ssize_t k = coef.shape[0], nr = coef.shape[1], nc = coef.shape[2]
    cdef Py_ssize_t h, i, j, c, d, idx, x
    cdef double[:, ::1] m = np.zeros((nr, nc))
    for h in range(k):
        for i in range(nr):
            for c in range(nc):
                m[i, c] += p[h] * coef[h, i, c]
    cdef Py_ssize_t nres = (nr * (nr - 1) // 2) * (nc * (nc - 1) // 2)
    res_arr = np.empty(nres)
    cdef double[::1] res = res_arr
    jac_arr = np.empty((nres, k)) if want_jac else None
    cdef double[:, ::1] jac
    if want_jac:
        jac = jac_arr
    idx = 0
    for i in range(nr):
        for j in range(i + 1, nr):
            for c in range(nc):
                for d in range(c + 1, nc):
                    res[idx] = m[i, c] * m[j, d] - m[i, d] * m[j, c]
                    if want_jac:
                        for h in range(k):
                            jac[idx, h] = (coef[h, i, c] * m[j, d] + m[i, c] * coef[h, j, d]
                                           - coef[h, i, d] * m[j, c] - m[i, d] * coef[h, j, c])
                    idx += 1
    return res_arr, jac_arr
