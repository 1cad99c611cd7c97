# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernels.

Twin of ``_kernels_py.py``: identical operation order and comparisons, and
the build disables FP contraction, so both backends return bit-identical
doubles. Keep the two files in sync.
"""

from libc.math cimport floor as c_floor
from libc.math cimport pow as c_pow

import numpy as np


def time_trial_ratios(double t, double[::1] taus, double p, double b, double[::1] out):
    cdef Py_ssize_t j, ntr = taus.shape[0]
    cdef double one_minus_p = 1.0 - p
    cdef double tol = 1e-12 * (t if t > 1.0 else 1.0)
    cdef double tau_eff, s, x, gamma, c, xl, ell, cn
    for j in range(ntr):
        tau_eff = taus[j] * one_minus_p
        s = 0.0
        x = b
        while s < tau_eff:
            s += x
            x *= b
        gamma = tau_eff / s
        c = 0.0
        xl = gamma * b
        ell = 1.0
        while True:
            cn = c + xl
            if cn <= t + tol:
                c = cn
                ell = xl
                xl *= b
            else:
                break
        out[j] = t / ell


def query_trial_ratios(double t, int n, double d, int pn,
                       double[::1] etas, double[:, ::1] flip_u, double[::1] out):
    cdef Py_ssize_t i, j, tix, ntr = etas.shape[0]
    cdef double tol = 1e-12 * (t if t > 1.0 else 1.0)
    cdef double scale, c, xl, ell, cn, best
    cdef int l_best = 0, k, below, m, r

    ells_arr = np.empty(n, dtype=np.float64)
    pos_arr = np.empty(n, dtype=np.intc)
    ridx_arr = np.empty(n, dtype=np.intc)
    cdef double[::1] ells = ells_arr
    cdef int[::1] pos = pos_arr
    cdef int[::1] ridx = ridx_arr

    best = -1.0
    for i in range(n):
        scale = c_pow(d, i / <double> n)
        c = 0.0
        xl = scale * d
        ell = 1.0
        while True:
            cn = c + xl
            if cn <= t + tol:
                c = cn
                ell = xl
                xl *= d
            else:
                break
        ells[i] = ell
        if ell > best:
            best = ell
            l_best = <int> i
    for i in range(n):
        pos[i] = <int> i
    for j in range(ntr):
        k = <int> c_floor(etas[j] * n)
        below = 0
        for tix in range(k):
            r = <int> tix + <int> (flip_u[j, tix] * (n - tix))
            ridx[tix] = r
            pos[tix], pos[r] = pos[r], pos[tix]
            if pos[tix] < l_best:
                below += 1
        m = (l_best + k - 2 * below - pn) % n
        if m < 0:
            m += n
        for tix in range(k - 1, -1, -1):
            r = ridx[tix]
            pos[tix], pos[r] = pos[r], pos[tix]
        out[j] = t / ells[m]
