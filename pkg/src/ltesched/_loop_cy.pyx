# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled scheduling loop, the fast backend for :mod:`ltesched.kernel`.

Semantics mirror :mod:`ltesched._loop_py` exactly: same operation ordering,
same tie-breaking (lowest UE index), same floating-point expression shapes
written with explicit temporaries so compilers cannot re-associate or
contract them. Both backends must produce bit-identical outputs.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

KIND_MTS, KIND_BETS, KIND_PFS, KIND_FTGS = 0, 1, 2, 3

cdef double _ZETA_FLOOR = 1e-300


def run_schedule_arrays(
    int kind,
    bint fd,
    double[:, ::1] r_wb,
    r_sb,
    alphas,
    double beta,
    double zeta_init,
    double tti_s,
    int rbg_count,
):
    """Compiled twin of ``_loop_py.run_schedule_arrays`` (same contract)."""
    cdef Py_ssize_t n_ttis = r_wb.shape[0]
    cdef Py_ssize_t n_ues = r_wb.shape[1]

    owner_arr = np.empty((n_ttis, rbg_count), dtype=np.int32)
    granted_arr = np.zeros((n_ttis, n_ues), dtype=np.float64)
    zeta_arr = np.full(n_ues, float(zeta_init), dtype=np.float64)

    cdef int[:, ::1] owner = owner_arr
    cdef double[:, ::1] granted = granted_arr
    cdef double[::1] zeta = zeta_arr

    cdef double[::1] alpha_view
    if kind == 3:
        if alphas is None:
            raise ValueError("FTGS requires alphas")
        alpha_view = np.ascontiguousarray(alphas, dtype=np.float64)
    else:
        alpha_view = np.ones(n_ues, dtype=np.float64)

    cdef double[:, :, ::1] sb_view
    cdef double[::1] expected = np.empty(n_ues, dtype=np.float64)
    cdef double[::1] share = np.empty(n_ues, dtype=np.float64)
    if fd:
        if r_sb is None:
            raise ValueError("FD mode needs subband rates")
        sb_view = np.ascontiguousarray(r_sb[:, :, :rbg_count], dtype=np.float64)
        _fd_loop(
            kind, r_wb, sb_view, alpha_view, beta, tti_s,
            owner, granted, zeta, expected, share,
        )
    else:
        _td_loop(kind, r_wb, alpha_view, beta, tti_s, owner, granted, zeta)
    return owner_arr, granted_arr, zeta_arr


cdef inline void _commit_zeta(
    double[::1] zeta, double[:, ::1] granted, Py_ssize_t k,
    double beta, double om_beta, double tti_s,
) noexcept nogil:
    cdef Py_ssize_t i
    cdef double rate, a, b
    for i in range(zeta.shape[0]):
        rate = granted[k, i] / tti_s
        a = beta * zeta[i]
        b = om_beta * rate
        zeta[i] = a + b


cdef void _td_loop(
    int kind, double[:, ::1] r_wb, double[::1] alphas,
    double beta, double tti_s,
    int[:, ::1] owner, double[:, ::1] granted, double[::1] zeta,
) noexcept nogil:
    cdef Py_ssize_t n_ttis = r_wb.shape[0]
    cdef Py_ssize_t n_ues = r_wb.shape[1]
    cdef Py_ssize_t m = owner.shape[1]
    cdef double om_beta = 1.0 - beta
    cdef Py_ssize_t k, i, l, win
    cdef double best, v, z

    for k in range(n_ttis):
        win = 0
        if kind == 1:  # BETS: lowest smoothed throughput
            best = zeta[0]
            for i in range(1, n_ues):
                if zeta[i] < best:
                    best = zeta[i]
                    win = i
        else:
            if kind == 0:
                best = r_wb[k, 0]
            elif kind == 2:
                z = zeta[0]
                if z < _ZETA_FLOOR:
                    z = _ZETA_FLOOR
                best = r_wb[k, 0] / z
            else:
                best = r_wb[k, 0] / alphas[0]
            for i in range(1, n_ues):
                if kind == 0:
                    v = r_wb[k, i]
                elif kind == 2:
                    z = zeta[i]
                    if z < _ZETA_FLOOR:
                        z = _ZETA_FLOOR
                    v = r_wb[k, i] / z
                else:
                    v = r_wb[k, i] / alphas[i]
                if v > best:
                    best = v
                    win = i
        for l in range(m):
            owner[k, l] = <int>win
        granted[k, win] = r_wb[k, win]
        _commit_zeta(zeta, granted, k, beta, om_beta, tti_s)


cdef void _fd_loop(
    int kind, double[:, ::1] r_wb, double[:, :, ::1] r_sb, double[::1] alphas,
    double beta, double tti_s,
    int[:, ::1] owner, double[:, ::1] granted, double[::1] zeta,
    double[::1] expected, double[::1] share,
) noexcept nogil:
    cdef Py_ssize_t n_ttis = r_sb.shape[0]
    cdef Py_ssize_t n_ues = r_sb.shape[1]
    cdef Py_ssize_t m = r_sb.shape[2]
    cdef double om_beta = 1.0 - beta
    cdef double m_f = <double>m
    cdef Py_ssize_t k, i, l, win
    cdef double best, v, z, per_rbg, t1, t2, t3, a

    for k in range(n_ttis):
        if kind == 1:
            for i in range(n_ues):
                expected[i] = zeta[i]
                share[i] = 0.0
            for l in range(m):
                win = 0
                best = expected[0]
                for i in range(1, n_ues):
                    if expected[i] < best:
                        best = expected[i]
                        win = i
                owner[k, l] = <int>win
                share[win] = share[win] + 1.0
                granted[k, win] = granted[k, win] + r_sb[k, win, l]
                per_rbg = r_wb[k, win] / m_f
                t1 = share[win] * per_rbg
                t2 = om_beta * t1
                t3 = t2 / tti_s
                a = beta * zeta[win]
                expected[win] = a + t3
        else:
            for l in range(m):
                win = 0
                if kind == 0:
                    best = r_sb[k, 0, l]
                elif kind == 2:
                    z = zeta[0]
                    if z < _ZETA_FLOOR:
                        z = _ZETA_FLOOR
                    best = r_sb[k, 0, l] / z
                else:
                    best = r_sb[k, 0, l] / alphas[0]
                for i in range(1, n_ues):
                    if kind == 0:
                        v = r_sb[k, i, l]
                    elif kind == 2:
                        z = zeta[i]
                        if z < _ZETA_FLOOR:
                            z = _ZETA_FLOOR
                        v = r_sb[k, i, l] / z
                    else:
                        v = r_sb[k, i, l] / alphas[i]
                    if v > best:
                        best = v
                        win = i
                owner[k, l] = <int>win
                granted[k, win] = granted[k, win] + r_sb[k, win, l]
        _commit_zeta(zeta, granted, k, beta, om_beta, tti_s)
