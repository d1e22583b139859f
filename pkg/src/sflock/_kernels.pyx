# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled pairwise kernels.

Same contracts as ``sflock._kernels_py``: the alignment sum per agent
accumulates in ascending partner order, pair sums in ascending (i, j) with
i < j. Pair sums and extrema agree with the fallback bit-for-bit; the
alignment sum agrees to a few ulps (the fallback vectorizes its power
evaluations through numpy, which may differ from libm in the last ulp).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport log, pow, sqrt

cnp.import_array()

WEIGHT_POWER = 0
WEIGHT_SHIFTED = 1
WEIGHT_REGULAR = 2

DEF W_POWER = 0
DEF W_SHIFTED = 1
DEF W_REGULAR = 2


cdef inline double _pair_dist2(const double[:, ::1] a, Py_ssize_t i, Py_ssize_t j) nogil:
    cdef double d2 = 0.0, dk
    cdef Py_ssize_t k
    for k in range(a.shape[1]):
        dk = a[j, k] - a[i, k]
        d2 += dk * dk
    return d2


cdef inline double _psi(int code, double dist, double d2, double alpha,
                        double delta, double beta_cs) nogil:
    if code == W_REGULAR:
        return pow(1.0 + d2, -beta_cs)
    if code == W_POWER:
        return pow(dist, -alpha)
    return pow(dist - delta, -alpha)


def rhs_dvel(const double[:, ::1] pos, const double[:, ::1] vel,
             int weight_code, double alpha, double delta, double beta_cs,
             double gamma, bint compensated):
    """Alignment acceleration; see the pure-Python twin for the contract."""
    cdef Py_ssize_t n = pos.shape[0]
    cdef Py_ssize_t d = pos.shape[1]
    out_arr = np.zeros((n, d))
    comp_arr = np.zeros((n, d)) if compensated else None
    cdef double[:, ::1] out = out_arr
    cdef double[:, ::1] comp = comp_arr if compensated else out_arr
    cdef double gm1 = gamma - 1.0
    cdef double floor = delta if weight_code == W_SHIFTED else 0.0
    cdef double inv_n = 1.0 / n
    cdef Py_ssize_t i, j, k
    cdef Py_ssize_t bad_i = -1, bad_j = -1
    cdef double bad_dist = 0.0
    cdef double d2, dist, n2, dvk, psi, gfac, coeff, s, y, t

    with nogil:
        for i in range(n):
            if bad_i >= 0:
                break
            for j in range(i + 1, n):
                d2 = _pair_dist2(pos, i, j)
                dist = sqrt(d2)
                if weight_code != W_REGULAR and dist <= floor:
                    bad_i = i
                    bad_j = j
                    bad_dist = dist
                    break
                n2 = _pair_dist2(vel, i, j)
                if n2 == 0.0:
                    continue
                psi = _psi(weight_code, dist, d2, alpha, delta, beta_cs)
                gfac = pow(n2, gm1)
                coeff = psi * gfac
                for k in range(d):
                    dvk = vel[j, k] - vel[i, k]
                    s = coeff * dvk
                    if compensated:
                        y = s - comp[i, k]
                        t = out[i, k] + y
                        comp[i, k] = (t - out[i, k]) - y
                        out[i, k] = t
                        y = (-s) - comp[j, k]
                        t = out[j, k] + y
                        comp[j, k] = (t - out[j, k]) - y
                        out[j, k] = t
                    else:
                        out[i, k] += s
                        out[j, k] -= s
        if bad_i < 0:
            for i in range(n):
                for k in range(d):
                    out[i, k] *= inv_n

    if bad_i >= 0:
        return out_arr, bad_i, bad_j, bad_dist
    return out_arr, -1, -1, 0.0


def min_pair(const double[:, ::1] pos):
    """Minimum inter-agent distance and its lexicographically first pair."""
    cdef Py_ssize_t n = pos.shape[0]
    cdef double best = np.inf
    cdef Py_ssize_t bi = 0, bj = 0, i, j
    cdef double dist
    with nogil:
        for i in range(n - 1):
            for j in range(i + 1, n):
                dist = sqrt(_pair_dist2(pos, i, j))
                if dist < best:
                    best = dist
                    bi = i
                    bj = j
    return best, bi, bj


def max_pair_norm(const double[:, ::1] rows):
    """Maximum over pairs of |row_i - row_j|."""
    cdef Py_ssize_t n = rows.shape[0]
    cdef double best = 0.0
    cdef Py_ssize_t i, j
    cdef double dist
    with nogil:
        for i in range(n - 1):
            for j in range(i + 1, n):
                dist = sqrt(_pair_dist2(rows, i, j))
                if dist > best:
                    best = dist
    return best


def pair_gap_pow_sum(const double[:, ::1] pos, double beta, double delta,
                     bint log_variant):
    """Ordered-pair sum of (gap - delta)^-beta, or log(gap - delta)."""
    cdef Py_ssize_t n = pos.shape[0]
    cdef double acc = 0.0
    cdef Py_ssize_t i, j
    cdef Py_ssize_t bad_i = -1, bad_j = -1
    cdef double bad_dist = 0.0
    cdef double dist, gap, t
    with nogil:
        for i in range(n - 1):
            if bad_i >= 0:
                break
            for j in range(i + 1, n):
                dist = sqrt(_pair_dist2(pos, i, j))
                if dist <= delta:
                    bad_i = i
                    bad_j = j
                    bad_dist = dist
                    break
                gap = dist - delta
                t = log(gap) if log_variant else pow(gap, -beta)
                acc += 2.0 * t
    if bad_i >= 0:
        return 0.0, bad_i, bad_j, bad_dist
    return acc, -1, -1, 0.0


def weighted_vel_pow_sum(const double[:, ::1] pos, const double[:, ::1] vel,
                         int weight_code, double alpha, double delta,
                         double beta_cs, double two_gamma):
    """Ordered-pair sum of psi(|x_i - x_j|) |v_i - v_j|^(2 gamma)."""
    cdef Py_ssize_t n = pos.shape[0]
    cdef double floor = delta if weight_code == W_SHIFTED else 0.0
    cdef double half_tg = two_gamma / 2.0
    cdef double acc = 0.0
    cdef Py_ssize_t i, j
    cdef Py_ssize_t bad_i = -1, bad_j = -1
    cdef double bad_dist = 0.0
    cdef double d2, dist, n2, psi, t
    with nogil:
        for i in range(n - 1):
            if bad_i >= 0:
                break
            for j in range(i + 1, n):
                d2 = _pair_dist2(pos, i, j)
                dist = sqrt(d2)
                if weight_code != W_REGULAR and dist <= floor:
                    bad_i = i
                    bad_j = j
                    bad_dist = dist
                    break
                psi = _psi(weight_code, dist, d2, alpha, delta, beta_cs)
                n2 = _pair_dist2(vel, i, j)
                t = psi * pow(n2, half_tg)
                acc += 2.0 * t
    if bad_i >= 0:
        return 0.0, bad_i, bad_j, bad_dist
    return acc, -1, -1, 0.0
