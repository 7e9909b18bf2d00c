# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled world loop.

Mirrors ``_pykernel.simulate`` operation for operation so that both
backends produce identical doubles.
"""

import numpy as np

from libc.math cimport NAN, exp, fabs


cdef inline double _logistic(double x) nogil:
    cdef double z
    if x >= 0.0:
        return 1.0 / (1.0 + exp(-x))
    z = exp(x)
    return z / (1.0 + z)


cdef inline double _combine(double p, double e) nogil:
    cdef double num = p * e
    cdef double den = num + (1.0 - p) * (1.0 - e)
    if den <= 0.0:
        return p
    return num / den


cdef inline Py_ssize_t _pick(double[:, ::1] trust, Py_ssize_t i, Py_ssize_t n, int proportional,
                             double u, int* fallback) nogil:
    cdef double total = 0.0, target, acc
    cdef Py_ssize_t j, last
    fallback[0] = 0
    if proportional:
        for j in range(n):
            if j != i:
                total += trust[i, j]
        if total > 0.0:
            target = u * total
            acc = 0.0
            last = -1
            for j in range(n):
                if j == i or trust[i, j] <= 0.0:
                    continue
                acc += trust[i, j]
                last = j
                if target < acc:
                    return j
            return last
        fallback[0] = 1
    j = <Py_ssize_t>(u * (n - 1))
    if j >= n - 1:
        j = n - 2
    if j >= i:
        j += 1
    return j


cdef double _clustering(double[:, ::1] trust, long[::1] group, Py_ssize_t n) nogil:
    cdef double total = 0.0, s_in, s_out, m_in, m_out, denom
    cdef Py_ssize_t i, j, n_in, n_out, counted = 0
    for i in range(n):
        s_in = 0.0
        s_out = 0.0
        n_in = 0
        n_out = 0
        for j in range(n):
            if j == i:
                continue
            if group[j] == group[i]:
                s_in += trust[i, j]
                n_in += 1
            else:
                s_out += trust[i, j]
                n_out += 1
        if n_in == 0 or n_out == 0:
            continue
        m_in = s_in / n_in
        m_out = s_out / n_out
        denom = m_in + m_out
        if denom <= 0.0:
            total += 0.5
        else:
            total += m_in / denom
        counted += 1
    if counted == 0:
        return NAN
    return total / counted


def simulate(
    double[::1] prior, double[::1] sigma, long[::1] group, double[:, ::1] trust,
    double[::1] signals, unsigned char[::1] truth_A, double[:, ::1] z,
    double[:, ::1] u_select, double[:, ::1] u_feedback,
    double alpha, double slope, double p_feedback, int trust_proportional,
    int discounting, int confidence_mode, int continuous, long bias_start,
    double[::1] out_clustering, double[::1] out_m1, double[::1] out_m2,
    double[::1] out_acc_pre, double[::1] out_acc_post, double[::1] out_trust2,
):
    cdef Py_ssize_t n = prior.shape[0]
    cdef Py_ssize_t T = signals.shape[0]
    cdef Py_ssize_t t, i, j, n1 = 0, n2, tcount
    cdef long fallbacks = 0
    cdef int fb, truth, has_feedback, update_bias, correct_pre, correct_post
    cdef double s, theta, phat, F, e, target, s1, s2, tsum
    cdef double[::1] p = prior.copy()
    cdef double[::1] conf = prior.copy()
    cdef unsigned char[::1] choice = np.zeros(n, dtype=np.uint8)

    for i in range(n):
        if group[i] == 0:
            n1 += 1
    n2 = n - n1

    with nogil:
        for t in range(T):
            s = signals[t]
            truth = truth_A[t] != 0
            correct_pre = 0
            for i in range(n):
                p[i] = _combine(prior[i], _logistic(slope * (s + sigma[i] * z[t, i])))
                conf[i] = 0.5 + fabs(p[i] - 0.5)
                choice[i] = p[i] >= 0.5
                if choice[i] == truth:
                    correct_pre += 1
            correct_post = 0
            update_bias = bias_start >= 0 and t >= bias_start
            for i in range(n):
                j = _pick(trust, i, n, trust_proportional, u_select[t, i], &fb)
                fallbacks += fb
                theta = trust[i, j]
                if discounting:
                    e = 0.5 + theta * (p[j] - 0.5)
                else:
                    e = p[j]
                phat = _combine(p[i], e)
                if (phat >= 0.5) == truth:
                    correct_post += 1
                has_feedback = u_feedback[t, i] < p_feedback
                if has_feedback:
                    F = 1.0 if choice[j] == truth else 0.0
                elif confidence_mode:
                    F = conf[i] if choice[i] == choice[j] else 1.0 - conf[i]
                else:
                    F = 1.0 if choice[i] == choice[j] else 0.0
                trust[i, j] = theta + alpha * (F - theta)
                if update_bias:
                    if has_feedback:
                        target = 1.0 if truth else 0.0
                    elif continuous:
                        target = phat
                    else:
                        target = 1.0 if phat >= 0.5 else 0.0
                    prior[i] = prior[i] + alpha * (target - prior[i])

            out_clustering[t] = _clustering(trust, group, n)
            s1 = 0.0
            s2 = 0.0
            for i in range(n):
                if group[i] == 0:
                    s1 += prior[i]
                else:
                    s2 += prior[i]
            out_m1[t] = s1 / n1
            out_m2[t] = s2 / n2
            out_acc_pre[t] = correct_pre / <double>n
            out_acc_post[t] = correct_post / <double>n
            tsum = 0.0
            tcount = 0
            for i in range(n):
                for j in range(n):
                    if j != i and group[j] == 1:
                        tsum += trust[i, j]
                        tcount += 1
            out_trust2[t] = tsum / tcount
    return fallbacks
