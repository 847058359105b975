# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: cyclic Jacobi eigensolver and first-order recursions."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


cdef inline void _rot(double[:, ::1] a, Py_ssize_t i, Py_ssize_t j,
                      Py_ssize_t k, Py_ssize_t l, double s, double tau) noexcept nogil:
    cdef double g = a[i, j]
    cdef double h = a[k, l]
    a[i, j] = g - s * (h + g * tau)
    a[k, l] = h + s * (g - h * tau)


cdef double _offdiag_norm(double[:, ::1] a, Py_ssize_t n) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t p, q
    for p in range(n - 1):
        for q in range(p + 1, n):
            acc += a[p, q] * a[p, q]
    return sqrt(2.0 * acc)


def jacobi_eigh(cnp.ndarray A, bint want_vectors=True, int max_sweeps=100,
                double tol=1e-14):
    """Cyclic Jacobi on a symmetric matrix (upper triangle is read).

    Returns ``(eigenvalues, eigenvectors_or_None, sweeps, offdiag_norm, frob)``
    with eigenvalues unsorted, matching the columns of the eigenvector matrix.
    """
    cdef Py_ssize_t n = A.shape[0]
    cdef double[:, ::1] a = np.array(A, dtype=np.float64, order="C", copy=True)
    cdef cnp.ndarray d_arr = np.ascontiguousarray(np.diagonal(A), dtype=np.float64).copy()
    cdef double[::1] d = d_arr
    cdef double[::1] b = d_arr.copy()
    cdef double[::1] z = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray v_arr
    cdef double[:, ::1] v
    if want_vectors:
        v_arr = np.eye(n, dtype=np.float64)
    else:
        v_arr = np.zeros((1, 1), dtype=np.float64)
    v = v_arr

    cdef double frob = float(np.sqrt(np.sum(np.asarray(A, dtype=np.float64) ** 2)))
    cdef double off, tresh, g, h, t, theta, c, s, tau, apq
    cdef Py_ssize_t p, q, j
    cdef int sweep = 0

    with nogil:
        while True:
            # diagonal is tracked in d, not a
            off = _offdiag_norm(a, n)
            if off <= tol * frob or sweep >= max_sweeps:
                break
            sweep += 1
            if sweep < 4:
                tresh = 0.2 * off / (<double>n * n)
            else:
                tresh = 0.0
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    g = 100.0 * fabs(apq)
                    if sweep > 4 and fabs(d[p]) + g == fabs(d[p]) and fabs(d[q]) + g == fabs(d[q]):
                        a[p, q] = 0.0
                    elif fabs(apq) > tresh:
                        h = d[q] - d[p]
                        if fabs(h) + g == fabs(h):
                            t = apq / h
                        else:
                            theta = 0.5 * h / apq
                            t = 1.0 / (fabs(theta) + sqrt(1.0 + theta * theta))
                            if theta < 0.0:
                                t = -t
                        c = 1.0 / sqrt(1.0 + t * t)
                        s = t * c
                        tau = s / (1.0 + c)
                        h = t * apq
                        z[p] -= h
                        z[q] += h
                        d[p] -= h
                        d[q] += h
                        a[p, q] = 0.0
                        for j in range(p):
                            _rot(a, j, p, j, q, s, tau)
                        for j in range(p + 1, q):
                            _rot(a, p, j, j, q, s, tau)
                        for j in range(q + 1, n):
                            _rot(a, p, j, q, j, s, tau)
                        if want_vectors:
                            for j in range(n):
                                _rot(v, j, p, j, q, s, tau)
            for p in range(n):
                b[p] += z[p]
                d[p] = b[p]
                z[p] = 0.0

    return d_arr, (v_arr if want_vectors else None), sweep, off, frob


def first_order_recursion(const double[::1] coef, const double[::1] drift,
                          const double[::1] y0, const double[:, ::1] x):
    """``y[:, t] = drift + coef * y[:, t-1] + x[:, t]`` starting from ``y0``."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t T = x.shape[1]
    cdef cnp.ndarray out = np.empty((n, T), dtype=np.float64)
    cdef double[:, ::1] y = out
    cdef Py_ssize_t i, t
    cdef double prev
    with nogil:
        for i in range(n):
            prev = y0[i]
            for t in range(T):
                prev = drift[i] + coef[i] * prev + x[i, t]
                y[i, t] = prev
    return out
