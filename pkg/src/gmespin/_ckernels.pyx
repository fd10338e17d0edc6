# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; mirrors ``_pykernels`` function for function."""
import numpy as np

from libc.math cimport cos, sin, sqrt


def overlap_grid(const double complex[::1] m0, const double complex[::1] m1,
                 const double[::1] thetas, const double[::1] phis):
    cdef Py_ssize_t nt = thetas.shape[0], nph = phis.shape[0], d = m0.shape[0]
    cdef Py_ssize_t a, b, k
    cdef double c0, s0, acc, re, im
    cdef double complex f, v
    out = np.empty((nt, nph), dtype=np.float64)
    cdef double[:, ::1] res = out
    cdef double complex[::1] ph = np.exp(-1j * np.asarray(phis))
    for a in range(nt):
        c0 = cos(thetas[a] / 2)
        s0 = sin(thetas[a] / 2)
        for b in range(nph):
            f = s0 * ph[b]
            acc = 0.0
            for k in range(d):
                v = c0 * m0[k] + f * m1[k]
                re = v.real
                im = v.imag
                acc += re * re + im * im
            res[a, b] = acc
    return out


def overlap_point(const double complex[::1] m0, const double complex[::1] m1, double theta, double phi):
    cdef Py_ssize_t k, d = m0.shape[0]
    cdef double c0 = cos(theta / 2), s0 = sin(theta / 2), acc = 0.0
    cdef double complex f = s0 * (cos(phi) - 1j * sin(phi)), v
    for k in range(d):
        v = c0 * m0[k] + f * m1[k]
        acc += v.real * v.real + v.imag * v.imag
    return acc


cdef void _isometry(const double[::1] params, Py_ssize_t m, double complex[:, ::1] u):
    cdef Py_ssize_t i, j, col, k
    cdef double c, s, th, ph
    cdef double complex e, ri, rj
    for i in range(m):
        for col in range(2):
            u[i, col] = 0
    u[0, 0] = 1
    u[1, 1] = 1
    k = params.shape[0] // 2 - 1
    for i in range(m - 2, -1, -1):
        for j in range(m - 1, i, -1):
            th = params[2 * k]
            ph = params[2 * k + 1]
            k -= 1
            c = cos(th)
            s = sin(th)
            e = cos(ph) + 1j * sin(ph)
            for col in range(2):
                ri = u[i, col]
                rj = u[j, col]
                u[i, col] = c * ri - e.conjugate() * s * rj
                u[j, col] = e * s * ri + c * rj


def isometry(params, Py_ssize_t m):
    out = np.empty((m, 2), dtype=complex)
    _isometry(np.ascontiguousarray(params, dtype=np.float64), m, out)
    return out


def roof_objective(params, const double complex[:, ::1] w, const double complex[:, :, ::1] spin_ops, Py_ssize_t m):
    cdef double complex[:, ::1] u = np.empty((m, 2), dtype=complex)
    cdef double complex p0, p1, q
    cdef double total = 0.0, acc, val
    cdef Py_ssize_t i, ax
    _isometry(np.ascontiguousarray(params, dtype=np.float64), m, u)
    for i in range(m):
        p0 = u[i, 0] * w[0, 0] + u[i, 1] * w[0, 1]
        p1 = u[i, 0] * w[1, 0] + u[i, 1] * w[1, 1]
        acc = 0.0
        for ax in range(3):
            q = (p0.conjugate() * (spin_ops[ax, 0, 0] * p0 + spin_ops[ax, 0, 1] * p1)
                 + p1.conjugate() * (spin_ops[ax, 1, 0] * p0 + spin_ops[ax, 1, 1] * p1))
            val = q.real
            acc += val * val
        total += sqrt(acc)
    return 0.5 * (1.0 - total)


def apply_ising_chain(psi, int n, double c, double s):
    out = np.array(psi, dtype=complex).reshape(-1)
    cdef double complex[::1] v = out
    cdef Py_ssize_t dim = v.shape[0], b, bm, mask
    cdef int i
    cdef double complex x, y
    cdef double complex ms = -1j * s
    for i in range(n - 1):
        # site i+1 (1-based) sits at bit n-1-i, its right neighbour one bit lower
        mask = (<Py_ssize_t>3) << (n - 2 - i)
        for b in range(dim):
            bm = b ^ mask
            if bm > b:
                x = v[b]
                y = v[bm]
                v[b] = c * x + ms * y
                v[bm] = c * y + ms * x
    return out
