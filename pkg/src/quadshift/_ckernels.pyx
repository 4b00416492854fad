# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; same signatures and storage layout as ``_pykernels``."""
import numpy as np

from .errors import SolverBreakdown

BACKEND = "cython"


cdef inline double complex _conj(double complex z) noexcept nogil:
    return z.real - 1j * z.imag


cdef inline double _cabs(double complex z) noexcept nogil:
    return (z.real * z.real + z.imag * z.imag) ** 0.5


cdef void _matvec(const double[::1] diag, const double complex[:, ::1] upper,
                  const double complex[::1] v, double complex[::1] out) noexcept nogil:
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t m = upper.shape[0]
    cdef Py_ssize_t j, s
    cdef double complex u
    for j in range(n):
        out[j] = diag[j] * v[j]
    for s in range(1, m + 1):
        for j in range(n - s):
            u = upper[s - 1, j]
            out[j] = out[j] + u * v[j + s]
            out[j + s] = out[j + s] + _conj(u) * v[j]


def band_matvec(diag, upper, v):
    cdef const double[::1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef const double complex[:, ::1] up = np.ascontiguousarray(upper, dtype=np.complex128)
    cdef const double complex[::1] vv = np.ascontiguousarray(v, dtype=np.complex128)
    out = np.empty(vv.shape[0], dtype=np.complex128)
    cdef double complex[::1] o = out
    with nogil:
        _matvec(d, up, vv, o)
    return out


def chebyshev_apply(diag, upper, v, double center, double halfwidth, coeffs):
    cdef const double[::1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef const double complex[:, ::1] up = np.ascontiguousarray(upper, dtype=np.complex128)
    cdef const double complex[::1] vv = np.ascontiguousarray(v, dtype=np.complex128)
    cdef const double complex[::1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef Py_ssize_t n = vv.shape[0]
    cdef Py_ssize_t K = c.shape[0]
    out_arr = np.empty(n, dtype=np.complex128)
    a_arr = np.array(vv, dtype=np.complex128)
    b_arr = np.empty(n, dtype=np.complex128)
    w_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double complex[::1] tp = a_arr
    cdef double complex[::1] tc = b_arr
    cdef double complex[::1] w = w_arr
    cdef double complex[::1] tmp
    cdef double inv = 1.0 / halfwidth
    cdef Py_ssize_t j, k
    with nogil:
        for j in range(n):
            out[j] = c[0] * tp[j]
        if K > 1:
            _matvec(d, up, tp, w)
            for j in range(n):
                tc[j] = (w[j] - center * tp[j]) * inv
                out[j] = out[j] + c[1] * tc[j]
        for k in range(2, K):
            _matvec(d, up, tc, w)
            for j in range(n):
                # T_{k+1} overwrites T_{k-1} in place
                tp[j] = 2.0 * (w[j] - center * tc[j]) * inv - tp[j]
                out[j] = out[j] + c[k] * tp[j]
            tmp = tp
            tp = tc
            tc = tmp
    return out_arr


def cayley_solve(diag, upper, v, double tau, double pivot_tol=1e-14):
    cdef const double[::1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef const double complex[:, ::1] up = np.ascontiguousarray(upper, dtype=np.complex128)
    cdef const double complex[::1] vv = np.ascontiguousarray(v, dtype=np.complex128)
    cdef Py_ssize_t n = vv.shape[0]
    cdef Py_ssize_t m = up.shape[0]
    cdef Py_ssize_t width = 2 * m + 1
    rows_arr = np.zeros((n, width), dtype=np.complex128)
    rhs_arr = np.empty(n, dtype=np.complex128)
    scale_arr = np.zeros(n, dtype=np.float64)
    y_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[:, ::1] R = rows_arr
    cdef double complex[::1] rhs = rhs_arr
    cdef double[::1] scale = scale_arr
    cdef double complex[::1] y = y_arr
    cdef double complex itau = 1j * tau
    cdef double complex piv, lik, acc
    cdef Py_ssize_t i, j, k, s, last, off
    cdef Py_ssize_t bad = -1
    cdef double a
    with nogil:
        _matvec(d, up, vv, rhs)
        for i in range(n):
            rhs[i] = vv[i] - itau * rhs[i]
            R[i, m] = 1.0 + itau * d[i]
        for s in range(1, m + 1):
            for j in range(n - s):
                R[j, m + s] = itau * up[s - 1, j]
                R[j + s, m - s] = itau * _conj(up[s - 1, j])
        for i in range(n):
            for j in range(width):
                a = _cabs(R[i, j])
                if a > scale[i]:
                    scale[i] = a
        for k in range(n):
            piv = R[k, m]
            if not _cabs(piv) > pivot_tol * scale[k]:
                bad = k
                break
            last = k + m
            if last > n - 1:
                last = n - 1
            for i in range(k + 1, last + 1):
                off = m + k - i
                lik = R[i, off] / piv
                R[i, off] = lik
                for j in range(k + 1, last + 1):
                    R[i, m + j - i] = R[i, m + j - i] - lik * R[k, m + j - k]
                rhs[i] = rhs[i] - lik * rhs[k]
        if bad < 0:
            for k in range(n - 1, -1, -1):
                acc = rhs[k]
                last = k + m
                if last > n - 1:
                    last = n - 1
                for j in range(k + 1, last + 1):
                    acc = acc - R[k, m + j - k] * y[j]
                y[k] = acc / R[k, m]
    if bad >= 0:
        raise SolverBreakdown(
            f"pivot {abs(rows_arr[bad, m]):.3e} at row {bad} below {pivot_tol:g} x row scale")
    return y_arr
