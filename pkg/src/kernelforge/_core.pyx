# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled batched kernels; same contract as ``_core_py``.

Complex arithmetic is spelled out on separate real/imaginary buffers, which
avoids the slow C99 complex multiply.
"""
import numpy as np
from libc.math cimport sqrt, pow
from libc.stdlib cimport malloc, free

cdef enum:
    KIND_I = 1
    KIND_II = 2
    KIND_III = 3
    KIND_IV = 4


cdef double _chol_det(double* hr, double* hi, int k) nogil:
    # in-place Cholesky of the k x k Hermitian matrix (lower triangle used);
    # returns det, or -1.0 when the matrix is not positive definite
    cdef int i, j, p
    cdef double d, det = 1.0, ar, ai
    for j in range(k):
        d = hr[j * k + j]
        for p in range(j):
            d -= hr[j * k + p] * hr[j * k + p] + hi[j * k + p] * hi[j * k + p]
        if d <= 0.0:
            return -1.0
        det *= d
        d = sqrt(d)
        hr[j * k + j] = d
        hi[j * k + j] = 0.0
        for i in range(j + 1, k):
            ar = hr[i * k + j]
            ai = hi[i * k + j]
            for p in range(j):
                # L[i,p] * conj(L[j,p])
                ar -= hr[i * k + p] * hr[j * k + p] + hi[i * k + p] * hi[j * k + p]
                ai -= hi[i * k + p] * hr[j * k + p] - hr[i * k + p] * hi[j * k + p]
            hr[i * k + j] = ar / d
            hi[i * k + j] = ai / d
    return det


cdef void _fill(int kind, int m, int n, const double* row, double* xr, double* xi) nogil:
    cdef int i, j, c = 0
    cdef double sgn = -1.0 if kind == KIND_II else 1.0
    if kind == KIND_I:
        for i in range(m * n):
            xr[i] = row[2 * i]
            xi[i] = row[2 * i + 1]
        return
    for i in range(n * n):
        xr[i] = 0.0
        xi[i] = 0.0
    for i in range(n):
        for j in range(i if kind == KIND_III else i + 1, n):
            xr[i * n + j] = row[2 * c]
            xi[i * n + j] = row[2 * c + 1]
            xr[j * n + i] = sgn * row[2 * c]
            xi[j * n + i] = sgn * row[2 * c + 1]
            c += 1


def diag_norm_batch(int kind, int m, int n, coords):
    cdef const double[:, ::1] cv = np.ascontiguousarray(coords, dtype=np.float64)
    cdef Py_ssize_t b = cv.shape[0], t
    out = np.empty(b, dtype=np.float64)
    cdef double[::1] ov = out
    cdef int rows = m if kind == KIND_I else n
    cdef int cols = n
    cdef int i, j, p
    cdef double s2, val, qr, qi, a, c, ar, ai
    cdef double* buf = NULL
    cdef double *xr
    cdef double *xi
    cdef double *hr
    cdef double *hi
    if kind == KIND_IV:
        with nogil:
            for t in range(b):
                s2 = 0.0
                qr = 0.0
                qi = 0.0
                for i in range(n):
                    a = cv[t, 2 * i]
                    c = cv[t, 2 * i + 1]
                    s2 += a * a + c * c
                    qr += a * a - c * c
                    qi += 2.0 * a * c
                val = 1.0 - 2.0 * s2 + qr * qr + qi * qi
                ov[t] = val if (val > 0.0 and s2 < 1.0) else -1.0
        return out
    buf = <double*> malloc((2 * rows * cols + 2 * rows * rows) * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    xr = buf
    xi = buf + rows * cols
    hr = xi + rows * cols
    hi = hr + rows * rows
    try:
        with nogil:
            for t in range(b):
                _fill(kind, m, n, &cv[t, 0], xr, xi)
                val = 1.0
                # H = I - x x^*, lower triangle
                for i in range(rows):
                    for j in range(i + 1):
                        ar = 0.0
                        ai = 0.0
                        for p in range(cols):
                            ar += xr[i * cols + p] * xr[j * cols + p] + xi[i * cols + p] * xi[j * cols + p]
                            ai += xi[i * cols + p] * xr[j * cols + p] - xr[i * cols + p] * xi[j * cols + p]
                        hr[i * rows + j] = (1.0 if i == j else 0.0) - ar
                        hi[i * rows + j] = -ai
                    if hr[i * rows + i] <= 0.0:
                        val = -1.0
                        break
                if val > 0.0:
                    val = _chol_det(hr, hi, rows)
                if val > 0.0 and kind == KIND_II:
                    val = sqrt(val)
                ov[t] = val
    finally:
        free(buf)
    return out


def power_sum(values, double s):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double p, tot = 0.0, tot2 = 0.0
    with nogil:
        for i in range(v.shape[0]):
            p = pow(v[i], s)
            tot += p
            tot2 += p * p
    return tot, tot2
