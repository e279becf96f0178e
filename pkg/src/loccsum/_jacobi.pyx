# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled one-sided Jacobi sweeps.

Operates on the transposed working matrix: row ``i`` of ``at`` is column ``i``
of the matrix being orthogonalized, so every inner loop is contiguous.
"""
from libc.math cimport sqrt, fabs, copysign


def jacobi_sweeps(double complex[:, ::1] at, double complex[:, ::1] vt,
                  double tol, int max_sweeps):
    cdef Py_ssize_t n = at.shape[0]
    cdef Py_ssize_t m = at.shape[1]
    cdef Py_ssize_t i, j, k
    cdef int sweep
    cdef bint rotated
    cdef double alpha, beta, gre, gim, g, zeta, t, c, s, pr, pi
    cdef double complex x, y, ph

    for sweep in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = 0.0
                beta = 0.0
                gre = 0.0
                gim = 0.0
                for k in range(m):
                    x = at[i, k]
                    y = at[j, k]
                    alpha += x.real * x.real + x.imag * x.imag
                    beta += y.real * y.real + y.imag * y.imag
                    # conj(x) * y
                    gre += x.real * y.real + x.imag * y.imag
                    gim += x.real * y.imag - x.imag * y.real
                g = sqrt(gre * gre + gim * gim)
                if g == 0.0 or g <= tol * sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * g)
                t = copysign(1.0, zeta) / (fabs(zeta) + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = c * t
                # conj of the unit phase of the inner product
                pr = gre / g
                pi = -gim / g
                ph = pr + 1j * pi
                for k in range(m):
                    x = at[i, k]
                    y = at[j, k] * ph
                    at[i, k] = c * x - s * y
                    at[j, k] = s * x + c * y
                for k in range(vt.shape[1]):
                    x = vt[i, k]
                    y = vt[j, k] * ph
                    vt[i, k] = c * x - s * y
                    vt[j, k] = s * x + c * y
        if not rotated:
            return sweep + 1
    return -1
