# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled log-Laplace kernels for finite atom lists.

Every routine works on log-weights so that tilted sums never overflow:
the largest exponent is subtracted before exponentiation.
"""
from libc.math cimport exp, log, INFINITY
from libc.stdlib cimport malloc, free


cdef inline double _max_exponent(const double[::1] z, const double[::1] logw,
                                 double u, double v) noexcept nogil:
    cdef Py_ssize_t i
    cdef double a, amax = -INFINITY
    for i in range(z.shape[0]):
        a = logw[i] + u * z[i] + v * z[i] * z[i]
        if a > amax:
            amax = a
    return amax


def cgf_value(const double[::1] z, const double[::1] logw, double u, double v):
    cdef Py_ssize_t i
    cdef double amax, s = 0.0
    with nogil:
        amax = _max_exponent(z, logw, u, v)
        for i in range(z.shape[0]):
            s += exp(logw[i] + u * z[i] + v * z[i] * z[i] - amax)
    return amax + log(s)


def cgf_eval(const double[::1] z, const double[::1] logw, double u, double v):
    """Value, tilted moments and tilted covariance of (Z, Z**2).

    Returns ``(value, m1, m2, c11, c12, c22)``.
    """
    cdef Py_ssize_t i, n = z.shape[0]
    cdef double amax, zi, e, d1, d2
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0
    cdef double c11 = 0.0, c12 = 0.0, c22 = 0.0
    cdef double m1, m2
    cdef double *buf = <double *> malloc(n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            amax = _max_exponent(z, logw, u, v)
            for i in range(n):
                zi = z[i]
                e = exp(logw[i] + u * zi + v * zi * zi - amax)
                buf[i] = e
                s0 += e
                s1 += e * zi
                s2 += e * zi * zi
            m1 = s1 / s0
            m2 = s2 / s0
            # centred second pass keeps the covariance accurate for peaked tilts
            for i in range(n):
                zi = z[i]
                d1 = zi - m1
                d2 = zi * zi - m2
                e = buf[i]
                c11 += e * d1 * d1
                c12 += e * d1 * d2
                c22 += e * d2 * d2
    finally:
        free(buf)
    return amax + log(s0), m1, m2, c11 / s0, c12 / s0, c22 / s0


def cgf_values_into(const double[::1] z, const double[::1] logw,
                    const double[::1] us, const double[::1] vs, double[::1] out):
    cdef Py_ssize_t k, i
    cdef double amax, s, u, v
    with nogil:
        for k in range(us.shape[0]):
            u = us[k]
            v = vs[k]
            amax = _max_exponent(z, logw, u, v)
            s = 0.0
            for i in range(z.shape[0]):
                s += exp(logw[i] + u * z[i] + v * z[i] * z[i] - amax)
            out[k] = amax + log(s)
