# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled small-matrix kernels.

Same call signatures as :mod:`gsa_relay._kernels_py`; the selector in
:mod:`gsa_relay._backend` decides which one is used.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport log2, sqrt

from gsa_relay.errors import NotPositiveDefinite, SingularMatrix

cnp.import_array()

ctypedef double complex cplx

BACKEND = "compiled"


cdef inline double _abs2(cplx z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef int _chol_log2det(cplx[:, ::1] a, Py_ssize_t n, double *out) nogil:
    """In-place lower Cholesky of a Hermitian matrix; returns nonzero on failure."""
    cdef Py_ssize_t i, j, k
    cdef cplx s
    cdef double d, acc = 0.0
    for j in range(n):
        d = a[j, j].real
        for k in range(j):
            d -= _abs2(a[j, k])
        if not d > 0.0:
            return 1
        d = sqrt(d)
        a[j, j] = d
        acc += log2(d)
        for i in range(j + 1, n):
            s = a[i, j]
            for k in range(j):
                s = s - a[i, k] * a[j, k].conjugate()
            a[i, j] = s / d
    out[0] = 2.0 * acc
    return 0


def log2det_hpd(m):
    """log2 det of a Hermitian positive-definite matrix via Cholesky pivots."""
    cdef cnp.ndarray[cplx, ndim=2, mode="c"] a = np.ascontiguousarray(
        0.5 * (m + np.conj(m).T), dtype=np.complex128
    )
    cdef double out = 0.0
    cdef Py_ssize_t n = a.shape[0]
    if _chol_log2det(a, n, &out):
        raise NotPositiveDefinite("non-positive Cholesky pivot")
    return out


def inv(m):
    """Gauss-Jordan inverse with partial pivoting."""
    cdef Py_ssize_t n = m.shape[0]
    cdef cnp.ndarray[cplx, ndim=2, mode="c"] a = np.array(m, dtype=np.complex128, order="C")
    cdef cnp.ndarray[cplx, ndim=2, mode="c"] b = np.eye(n, dtype=np.complex128)
    cdef cplx[:, ::1] av = a
    cdef cplx[:, ::1] bv = b
    cdef Py_ssize_t i, j, k, p
    cdef double best, cur
    cdef cplx f, t
    for k in range(n):
        p = k
        best = _abs2(av[k, k])
        for i in range(k + 1, n):
            cur = _abs2(av[i, k])
            if cur > best:
                best = cur
                p = i
        if best == 0.0:
            raise SingularMatrix("zero pivot in Gauss-Jordan elimination")
        if p != k:
            for j in range(n):
                t = av[k, j]; av[k, j] = av[p, j]; av[p, j] = t
                t = bv[k, j]; bv[k, j] = bv[p, j]; bv[p, j] = t
        f = 1.0 / av[k, k]
        for j in range(n):
            av[k, j] = av[k, j] * f
            bv[k, j] = bv[k, j] * f
        for i in range(n):
            if i == k:
                continue
            f = av[i, k]
            if f.real == 0.0 and f.imag == 0.0:
                continue
            for j in range(n):
                av[i, j] = av[i, j] - f * av[k, j]
                bv[i, j] = bv[i, j] - f * bv[k, j]
    return b


def af_rate_grid(signal_gram, noise_gram, per_stream_power, beta2, double sigma2):
    """Per-node AF rates for every operating point of one channel draw.

    ``signal_gram[i]`` is B_i B_i^H with B_i the node's member-block channel,
    ``noise_gram[i]`` is W_i W_i^H with W_i = G_i U A. Row k of the result
    holds the four node rates at power ``per_stream_power[k]`` and relay gain
    ``beta2[k]``.
    """
    cdef cnp.ndarray[cplx, ndim=3, mode="c"] s = np.ascontiguousarray(signal_gram, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=3, mode="c"] w = np.ascontiguousarray(noise_gram, dtype=np.complex128)
    cdef double[::1] ps = np.ascontiguousarray(per_stream_power, dtype=np.float64)
    cdef double[::1] b2 = np.ascontiguousarray(beta2, dtype=np.float64)
    cdef Py_ssize_t nodes = s.shape[0], m = s.shape[1], npts = ps.shape[0]
    cdef cnp.ndarray[double, ndim=2, mode="c"] rates = np.empty((npts, nodes), dtype=np.float64)
    cdef cnp.ndarray[cplx, ndim=2, mode="c"] work = np.empty((m, m), dtype=np.complex128)
    cdef cplx[:, :, ::1] sv = s
    cdef cplx[:, :, ::1] wv = w
    cdef cplx[:, ::1] kv = work
    cdef double[:, ::1] rv = rates
    cdef Py_ssize_t k, node, i, j
    cdef double ld_total, ld_noise, g
    cdef int bad = 0
    with nogil:
        for k in range(npts):
            for node in range(nodes):
                # noise covariance sigma2 * (beta2 * W W^H + I)
                for i in range(m):
                    for j in range(i + 1):
                        kv[i, j] = sigma2 * b2[k] * wv[node, i, j]
                    kv[i, i] = kv[i, i] + sigma2
                if _chol_log2det(kv, m, &ld_noise):
                    bad = 1
                    break
                g = ps[k] * b2[k]
                for i in range(m):
                    for j in range(i + 1):
                        kv[i, j] = sigma2 * b2[k] * wv[node, i, j] + g * sv[node, i, j]
                    kv[i, i] = kv[i, i] + sigma2
                if _chol_log2det(kv, m, &ld_total):
                    bad = 1
                    break
                g = ld_total - ld_noise
                rv[k, node] = g if g > 0.0 else 0.0
            if bad:
                break
    if bad:
        raise NotPositiveDefinite("non-positive Cholesky pivot in rate kernel")
    return rates
