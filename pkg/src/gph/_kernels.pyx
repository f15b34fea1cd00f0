# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels (FFTW-backed Strang stepping and pointwise products).

Same call signatures and semantics as :mod:`gph._pykernels`.
"""
import numpy as np

from libc.math cimport cos, sin
from libc.string cimport memcpy

cdef extern from "fftw3.h":
    ctypedef double fftw_complex[2]
    ctypedef void* fftw_plan
    int FFTW_FORWARD
    int FFTW_BACKWARD
    unsigned FFTW_ESTIMATE
    fftw_plan fftw_plan_dft_1d(int n, fftw_complex* inp, fftw_complex* out, int sign, unsigned flags)
    void fftw_execute(const fftw_plan p) nogil
    void fftw_destroy_plan(fftw_plan p)
    void* fftw_malloc(size_t n)
    void fftw_free(void* p)

NAME = "compiled"


cdef inline void _cmul(double* buf, const double* m, Py_ssize_t n, double scale) noexcept nogil:
    cdef Py_ssize_t i
    cdef double a, b, c, d
    for i in range(n):
        a = buf[2 * i]
        b = buf[2 * i + 1]
        c = m[2 * i] * scale
        d = m[2 * i + 1] * scale
        buf[2 * i] = a * c - b * d
        buf[2 * i + 1] = a * d + b * c


cdef inline void _phase(double* buf, Py_ssize_t n, double coeff) noexcept nogil:
    cdef Py_ssize_t i
    cdef double a, b, th, c, s
    for i in range(n):
        a = buf[2 * i]
        b = buf[2 * i + 1]
        th = coeff * (a * a + b * b)
        c = cos(th)
        s = sin(th)
        buf[2 * i] = a * c - b * s
        buf[2 * i + 1] = a * s + b * c


def strang_steps(values, half_phase, double nl_coeff, Py_ssize_t nsteps):
    psi = np.array(values, dtype=np.complex128, copy=True)
    if nsteps <= 0:
        return psi
    half = np.ascontiguousarray(half_phase, dtype=np.complex128)
    full = half * half
    cdef Py_ssize_t n = psi.shape[0]
    if half.shape[0] != n:
        raise ValueError("half_phase length mismatch")
    cdef double[::1] p = psi.view(np.float64)
    cdef double[::1] h = half.view(np.float64)
    cdef double[::1] f = full.view(np.float64)
    cdef double inv_n = 1.0 / n
    cdef Py_ssize_t s
    cdef double* buf = <double*> fftw_malloc(2 * n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    # planning is not thread-safe; it runs with the GIL held
    cdef fftw_plan fwd = fftw_plan_dft_1d(<int>n, <fftw_complex*>buf, <fftw_complex*>buf, FFTW_FORWARD, FFTW_ESTIMATE)
    cdef fftw_plan bwd = fftw_plan_dft_1d(<int>n, <fftw_complex*>buf, <fftw_complex*>buf, FFTW_BACKWARD, FFTW_ESTIMATE)
    memcpy(buf, &p[0], 2 * n * sizeof(double))
    with nogil:
        fftw_execute(fwd)
        _cmul(buf, &h[0], n, inv_n)
        for s in range(nsteps):
            fftw_execute(bwd)
            _phase(buf, n, nl_coeff)
            fftw_execute(fwd)
            if s < nsteps - 1:
                _cmul(buf, &f[0], n, inv_n)
            else:
                _cmul(buf, &h[0], n, inv_n)
        fftw_execute(bwd)
    memcpy(&p[0], buf, 2 * n * sizeof(double))
    fftw_destroy_plan(fwd)
    fftw_destroy_plan(bwd)
    fftw_free(buf)
    return psi


def nonlinear_phase(values, double coeff):
    out = np.array(values, dtype=np.complex128, copy=True)
    cdef double[::1] o = out.view(np.float64)
    cdef Py_ssize_t n = out.shape[0]
    if n:
        with nogil:
            _phase(&o[0], n, coeff)
    return out


def collision_product(u, w, v):
    out = np.array(u, dtype=np.complex128, copy=True)
    wa = np.ascontiguousarray(w, dtype=np.complex128)
    va = np.ascontiguousarray(v, dtype=np.complex128)
    cdef double[::1] o = out.view(np.float64)
    cdef const double[::1] a = wa.view(np.float64)
    cdef const double[::1] b = va.view(np.float64)
    cdef Py_ssize_t i, n = out.shape[0]
    if wa.shape[0] != n or va.shape[0] != n:
        raise ValueError("length mismatch")
    cdef double ur, ui, wr, wi, vr, vi, tr, ti
    with nogil:
        for i in range(n):
            wr = a[2 * i]
            wi = a[2 * i + 1]
            vr = b[2 * i]
            vi = -b[2 * i + 1]
            tr = wr * vr - wi * vi
            ti = wr * vi + wi * vr
            ur = o[2 * i]
            ui = o[2 * i + 1]
            o[2 * i] = ur * tr - ui * ti
            o[2 * i + 1] = ur * ti + ui * tr
    return out
