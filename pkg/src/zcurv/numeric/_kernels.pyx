# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 kernels. Mirrors ``_fallback.py`` operation for operation."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, isfinite, fabs

cnp.import_array()


cdef struct Prog:
    int n_terms
    const double* coef
    const int* mono_ptr
    const int* mono_slot
    const int* mono_pow
    const int* exp_ptr
    const int* exp_slot
    const double* exp_q


cdef class _Holder:
    """Keeps the program arrays alive while the kernel reads raw pointers."""
    cdef object arrays
    cdef Prog prog

    def __init__(self, p):
        cdef const double[::1] coef = np.ascontiguousarray(p.coef, dtype=np.float64)
        cdef const int[::1] mptr = np.ascontiguousarray(p.mono_ptr, dtype=np.int32)
        cdef const int[::1] mslot = np.ascontiguousarray(p.mono_slot, dtype=np.int32)
        cdef const int[::1] mpow = np.ascontiguousarray(p.mono_pow, dtype=np.int32)
        cdef const int[::1] eptr = np.ascontiguousarray(p.exp_ptr, dtype=np.int32)
        cdef const int[::1] eslot = np.ascontiguousarray(p.exp_slot, dtype=np.int32)
        cdef const double[::1] eq = np.ascontiguousarray(p.exp_q, dtype=np.float64)
        self.arrays = (coef, mptr, mslot, mpow, eptr, eslot, eq)
        self.prog.n_terms = coef.shape[0]
        self.prog.coef = &coef[0] if coef.shape[0] else NULL
        self.prog.mono_ptr = &mptr[0]
        self.prog.mono_slot = &mslot[0] if mslot.shape[0] else NULL
        self.prog.mono_pow = &mpow[0] if mpow.shape[0] else NULL
        self.prog.exp_ptr = &eptr[0]
        self.prog.exp_slot = &eslot[0] if eslot.shape[0] else NULL
        self.prog.exp_q = &eq[0] if eq.shape[0] else NULL


cdef inline double _eval(const Prog* p, const double[:, :, ::1] F, Py_ssize_t i, Py_ssize_t j,
                         double w) noexcept nogil:
    cdef double total = 0.0, v, x, y, arg
    cdef int t, m, k, s, pw, r
    for t in range(p.n_terms):
        v = p.coef[t]
        for m in range(p.mono_ptr[t], p.mono_ptr[t + 1]):
            s = p.mono_slot[m]
            x = w if s == 0 else F[s - 1, i, j]
            pw = p.mono_pow[m]
            y = x
            for r in range((pw if pw > 0 else -pw) - 1):
                y = y * x
            if pw > 0:
                v = v * y
            else:
                v = v / y
        if p.exp_ptr[t] < p.exp_ptr[t + 1]:
            arg = 0.0
            for k in range(p.exp_ptr[t], p.exp_ptr[t + 1]):
                s = p.exp_slot[k]
                x = w if s == 0 else F[s - 1, i, j]
                arg = arg + p.exp_q[k] * x
            v = v * exp(arg)
        total = total + v
    return total


cdef int _sweep(const Prog* p, const double[:, :, ::1] F, int axis, Py_ssize_t fixed,
                Py_ssize_t start, Py_ssize_t n, double h, double w0,
                double[::1] out) noexcept nogil:
    cdef double hh = 0.5 * h, h6 = h / 6.0, w = w0, k1, k2, k3, k4
    cdef Py_ssize_t step, a
    out[0] = w
    if not isfinite(w):
        return 0
    for step in range(n):
        a = start + 2 * step
        if axis == 0:
            k1 = _eval(p, F, a, fixed, w)
            k2 = _eval(p, F, a + 1, fixed, w + hh * k1)
            k3 = _eval(p, F, a + 1, fixed, w + hh * k2)
            k4 = _eval(p, F, a + 2, fixed, w + h * k3)
        else:
            k1 = _eval(p, F, fixed, a, w)
            k2 = _eval(p, F, fixed, a + 1, w + hh * k1)
            k3 = _eval(p, F, fixed, a + 1, w + hh * k2)
            k4 = _eval(p, F, fixed, a + 2, w + h * k3)
        w = w + h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[step + 1] = w
        if not isfinite(w):
            return <int>(step + 1)
    return -1


def sweep(prog, F, int axis, Py_ssize_t fixed, Py_ssize_t start, Py_ssize_t n, double h,
          double w0, double[::1] out):
    """RK4 for ``n`` steps along ``axis`` at half-grid line ``fixed``; see the fallback."""
    cdef _Holder holder = prog if isinstance(prog, _Holder) else _Holder(prog)
    cdef const double[:, :, ::1] Fv = F
    cdef int bad
    with nogil:
        bad = _sweep(&holder.prog, Fv, axis, fixed, start, n, h, w0, out)
    return bad


def prepare(prog):
    return _Holder(prog)


def linear_transport(M, X0, double h):
    """RK4 for ``X' = M(s) X``; see the fallback."""
    cdef const double[:, :, ::1] Ms = np.ascontiguousarray(M, dtype=np.float64)
    X_arr = np.array(X0, dtype=np.float64, order="C")
    cdef double[:, ::1] X = X_arr
    cdef Py_ssize_t n = X.shape[0], steps = (Ms.shape[0] - 1) // 2
    cdef double[:, ::1] k1 = np.zeros((n, n)), k2 = np.zeros((n, n))
    cdef double[:, ::1] k3 = np.zeros((n, n)), k4 = np.zeros((n, n)), tmp = np.zeros((n, n))
    cdef double hh = 0.5 * h, h6 = h / 6.0
    cdef Py_ssize_t step, a, r, c
    cdef int bad = -1, flag
    with nogil:
        for step in range(steps):
            a = 2 * step
            _matmul(Ms, a, X, n, k1)
            for r in range(n):
                for c in range(n):
                    tmp[r, c] = X[r, c] + hh * k1[r, c]
            _matmul(Ms, a + 1, tmp, n, k2)
            for r in range(n):
                for c in range(n):
                    tmp[r, c] = X[r, c] + hh * k2[r, c]
            _matmul(Ms, a + 1, tmp, n, k3)
            for r in range(n):
                for c in range(n):
                    tmp[r, c] = X[r, c] + h * k3[r, c]
            _matmul(Ms, a + 2, tmp, n, k4)
            flag = 0
            for r in range(n):
                for c in range(n):
                    X[r, c] = X[r, c] + h6 * (k1[r, c] + 2.0 * k2[r, c] + 2.0 * k3[r, c] + k4[r, c])
                    if not isfinite(X[r, c]):
                        flag = 1
            if flag:
                bad = <int>(step + 1)
                break
    return X_arr, bad


cdef inline void _matmul(const double[:, :, ::1] Ms, Py_ssize_t a, double[:, ::1] X, Py_ssize_t n,
                         double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t r, c, k
    cdef double acc
    for r in range(n):
        for c in range(n):
            acc = 0.0
            for k in range(n):
                acc = acc + Ms[a, r, k] * X[k, c]
            out[r, c] = acc


def prepare_fields(F):
    return np.ascontiguousarray(F, dtype=np.float64)
