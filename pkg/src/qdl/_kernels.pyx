# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: adaptive Dormand-Prince for linear systems and the
product-trapezoid Volterra march.  ``_fallback.py`` mirrors both in numpy."""

import numpy as np
from libc.math cimport exp, fabs, pow, sqrt

NAME = "cython"

# Dormand-Prince 5(4) tableau
cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200
cdef double E6 = 22.0 / 525, E7 = -1.0 / 40


cdef inline double cabs2(double complex z) nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef void _rhs(double t, const double complex[:, :, ::1] mats, const double[:, ::1] coef,
               const double complex[::1] y, double complex[::1] out) noexcept nogil:
    cdef Py_ssize_t K = mats.shape[0], n = mats.shape[1]
    cdef Py_ssize_t k, i, j
    cdef double phi
    cdef double complex acc
    for i in range(n):
        out[i] = 0
    for k in range(K):
        phi = coef[k, 0] + coef[k, 1] * t
        if coef[k, 2] != 0.0:
            phi = phi + coef[k, 2] * exp(-coef[k, 3] * t)
        if phi == 0.0:
            continue
        for i in range(n):
            acc = 0
            for j in range(n):
                acc = acc + mats[k, i, j] * y[j]
            out[i] = out[i] + phi * acc


def integrate_linear(const double complex[:, :, ::1] mats, const double[:, ::1] coef,
                     const double complex[::1] y0, const double[::1] t_out,
                     double rtol, double atol, double h_init, long max_steps):
    """Integrate y' = sum_k phi_k(t) M_k y, phi_k = a + b t + d exp(-r t).

    Returns ``(Y, n_steps, error_sum, status)``; status 0 ok, 1 step-size
    underflow, 2 step budget exhausted.
    """
    cdef Py_ssize_t n = y0.shape[0], m = t_out.shape[0]
    Y_arr = np.zeros((m, n), dtype=np.complex128)
    cdef double complex[:, ::1] Y = Y_arr
    stages = np.zeros((8, n), dtype=np.complex128)
    cdef double complex[:, ::1] k = stages
    cdef double complex[::1] k1 = k[0], k2 = k[1], k3 = k[2], k4 = k[3], k5 = k[4], k6 = k[5], k7 = k[6], ytmp = k[7]
    y_arr = np.array(y0, dtype=np.complex128)
    ynew_arr = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] y = y_arr, ynew = ynew_arr
    cdef Py_ssize_t i, jout
    cdef double t = t_out[0], h = h_init, h_used, h_saved, target, err, errabs, sc, e, fac, ay, an
    cdef double error_sum = 0.0
    cdef long steps = 0
    cdef int status = 0
    cdef bint clipped, rejected
    cdef double complex ev

    with nogil:
        for i in range(n):
            Y[0, i] = y[i]
        _rhs(t, mats, coef, y, k1)
        for jout in range(1, m):
            target = t_out[jout]
            rejected = False
            while t < target:
                if steps >= max_steps:
                    status = 2
                    break
                clipped = h >= target - t
                h_saved = h
                h_used = target - t if clipped else h
                if h_used < 1e-14 * (1.0 + fabs(t)):
                    status = 1
                    break
                for i in range(n):
                    ytmp[i] = y[i] + h_used * A21 * k1[i]
                _rhs(t + C2 * h_used, mats, coef, ytmp, k2)
                for i in range(n):
                    ytmp[i] = y[i] + h_used * (A31 * k1[i] + A32 * k2[i])
                _rhs(t + C3 * h_used, mats, coef, ytmp, k3)
                for i in range(n):
                    ytmp[i] = y[i] + h_used * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
                _rhs(t + C4 * h_used, mats, coef, ytmp, k4)
                for i in range(n):
                    ytmp[i] = y[i] + h_used * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
                _rhs(t + C5 * h_used, mats, coef, ytmp, k5)
                for i in range(n):
                    ytmp[i] = y[i] + h_used * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
                _rhs(t + h_used, mats, coef, ytmp, k6)
                for i in range(n):
                    ynew[i] = y[i] + h_used * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
                _rhs(t + h_used, mats, coef, ynew, k7)
                err = 0.0
                errabs = 0.0
                for i in range(n):
                    ev = h_used * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
                    e = cabs2(ev)
                    ay = cabs2(y[i])
                    an = cabs2(ynew[i])
                    sc = atol + rtol * (ay if ay > an else an)
                    if e / sc > err:
                        err = e / sc
                    if e > errabs:
                        errabs = e
                if err <= 1.0:
                    steps += 1
                    error_sum += errabs
                    t = target if clipped else t + h_used
                    for i in range(n):
                        y[i] = ynew[i]
                        k1[i] = k7[i]
                    fac = 5.0 if err == 0.0 else 0.9 * pow(err, -0.2)
                    if fac > 5.0:
                        fac = 5.0
                    if rejected and fac > 1.0:
                        fac = 1.0
                    h = h_used * fac
                    if clipped and h < h_saved:
                        h = h_saved if fac >= 1.0 else h
                    rejected = False
                else:
                    fac = 0.9 * pow(err, -0.2)
                    if fac < 0.2:
                        fac = 0.2
                    h = h_used * fac
                    rejected = True
            if status != 0:
                break
            for i in range(n):
                Y[jout, i] = y[i]
    return Y_arr, steps, error_sum, status


def volterra_march(const double complex[:, ::1] local, const double complex[:, ::1] implicit_inv,
                   const double complex[:, ::1] effective, const double complex[:, :, ::1] kernels,
                   const double[:, ::1] omega, const double[:, ::1] alpha_end,
                   const double complex[::1] source, const double complex[::1] rho0,
                   double h, Py_ssize_t nsteps):
    """March rho' = local rho + source + sum_j kernels_j (f_j * rho) by the
    implicit trapezoid rule with product-trapezoid memory weights.

    ``omega[j, m]`` is the weight of the history point at lag ``m``
    (``omega[j, 0]`` multiplies the unknown), ``alpha_end[j, p]`` that of
    rho(0) at step ``p``; ``effective = local + sum_j omega[j, 0] kernels_j``
    and ``implicit_inv = inv(I - h/2 effective)``.
    """
    cdef Py_ssize_t n = rho0.shape[0], K = kernels.shape[0]
    rho_arr = np.zeros((nsteps + 1, n), dtype=np.complex128)
    cdef double complex[:, ::1] rho = rho_arr
    hist_arr = np.zeros((K, n), dtype=np.complex128)
    cdef double complex[:, ::1] hist = hist_arr
    tmp = np.zeros((3, n), dtype=np.complex128)
    cdef double complex[::1] F = tmp[0], g = tmp[1], rhs = tmp[2]
    # real views: the memory weights are real, so the history sum is an axpy
    cdef double[:, ::1] rr = rho_arr.view(np.float64)
    cdef double[:, ::1] hr = hist_arr.view(np.float64)
    cdef Py_ssize_t nr = 2 * n
    cdef Py_ssize_t p, q, j, i, l
    cdef double w, a0
    cdef double complex acc

    with nogil:
        for i in range(n):
            rho[0, i] = rho0[i]
        for i in range(n):
            acc = source[i]
            for l in range(n):
                acc = acc + local[i, l] * rho0[l]
            F[i] = acc
        for p in range(1, nsteps + 1):
            for j in range(K):
                a0 = alpha_end[j, p]
                for i in range(nr):
                    hr[j, i] = a0 * rr[0, i]
            for q in range(1, p):
                for j in range(K):
                    w = omega[j, p - q]
                    for i in range(nr):
                        hr[j, i] += w * rr[q, i]
            for i in range(n):
                acc = source[i]
                for j in range(K):
                    for l in range(n):
                        acc = acc + kernels[j, i, l] * hist[j, l]
                g[i] = acc
            for i in range(n):
                rhs[i] = rho[p - 1, i] + 0.5 * h * (F[i] + g[i])
            for i in range(n):
                acc = 0
                for l in range(n):
                    acc = acc + implicit_inv[i, l] * rhs[l]
                rho[p, i] = acc
            for i in range(n):
                acc = g[i]
                for l in range(n):
                    acc = acc + effective[i, l] * rho[p, l]
                F[i] = acc
    return rho_arr
