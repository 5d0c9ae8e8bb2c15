# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled integrator kernels.

Loop structure and accumulation order match the NumPy fallback so both
backends produce near-identical float64 trajectories.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sin

cnp.import_array()


cdef void _kuramoto_deriv_one(double[:] theta, double[:] omega, double[:, :] w,
                              double[:] coef, double[:] out, Py_ssize_t k) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(k):
        out[i] = omega[i]
        if coef[i] == 0.0:
            continue
        acc = 0.0
        for j in range(k):
            if w[i, j] != 0.0:
                acc += w[i, j] * sin(theta[j] - theta[i])
        out[i] += coef[i] * acc


def kuramoto_rk4(theta0, omega, weights, coef, double dt, Py_ssize_t n_record):
    """Fixed-step RK4 phase integration; records the state at t = j*dt."""
    cdef double[:, :] th0 = np.ascontiguousarray(theta0, dtype=np.float64)
    cdef double[:, :] om = np.ascontiguousarray(omega, dtype=np.float64)
    cdef double[:, :] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[:] cf = np.ascontiguousarray(coef, dtype=np.float64)
    cdef Py_ssize_t n = th0.shape[0]
    cdef Py_ssize_t k = th0.shape[1]
    out_arr = np.empty((n, n_record, k), dtype=np.float64)
    cdef double[:, :, :] out = out_arr
    scratch_arr = np.empty((6, k), dtype=np.float64)
    cdef double[:, :] scratch = scratch_arr
    cdef double[:] theta, k1, k2, k3, k4, tmp
    cdef Py_ssize_t s, step, i
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0

    theta = scratch[0]
    k1 = scratch[1]
    k2 = scratch[2]
    k3 = scratch[3]
    k4 = scratch[4]
    tmp = scratch[5]

    with nogil:
        for s in range(n):
            for i in range(k):
                theta[i] = th0[s, i]
                out[s, 0, i] = theta[i]
            for step in range(1, n_record):
                _kuramoto_deriv_one(theta, om[s], w, cf, k1, k)
                for i in range(k):
                    tmp[i] = theta[i] + half * k1[i]
                _kuramoto_deriv_one(tmp, om[s], w, cf, k2, k)
                for i in range(k):
                    tmp[i] = theta[i] + half * k2[i]
                _kuramoto_deriv_one(tmp, om[s], w, cf, k3, k)
                for i in range(k):
                    tmp[i] = theta[i] + dt * k3[i]
                _kuramoto_deriv_one(tmp, om[s], w, cf, k4, k)
                for i in range(k):
                    theta[i] = theta[i] + sixth * (((k1[i] + 2.0 * k2[i]) + 2.0 * k3[i]) + k4[i])
                    out[s, step, i] = theta[i]
    return out_arr


cdef void _spring_accel_one(double[:, :] pos, double[:, :] w, double k_spring,
                            double[:, :] acc, Py_ssize_t p) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double c
    for i in range(p):
        acc[i, 0] = 0.0
        acc[i, 1] = 0.0
        for j in range(p):
            if w[i, j] != 0.0:
                c = -k_spring * w[i, j]
                acc[i, 0] += c * (pos[i, 0] - pos[j, 0])
                acc[i, 1] += c * (pos[i, 1] - pos[j, 1])


def spring_leapfrog(pos0, vel0, weights, double k_spring, double dt,
                    Py_ssize_t n_record, Py_ssize_t record_every):
    """Velocity-Verlet integration; records positions every ``record_every`` substeps."""
    cdef double[:, :, :] p0 = np.ascontiguousarray(pos0, dtype=np.float64)
    cdef double[:, :, :] v0 = np.ascontiguousarray(vel0, dtype=np.float64)
    cdef double[:, :] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = p0.shape[0]
    cdef Py_ssize_t p = p0.shape[1]
    out_arr = np.empty((n, n_record, p, 2), dtype=np.float64)
    cdef double[:, :, :, :] out = out_arr
    state_arr = np.empty((3, p, 2), dtype=np.float64)
    cdef double[:, :, :] state = state_arr
    cdef double[:, :] pos, vel, acc
    cdef Py_ssize_t s, rec, sub, i, d
    cdef double half = 0.5 * dt

    pos = state[0]
    vel = state[1]
    acc = state[2]

    with nogil:
        for s in range(n):
            for i in range(p):
                for d in range(2):
                    pos[i, d] = p0[s, i, d]
                    vel[i, d] = v0[s, i, d]
                    out[s, 0, i, d] = pos[i, d]
            _spring_accel_one(pos, w, k_spring, acc, p)
            for rec in range(1, n_record):
                for sub in range(record_every):
                    for i in range(p):
                        for d in range(2):
                            vel[i, d] = vel[i, d] + half * acc[i, d]
                            pos[i, d] = pos[i, d] + dt * vel[i, d]
                    _spring_accel_one(pos, w, k_spring, acc, p)
                    for i in range(p):
                        for d in range(2):
                            vel[i, d] = vel[i, d] + half * acc[i, d]
                for i in range(p):
                    for d in range(2):
                        out[s, rec, i, d] = pos[i, d]
    return out_arr


def var_recursion(y_init, a, Py_ssize_t order, Py_ssize_t n_steps):
    """Shared-coefficient vector autoregression: y_t = sum_p A y_{t-p}."""
    cdef double[:, :, :] y0 = np.ascontiguousarray(y_init, dtype=np.float64)
    cdef double[:, :] am = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t n = y0.shape[0]
    cdef Py_ssize_t k = y0.shape[2]
    hist_arr = np.zeros((n, n_steps, k), dtype=np.float64)
    cdef double[:, :, :] hist = hist_arr
    cdef Py_ssize_t s, t, p, i, j
    cdef double row, total

    with nogil:
        for s in range(n):
            for t in range(order):
                for i in range(k):
                    hist[s, t, i] = y0[s, t, i]
            for t in range(order, n_steps):
                for i in range(k):
                    total = 0.0
                    for p in range(1, order + 1):
                        row = 0.0
                        for j in range(k):
                            if am[i, j] != 0.0:
                                row += am[i, j] * hist[s, t - p, j]
                        total += row
                    hist[s, t, i] = total
    return np.ascontiguousarray(hist_arr.transpose(0, 2, 1))
