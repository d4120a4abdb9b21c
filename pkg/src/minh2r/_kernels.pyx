# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled per-triangle kernels; same contracts as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

GL_NODES = np.array([0.5 - np.sqrt(15.0) / 10.0, 0.5, 0.5 + np.sqrt(15.0) / 10.0])
GL_WEIGHTS = np.array([5.0, 8.0, 5.0]) / 18.0


def tri_terms(double[:, :, ::1] G, double[::1] A, double[:, ::1] lam, double[::1] w, double[:, ::1] ut):
    cdef Py_ssize_t T = G.shape[0], t, i, j, q
    e_arr = np.empty(T)
    grad_arr = np.empty((T, 3))
    hess_arr = np.empty((T, 3, 3))
    cdef double[::1] e = e_arr
    cdef double[:, ::1] grad = grad_arr
    cdef double[:, :, ::1] hess = hess_arr
    cdef double gx, gy, g2, s, l, mu, nu, en
    cdef double Gg[3]
    for t in range(T):
        gx = G[t, 0, 0] * ut[t, 0] + G[t, 0, 1] * ut[t, 1] + G[t, 0, 2] * ut[t, 2]
        gy = G[t, 1, 0] * ut[t, 0] + G[t, 1, 1] * ut[t, 1] + G[t, 1, 2] * ut[t, 2]
        g2 = gx * gx + gy * gy
        en = 0.0
        mu = 0.0
        nu = 0.0
        for q in range(3):
            l = lam[t, q]
            s = sqrt(l * l + g2)
            en += w[q] * l * s
            mu += w[q] * l / s
            nu += w[q] * l / (s * s * s)
        en *= A[t]
        mu *= A[t]
        nu *= A[t]
        e[t] = en
        for i in range(3):
            Gg[i] = G[t, 0, i] * gx + G[t, 1, i] * gy
            grad[t, i] = mu * Gg[i]
        for i in range(3):
            for j in range(3):
                hess[t, i, j] = mu * (G[t, 0, i] * G[t, 0, j] + G[t, 1, i] * G[t, 1, j]) - nu * Gg[i] * Gg[j]
    return e_arr, grad_arr, hess_arr


def tri_weights(double[:, :, ::1] G, double[::1] A, double[:, ::1] lam, double[::1] w, double[:, ::1] ut):
    cdef Py_ssize_t T = G.shape[0], t, q
    out_arr = np.empty(T)
    cdef double[::1] out = out_arr
    cdef double gx, gy, g2, l, acc
    for t in range(T):
        gx = G[t, 0, 0] * ut[t, 0] + G[t, 0, 1] * ut[t, 1] + G[t, 0, 2] * ut[t, 2]
        gy = G[t, 1, 0] * ut[t, 0] + G[t, 1, 1] * ut[t, 1] + G[t, 1, 2] * ut[t, 2]
        g2 = gx * gx + gy * gy
        acc = 0.0
        for q in range(3):
            l = lam[t, q]
            acc += w[q] * l / sqrt(l * l + g2)
        out[t] = acc
    return out_arr


def tri_energy_delta(double[:, :, ::1] G, double[::1] A, double[:, ::1] lam, double[::1] w,
                     double[:, ::1] ut, double[:, ::1] dt, double step):
    cdef Py_ssize_t T = G.shape[0], t, q
    out_arr = np.empty(T)
    cdef double[::1] out = out_arr
    cdef double gx, gy, dgx, dgy, g2, x, l, s0, s1, acc, r
    for t in range(T):
        gx = G[t, 0, 0] * ut[t, 0] + G[t, 0, 1] * ut[t, 1] + G[t, 0, 2] * ut[t, 2]
        gy = G[t, 1, 0] * ut[t, 0] + G[t, 1, 1] * ut[t, 1] + G[t, 1, 2] * ut[t, 2]
        dgx = G[t, 0, 0] * dt[t, 0] + G[t, 0, 1] * dt[t, 1] + G[t, 0, 2] * dt[t, 2]
        dgy = G[t, 1, 0] * dt[t, 0] + G[t, 1, 1] * dt[t, 1] + G[t, 1, 2] * dt[t, 2]
        g2 = gx * gx + gy * gy
        x = step * (2.0 * (gx * dgx + gy * dgy) + step * (dgx * dgx + dgy * dgy))
        acc = 0.0
        for q in range(3):
            l = lam[t, q]
            s0 = sqrt(l * l + g2)
            r = l * l + g2 + x
            s1 = sqrt(r) if r > 0.0 else 0.0
            acc += w[q] * l * x / (s0 + s1)
        out[t] = A[t] * acc
    return out_arr


def edge_lengths(z0, z1, du):
    z0 = np.ascontiguousarray(z0, dtype=np.complex128)
    z1 = np.ascontiguousarray(z1, dtype=np.complex128)
    cdef double[::1] d = np.ascontiguousarray(du, dtype=np.float64)
    cdef double[::1] x0 = np.ascontiguousarray(z0.real)
    cdef double[::1] y0 = np.ascontiguousarray(z0.imag)
    cdef double[::1] x1 = np.ascontiguousarray(z1.real)
    cdef double[::1] y1 = np.ascontiguousarray(z1.imag)
    cdef Py_ssize_t n = x0.shape[0], k, q
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double nodes[3]
    cdef double weights[3]
    nodes[0] = 0.5 - sqrt(15.0) / 10.0
    nodes[1] = 0.5
    nodes[2] = 0.5 + sqrt(15.0) / 10.0
    weights[0] = 5.0 / 18.0
    weights[1] = 8.0 / 18.0
    weights[2] = 5.0 / 18.0
    cdef double dx, dy, adz, x, y, lam, acc
    for k in range(n):
        dx = x1[k] - x0[k]
        dy = y1[k] - y0[k]
        adz = sqrt(dx * dx + dy * dy)
        acc = 0.0
        for q in range(3):
            x = x0[k] + nodes[q] * dx
            y = y0[k] + nodes[q] * dy
            lam = 2.0 / (1.0 - (x * x + y * y))
            acc += weights[q] * sqrt(lam * lam * adz * adz + d[k] * d[k])
        out[k] = acc
    return out_arr
