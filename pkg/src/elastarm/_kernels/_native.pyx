# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot kernels.

Same contract as ``_pure.py``; see that module for the reference
semantics.  The batched deflection routine is the identification and
workspace-sweep inner loop.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()


cdef inline void _rotation(const double* u, double angle, double* R) noexcept nogil:
    cdef double c = cos(angle)
    cdef double s = sin(angle)
    cdef double t = 1.0 - c
    cdef double x = u[0]
    cdef double y = u[1]
    cdef double z = u[2]
    R[0] = c + x * x * t
    R[1] = x * y * t - z * s
    R[2] = x * z * t + y * s
    R[3] = x * y * t + z * s
    R[4] = c + y * y * t
    R[5] = y * z * t - x * s
    R[6] = x * z * t - y * s
    R[7] = y * z * t + x * s
    R[8] = c + z * z * t


cdef inline void _matmul3(const double* A, const double* B, double* C) noexcept nogil:
    cdef int i, j
    for i in range(3):
        for j in range(3):
            C[3 * i + j] = (A[3 * i] * B[j] + A[3 * i + 1] * B[3 + j]
                            + A[3 * i + 2] * B[6 + j])


cdef inline void _matvec3(const double* A, const double* v, double* out) noexcept nogil:
    cdef int i
    for i in range(3):
        out[i] = A[3 * i] * v[0] + A[3 * i + 1] * v[1] + A[3 * i + 2] * v[2]


cdef void _chain(const double[:, ::1] offsets, const double[:, ::1] axes,
                 const double[::1] tool, const double* angles, Py_ssize_t n,
                 double* origins, double* world_axes, double* p_ee,
                 double* R) noexcept nogil:
    """Walk the chain; fills joint origins, world axes, tip and rotation."""
    cdef double p[3]
    cdef double Rj[9]
    cdef double tmp[9]
    cdef double step[3]
    cdef Py_ssize_t i, k
    p[0] = p[1] = p[2] = 0.0
    for k in range(9):
        R[k] = 0.0
    R[0] = R[4] = R[8] = 1.0
    for i in range(n):
        _matvec3(R, &offsets[i, 0], step)
        for k in range(3):
            p[k] += step[k]
            origins[3 * i + k] = p[k]
        _matvec3(R, &axes[i, 0], &world_axes[3 * i])
        _rotation(&axes[i, 0], angles[i], Rj)
        _matmul3(R, Rj, tmp)
        for k in range(9):
            R[k] = tmp[k]
    _matvec3(R, &tool[0], step)
    for k in range(3):
        p_ee[k] = p[k] + step[k]


cdef void _fill_jacobian(const double* origins, const double* world_axes,
                         const double* p_ee, Py_ssize_t n,
                         double* J) noexcept nogil:
    """J is 6 x n row-major; column i is (w_i x (p_ee - p_i); w_i)."""
    cdef Py_ssize_t i
    cdef double rx, ry, rz, wx, wy, wz
    for i in range(n):
        rx = p_ee[0] - origins[3 * i]
        ry = p_ee[1] - origins[3 * i + 1]
        rz = p_ee[2] - origins[3 * i + 2]
        wx = world_axes[3 * i]
        wy = world_axes[3 * i + 1]
        wz = world_axes[3 * i + 2]
        J[0 * n + i] = wy * rz - wz * ry
        J[1 * n + i] = wz * rx - wx * rz
        J[2 * n + i] = wx * ry - wy * rx
        J[3 * n + i] = wx
        J[4 * n + i] = wy
        J[5 * n + i] = wz


def fk_pose(const double[:, ::1] offsets, const double[:, ::1] axes,
            const double[::1] tool, const double[::1] angles):
    cdef Py_ssize_t n = offsets.shape[0]
    cdef cnp.ndarray scratch = np.empty(6 * n, dtype=np.float64)
    cdef double[::1] sc = scratch
    p = np.empty(3, dtype=np.float64)
    R = np.empty((3, 3), dtype=np.float64)
    cdef double[::1] pv = p
    cdef double[:, ::1] Rv = R
    _chain(offsets, axes, tool, &angles[0], n, &sc[0], &sc[3 * n],
           &pv[0], &Rv[0, 0])
    return p, R


def fk_jacobian(const double[:, ::1] offsets, const double[:, ::1] axes,
                const double[::1] tool, const double[::1] angles):
    cdef Py_ssize_t n = offsets.shape[0]
    cdef cnp.ndarray scratch = np.empty(6 * n, dtype=np.float64)
    cdef double[::1] sc = scratch
    p = np.empty(3, dtype=np.float64)
    R = np.empty((3, 3), dtype=np.float64)
    J = np.empty((6, n), dtype=np.float64)
    cdef double[::1] pv = p
    cdef double[:, ::1] Rv = R
    cdef double[:, ::1] Jv = J
    _chain(offsets, axes, tool, &angles[0], n, &sc[0], &sc[3 * n],
           &pv[0], &Rv[0, 0])
    _fill_jacobian(&sc[0], &sc[3 * n], &pv[0], n, &Jv[0, 0])
    return p, R, J


cdef inline double _gc_term(double q, double stiffness, double a, double L,
                            double s0, double alpha) noexcept nogil:
    cdef double x = alpha + q
    cdef double cx = cos(x)
    cdef double sx = sin(x)
    cdef double s2 = a * a + L * L + 2.0 * a * L * cx
    cdef double s = sqrt(s2)
    cdef double eta = cx - (s0 / s) * ((a * L / s2) * sx * sx + cx)
    return stiffness * a * L * eta


def stiffness_diagonal_batch(const double[:, ::1] Q, const double[::1] base,
                             const cnp.int64_t[::1] comp_joints,
                             const double[::1] comp_stiffness,
                             const double[::1] comp_a, const double[::1] comp_L,
                             const double[::1] comp_s0,
                             const double[::1] comp_alpha):
    cdef Py_ssize_t m = Q.shape[0]
    cdef Py_ssize_t n = Q.shape[1]
    cdef Py_ssize_t nc = comp_joints.shape[0]
    K = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] Kv = K
    cdef Py_ssize_t i, j, c
    with nogil:
        for i in range(m):
            for j in range(n):
                Kv[i, j] = base[j]
            for c in range(nc):
                j = comp_joints[c]
                Kv[i, j] += _gc_term(Q[i, j], comp_stiffness[c], comp_a[c],
                                     comp_L[c], comp_s0[c], comp_alpha[c])
    return K


def deflection_batch(const double[:, ::1] offsets, const double[:, ::1] axes,
                     const double[::1] tool, const double[:, ::1] Q,
                     const double[:, ::1] W, const double[::1] base,
                     const cnp.int64_t[::1] comp_joints,
                     const double[::1] comp_stiffness, const double[::1] comp_a,
                     const double[::1] comp_L, const double[::1] comp_s0,
                     const double[::1] comp_alpha):
    cdef Py_ssize_t m = Q.shape[0]
    cdef Py_ssize_t n = Q.shape[1]
    cdef Py_ssize_t nc = comp_joints.shape[0]
    out = np.empty((m, 6), dtype=np.float64)
    cdef double[:, ::1] outv = out
    # per-sample scratch: origins, world axes, K diag, torques, J
    cdef cnp.ndarray scratch = np.empty(6 * n + 2 * n + 6 * n, dtype=np.float64)
    cdef double[::1] sc = scratch
    cdef double p_ee[3]
    cdef double R[9]
    cdef double* origins
    cdef double* world_axes
    cdef double* K
    cdef double* tau
    cdef double* J
    cdef Py_ssize_t i, j, c, r
    cdef double acc
    with nogil:
        origins = &sc[0]
        world_axes = &sc[3 * n]
        K = &sc[6 * n]
        tau = &sc[7 * n]
        J = &sc[8 * n]
        for i in range(m):
            _chain(offsets, axes, tool, &Q[i, 0], n, origins, world_axes,
                   p_ee, R)
            _fill_jacobian(origins, world_axes, p_ee, n, J)
            for j in range(n):
                K[j] = base[j]
            for c in range(nc):
                j = comp_joints[c]
                K[j] += _gc_term(Q[i, j], comp_stiffness[c], comp_a[c],
                                 comp_L[c], comp_s0[c], comp_alpha[c])
            for j in range(n):
                acc = 0.0
                for r in range(6):
                    acc += J[r * n + j] * W[i, r]
                tau[j] = acc / K[j]
            for r in range(6):
                acc = 0.0
                for j in range(n):
                    acc += J[r * n + j] * tau[j]
                outv[i, r] = acc
    return out
