"""Pure numpy implementation of the hot kernels.

Mirrors the compiled extension in ``_native.pyx``; the batched entry
point is vectorized over samples so the fallback stays usable for
identification-sized workloads.
"""

import numpy as np


def _rotation(axis, angle):
    """Rodrigues rotation about a unit axis."""
    x, y, z = axis
    c = np.cos(angle)
    s = np.sin(angle)
    t = 1.0 - c
    return np.array(
        [
            [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
            [x * y * t + z * s, c + y * y * t, y * z * t - x * s],
            [x * z * t - y * s, y * z * t + x * s, c + z * z * t],
        ]
    )


def _rotation_batch(axis, angles):
    """Rodrigues rotation about a fixed unit axis for a vector of angles."""
    x, y, z = axis
    c = np.cos(angles)
    s = np.sin(angles)
    t = 1.0 - c
    R = np.empty((angles.shape[0], 3, 3))
    R[:, 0, 0] = c + x * x * t
    R[:, 0, 1] = x * y * t - z * s
    R[:, 0, 2] = x * z * t + y * s
    R[:, 1, 0] = x * y * t + z * s
    R[:, 1, 1] = c + y * y * t
    R[:, 1, 2] = y * z * t - x * s
    R[:, 2, 0] = x * z * t - y * s
    R[:, 2, 1] = y * z * t + x * s
    R[:, 2, 2] = c + z * z * t
    return R


def fk_pose(offsets, axes, tool, angles):
    """End-effector position and orientation of the serial chain.

    ``offsets``/``axes`` are (n, 3); each joint applies its fixed offset
    (in the frame left by the previous joint) followed by a rotation
    about its own axis.
    """
    p = np.zeros(3)
    R = np.eye(3)
    for i in range(offsets.shape[0]):
        p = p + R @ offsets[i]
        R = R @ _rotation(axes[i], angles[i])
    return p + R @ tool, R


def fk_jacobian(offsets, axes, tool, angles):
    """Pose plus the 6xn twist Jacobian of the end-effector point.

    Column i is (w_i x (p_ee - p_i); w_i) with w_i the world-frame joint
    axis and p_i the joint origin.
    """
    n = offsets.shape[0]
    origins = np.empty((n, 3))
    world_axes = np.empty((n, 3))
    p = np.zeros(3)
    R = np.eye(3)
    for i in range(n):
        p = p + R @ offsets[i]
        origins[i] = p
        world_axes[i] = R @ axes[i]
        R = R @ _rotation(axes[i], angles[i])
    p_ee = p + R @ tool

    J = np.empty((6, n))
    J[:3] = np.cross(world_axes, p_ee - origins).T
    J[3:] = world_axes.T
    return p_ee, R, J


def stiffness_diagonal_batch(Q, base, comp_joints, comp_stiffness, comp_a,
                             comp_L, comp_s0, comp_alpha):
    """Joint stiffness diagonals for a batch of configurations (m, n).

    ``base`` holds the spring-free diagonal; each compensator adds its
    torque gradient Kc*a*L*eta(q) at its joint.
    """
    K = np.broadcast_to(base, Q.shape).copy()
    for c in range(len(comp_joints)):
        j = comp_joints[c]
        a = comp_a[c]
        L = comp_L[c]
        x = comp_alpha[c] + Q[:, j]
        cx = np.cos(x)
        sx = np.sin(x)
        s2 = a * a + L * L + 2.0 * a * L * cx
        s = np.sqrt(s2)
        eta = cx - (comp_s0[c] / s) * ((a * L / s2) * sx * sx + cx)
        K[:, j] += comp_stiffness[c] * a * L * eta
    return K


def deflection_batch(offsets, axes, tool, Q, W, base, comp_joints,
                     comp_stiffness, comp_a, comp_L, comp_s0, comp_alpha):
    """Linear end-effector deflections for a batch of (q, wrench) pairs.

    Returns (m, 6): J . diag(K)^-1 . J^T . F per sample, with K the
    compensator-augmented joint stiffness diagonal at that sample's q.
    """
    m, n = Q.shape
    origins = np.empty((m, n, 3))
    world_axes = np.empty((m, n, 3))
    p = np.zeros((m, 3))
    R = np.broadcast_to(np.eye(3), (m, 3, 3)).copy()
    for i in range(n):
        p = p + R @ offsets[i]
        origins[:, i] = p
        world_axes[:, i] = R @ axes[i]
        R = R @ _rotation_batch(axes[i], Q[:, i])
    p_ee = p + R @ tool

    J = np.empty((m, 6, n))
    J[:, :3, :] = np.cross(world_axes, p_ee[:, None, :] - origins).transpose(0, 2, 1)
    J[:, 3:, :] = world_axes.transpose(0, 2, 1)

    K = stiffness_diagonal_batch(Q, base, comp_joints, comp_stiffness,
                                 comp_a, comp_L, comp_s0, comp_alpha)
    torques = np.einsum("min,mi->mn", J, W)
    return np.einsum("min,mn->mi", J, torques / K)
