"""Serial-chain geometry, forward kinematics, twist Jacobian and numeric IK.

The chain is described joint by joint (fixed offset + rotation axis);
elastic behaviour is modelled by one rotational virtual spring per
actuated joint, collocated with it, so the pose function of actuated
angles q and spring deflections theta is simply FK(q + theta).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InvalidModelError, UnreachableTargetError


def _vec(x, length, name):
    v = np.asarray(x, dtype=float)
    if v.shape != (length,):
        raise InvalidModelError(f"{name} must be a {length}-vector, got shape {v.shape}")
    v = v.copy()
    v.flags.writeable = False
    return v


def axis_angle_rotation(axis, angle):
    """Rotation matrix about a unit axis (Rodrigues)."""
    x, y, z = np.asarray(axis, dtype=float)
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


def rotation_vector(R):
    """Axis-angle 3-vector of a rotation matrix (matrix logarithm).

    Stable for small angles and near pi.
    """
    R = np.asarray(R, dtype=float)
    cos_angle = np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0)
    angle = np.arccos(cos_angle)
    skew = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    if angle < 1e-8:
        # log(R) ~ (R - R^T)/2 to third order
        return 0.5 * skew
    if angle > np.pi - 1e-5:
        # near pi the skew part degenerates; recover the axis from R + I
        B = 0.5 * (R + np.eye(3))
        axis = np.sqrt(np.clip(np.diag(B), 0.0, None))
        # fix signs from the largest off-diagonal products
        k = int(np.argmax(axis))
        axis = B[:, k] / axis[k]
        axis /= np.linalg.norm(axis)
        if np.dot(axis, skew) < 0:
            axis = -axis
        return angle * axis
    return (0.5 * angle / np.sin(angle)) * skew


@dataclass(frozen=True)
class JointDescriptor:
    """One revolute joint: fixed offset from the previous frame, own axis.

    ``offset`` is expressed in the previous joint's frame (m); ``axis``
    must be a unit vector.
    """

    offset: np.ndarray
    axis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "offset", _vec(self.offset, 3, "joint offset"))
        axis = _vec(self.axis, 3, "joint axis")
        if abs(np.linalg.norm(axis) - 1.0) > 1e-12:
            raise InvalidModelError(f"joint axis must be unit length, got {axis}")
        object.__setattr__(self, "axis", axis)


@dataclass(frozen=True)
class RobotModel:
    """Serial chain plus per-joint compliances.

    ``joint_compliances`` are the rotational compliances k_i of the
    virtual joint springs, in rad/(N*m); all must be positive.
    """

    joints: tuple[JointDescriptor, ...]
    tool_offset: np.ndarray
    joint_compliances: np.ndarray

    # stacked geometry for the kernels, built once
    _offsets: np.ndarray = field(init=False, repr=False, compare=False)
    _axes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        joints = tuple(self.joints)
        if len(joints) < 1:
            raise InvalidModelError("model needs at least one joint")
        object.__setattr__(self, "joints", joints)
        object.__setattr__(self, "tool_offset", _vec(self.tool_offset, 3, "tool offset"))
        k = _vec(self.joint_compliances, len(joints), "joint compliances")
        if np.any(k <= 0):
            raise InvalidModelError("joint compliances must all be positive")
        object.__setattr__(self, "joint_compliances", k)
        offsets = np.ascontiguousarray([j.offset for j in joints], dtype=float)
        axes = np.ascontiguousarray([j.axis for j in joints], dtype=float)
        offsets.flags.writeable = False
        axes.flags.writeable = False
        object.__setattr__(self, "_offsets", offsets)
        object.__setattr__(self, "_axes", axes)

    @property
    def n_joints(self):
        return len(self.joints)


@dataclass(frozen=True)
class Configuration:
    """Actuated joint coordinates q and virtual spring deflections theta."""

    q: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float).copy()
        theta = np.asarray(self.theta, dtype=float).copy()
        if q.ndim != 1 or theta.shape != q.shape:
            raise InvalidModelError(
                f"q and theta must be 1-d of equal length, got {q.shape} and {theta.shape}"
            )
        q.flags.writeable = False
        theta.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_q(cls, q):
        q = np.asarray(q, dtype=float)
        return cls(q=q, theta=np.zeros_like(q))


@dataclass(frozen=True)
class Pose:
    """End-effector position (m) and orientation (rotation matrix)."""

    position: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", _vec(self.position, 3, "position"))
        R = np.asarray(self.orientation, dtype=float)
        if R.shape != (3, 3):
            raise InvalidModelError(f"orientation must be 3x3, got {R.shape}")
        if np.max(np.abs(R.T @ R - np.eye(3))) > 1e-10 or abs(np.linalg.det(R) - 1.0) > 1e-10:
            raise InvalidModelError("orientation is not a proper rotation matrix")
        R = R.copy()
        R.flags.writeable = False
        object.__setattr__(self, "orientation", R)


def _check_dims(model: RobotModel, cfg: Configuration):
    if cfg.q.shape[0] != model.n_joints:
        raise InvalidModelError(
            f"configuration has {cfg.q.shape[0]} joints, model has {model.n_joints}"
        )


def forward_kinematics(model: RobotModel, cfg: Configuration) -> Pose:
    """End-effector pose at q + theta (collocated virtual springs)."""
    _check_dims(model, cfg)
    p, R = _kernels.fk_pose(model._offsets, model._axes, model.tool_offset,
                            cfg.q + cfg.theta)
    return Pose(position=p, orientation=R)


def jacobian_theta(model: RobotModel, cfg: Configuration) -> np.ndarray:
    """6xn Jacobian of the pose w.r.t. the virtual joint coordinates.

    Rows 1-3 are translational (m/rad), rows 4-6 rotational.  Evaluated
    at q + theta; identical to the actuated-joint Jacobian because the
    springs are collocated.
    """
    _check_dims(model, cfg)
    _, _, J = _kernels.fk_jacobian(model._offsets, model._axes, model.tool_offset,
                                   cfg.q + cfg.theta)
    return J


def inverse_kinematics(model: RobotModel, target: Pose, seed: Configuration,
                       damping: float = 1e-3, max_iterations: int = 200,
                       position_tol: float = 1e-9,
                       orientation_tol: float = 1e-9) -> Configuration:
    """Damped least-squares IK from a seed configuration.

    theta in the seed is ignored (springs unloaded).  Raises
    UnreachableTargetError with the final residual when the iteration
    does not meet both tolerances.
    """
    _check_dims(model, seed)
    q = seed.q.copy()
    lam2 = damping * damping
    pos_err = orient_err = np.inf
    for _ in range(max_iterations):
        p, R, J = _kernels.fk_jacobian(model._offsets, model._axes,
                                       model.tool_offset, q)
        e = np.empty(6)
        e[:3] = target.position - p
        e[3:] = rotation_vector(target.orientation @ R.T)
        pos_err = np.linalg.norm(e[:3])
        orient_err = np.linalg.norm(e[3:])
        if pos_err < position_tol and orient_err < orientation_tol:
            # principal range: revolute joints are 2*pi-periodic
            q = np.arctan2(np.sin(q), np.cos(q))
            return Configuration(q=q, theta=np.zeros_like(q))
        A = J @ J.T + lam2 * np.eye(6)
        q = q + J.T @ np.linalg.solve(A, e)
    raise UnreachableTargetError(
        f"IK did not converge after {max_iterations} iterations "
        f"(position residual {pos_err:.3e} m, orientation {orient_err:.3e} rad)",
        position_residual=pos_err,
        orientation_residual=orient_err,
    )
