"""Joint-space and Cartesian stiffness, and deflections under load.

The joint stiffness matrix is diagonal: reciprocals of the model's
joint compliances, plus the configuration-dependent contribution of any
gravity compensators on their joints.  Cartesian stiffness follows from
the twist Jacobian; deflections are first order, evaluated at theta = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .compensator import CompensatorParams, joint_stiffness_contribution
from .errors import (InvalidConfigurationError, SingularConfigurationError,
                     UnderActuatedError)
from .kinematics import Configuration, RobotModel, jacobian_theta

# Jacobian condition number above which stiffness results are refused
CONDITION_LIMIT = 1e8


@dataclass(frozen=True)
class JointStiffnessMatrix:
    """Diagonal joint stiffness (N*m/rad per joint)."""

    diag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float).copy()
        if d.ndim != 1:
            raise InvalidConfigurationError("joint stiffness diagonal must be 1-d")
        d.flags.writeable = False
        object.__setattr__(self, "diag", d)

    @property
    def all_positive(self) -> bool:
        return bool(np.all(self.diag > 0))


@dataclass(frozen=True)
class Wrench:
    """External loading at the end-effector: force (N) and moment (N*m)."""

    force: np.ndarray
    moment: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.force, dtype=float).copy()
        m = np.asarray(self.moment, dtype=float).copy()
        if f.shape != (3,) or m.shape != (3,):
            raise InvalidConfigurationError("force and moment must be 3-vectors")
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(m))):
            raise InvalidConfigurationError("wrench components must be finite")
        f.flags.writeable = False
        m.flags.writeable = False
        object.__setattr__(self, "force", f)
        object.__setattr__(self, "moment", m)

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(force=v[:3], moment=v[3:6])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.force, self.moment])

    def rotated(self, R) -> "Wrench":
        """Wrench with both components rotated by R (frame change)."""
        R = np.asarray(R, dtype=float)
        return Wrench(force=R @ self.force, moment=R @ self.moment)


@dataclass(frozen=True)
class CartesianStiffness:
    """6x6 Cartesian stiffness with solve diagnostics.

    ``positive_definite`` is False when a compensator drove a joint
    stiffness non-positive; the matrix itself is still returned.
    ``asymmetry`` is the relative asymmetry before symmetrization.
    """

    matrix: np.ndarray
    positive_definite: bool
    jacobian_condition: float
    asymmetry: float


@dataclass(frozen=True)
class Deflection:
    """Small end-effector displacement: translation (m), rotation (rad)."""

    translation: np.ndarray
    rotation: np.ndarray

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.translation))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.translation, self.rotation])


def joint_stiffness(model: RobotModel, comps, q) -> JointStiffnessMatrix:
    """Diagonal joint stiffness at q: 1/k_i plus compensator terms.

    Only joints carrying a compensator differ from the spring-free
    diagonal.  At most one compensator per joint.
    """
    q = np.asarray(q, dtype=float)
    n = model.n_joints
    if q.shape != (n,):
        raise InvalidConfigurationError(f"q must have length {n}, got {q.shape}")
    seen = set()
    diag = 1.0 / model.joint_compliances
    for comp in comps:
        if not 1 <= comp.joint_index <= n:
            raise InvalidConfigurationError(
                f"compensator joint index {comp.joint_index} outside 1..{n}")
        if comp.joint_index in seen:
            raise InvalidConfigurationError(
                f"duplicate compensator on joint {comp.joint_index}")
        seen.add(comp.joint_index)
        j = comp.joint_index - 1
        diag[j] += joint_stiffness_contribution(comp, q[j])
    return JointStiffnessMatrix(diag=diag)


def classical_joint_stiffness(model: RobotModel) -> JointStiffnessMatrix:
    """Spring-free joint stiffness (reciprocal compliances)."""
    return JointStiffnessMatrix(diag=1.0 / model.joint_compliances)


def _checked_jacobian(model, K, cfg):
    diag = K.diag
    if diag.shape[0] != model.n_joints:
        raise InvalidConfigurationError("joint stiffness size does not match model")
    if np.any(diag == 0):
        raise InvalidConfigurationError("joint stiffness diagonal contains zeros")
    J = jacobian_theta(model, cfg)
    cond = np.linalg.cond(J)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularConfigurationError(
            f"configuration is near-singular (cond(J) = {cond:.3e})",
            condition=float(cond),
        )
    return J, cond


def cartesian_compliance(model: RobotModel, K: JointStiffnessMatrix,
                         cfg: Configuration) -> np.ndarray:
    """6x6 Cartesian compliance J . diag(K)^-1 . J^T."""
    J, _ = _checked_jacobian(model, K, cfg)
    return (J / K.diag) @ J.T


def cartesian_stiffness(model: RobotModel, K: JointStiffnessMatrix,
                        cfg: Configuration) -> CartesianStiffness:
    """Cartesian stiffness: inverse of the Cartesian compliance.

    Solved by factorization (no explicit matrix inverse) and symmetrized
    to remove round-off asymmetry.  Requires n >= 6 for a full-rank 6x6
    result.
    """
    if model.n_joints < 6:
        raise UnderActuatedError(
            f"full 6x6 Cartesian stiffness needs n >= 6 joints, model has "
            f"{model.n_joints}")
    J, cond = _checked_jacobian(model, K, cfg)
    C = (J / K.diag) @ J.T
    Kc = np.linalg.solve(C, np.eye(6))
    scale = np.max(np.abs(Kc))
    asymmetry = float(np.max(np.abs(Kc - Kc.T)) / scale)
    Kc = 0.5 * (Kc + Kc.T)
    if K.all_positive:
        pd = True
    else:
        pd = bool(np.all(np.linalg.eigvalsh(Kc) > 0))
    return CartesianStiffness(matrix=Kc, positive_definite=pd,
                              jacobian_condition=float(cond),
                              asymmetry=asymmetry)


def deflection_under_load(model: RobotModel, K: JointStiffnessMatrix,
                          cfg: Configuration, F: Wrench) -> Deflection:
    """First-order end-effector deflection under an external wrench.

    Computed in joint space (torques -> spring deflections -> twist); no
    6x6 inversion involved, but the same singularity guard applies.
    """
    J, _ = _checked_jacobian(model, K, cfg)
    theta = (J.T @ F.as_vector()) / K.diag
    dt = J @ theta
    return Deflection(translation=dt[:3], rotation=dt[3:])
