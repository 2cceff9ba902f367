"""Elastostatic modelling of serial manipulators with spring gravity
compensators.

The package covers the full analysis pipeline: forward/inverse
kinematics of a serial chain with 1-dof elastic joints, the torque and
stiffness contribution of spring-lever gravity compensators, joint and
Cartesian stiffness under both the compensator-augmented and the
spring-free (classical) model, end-effector deflection under load,
deflection maps over a planar working area, pose compensation, and
nonlinear least-squares identification of the elastic parameters from
calibration measurements.

Numerical kernels come in two interchangeable backends, a compiled
extension and a pure-numpy fallback; see ``kernel_backend()``.
"""

from ._kernels import backend_name as kernel_backend
from .compensator import (CompensatorParams, joint_stiffness_contribution,
                          joint_torque, spring_force, spring_length,
                          stiffness_factor, transmission_angle)
from .config import RunConfig, dump_config, load_config, parse_config
from .elastostatics import (CartesianStiffness, Deflection,
                            JointStiffnessMatrix, Wrench,
                            cartesian_compliance, cartesian_stiffness,
                            classical_joint_stiffness, deflection_under_load,
                            joint_stiffness)
from .errors import (CompensationFailureError, ConfigError, ElastArmError,
                     InvalidConfigurationError, InvalidModelError,
                     NonConvergenceError, SingularConfigurationError,
                     SingularGeometryError, UnderActuatedError,
                     UnidentifiableSetError, UnreachableTargetError)
from .identification import (CalibrationSample, ParameterEstimate,
                             format_estimate, identify, parameter_names,
                             samples_from_csv, samples_to_csv,
                             simulate_calibration)
from .kinematics import (Configuration, JointDescriptor, Pose, RobotModel,
                         axis_angle_rotation, forward_kinematics,
                         inverse_kinematics, jacobian_theta, rotation_vector)
from .workspace import (DeflectionMap, WorkspaceGrid, compare_strategies,
                        compensate_pose, evaluate_map)

__version__ = "1.0.0"

__all__ = [
    "CalibrationSample",
    "CartesianStiffness",
    "CompensationFailureError",
    "CompensatorParams",
    "ConfigError",
    "Configuration",
    "Deflection",
    "DeflectionMap",
    "ElastArmError",
    "InvalidConfigurationError",
    "InvalidModelError",
    "JointDescriptor",
    "JointStiffnessMatrix",
    "NonConvergenceError",
    "ParameterEstimate",
    "Pose",
    "RobotModel",
    "RunConfig",
    "SingularConfigurationError",
    "SingularGeometryError",
    "UnderActuatedError",
    "UnidentifiableSetError",
    "UnreachableTargetError",
    "Wrench",
    "WorkspaceGrid",
    "axis_angle_rotation",
    "cartesian_compliance",
    "cartesian_stiffness",
    "classical_joint_stiffness",
    "compare_strategies",
    "compensate_pose",
    "deflection_under_load",
    "dump_config",
    "evaluate_map",
    "forward_kinematics",
    "format_estimate",
    "identify",
    "inverse_kinematics",
    "jacobian_theta",
    "joint_stiffness",
    "joint_stiffness_contribution",
    "joint_torque",
    "kernel_backend",
    "load_config",
    "parameter_names",
    "parse_config",
    "rotation_vector",
    "samples_from_csv",
    "samples_to_csv",
    "simulate_calibration",
    "spring_force",
    "spring_length",
    "stiffness_factor",
    "transmission_angle",
    "__version__",
]
