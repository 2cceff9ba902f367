"""Forward kinematics, Jacobian and inverse kinematics behaviour."""

import numpy as np
import pytest

from elastarm import (Configuration, InvalidModelError, JointDescriptor, Pose,
                      RobotModel, UnreachableTargetError, axis_angle_rotation,
                      forward_kinematics, inverse_kinematics, jacobian_theta,
                      rotation_vector)

from conftest import make_6r_model, make_planar_2r


def test_axis_angle_identity():
    assert np.allclose(axis_angle_rotation((0, 0, 1), 0.0), np.eye(3))


def test_axis_angle_quarter_turn_about_z():
    R = axis_angle_rotation((0, 0, 1), np.pi / 2)
    assert np.allclose(R @ np.array([1.0, 0, 0]), [0, 1, 0], atol=1e-15)
    assert np.allclose(R @ np.array([0, 1.0, 0]), [-1, 0, 0], atol=1e-15)


def test_rotation_vector_round_trip():
    rng = np.random.default_rng(3)
    angles = np.concatenate([rng.uniform(1e-10, np.pi - 1e-7, 80),
                             [1e-12, 1e-9, np.pi - 1e-9, np.pi]])
    for angle in angles:
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        R = axis_angle_rotation(axis, angle)
        v = rotation_vector(R)
        assert np.allclose(axis_angle_rotation(v / max(np.linalg.norm(v), 1e-300),
                                               np.linalg.norm(v)), R, atol=1e-7)


def test_planar_2r_hand_checked_position():
    model = make_planar_2r()
    pose = forward_kinematics(
        model, Configuration.from_q([np.pi / 2, -np.pi / 2]))
    assert np.allclose(pose.position, [1.0, 1.0, 0.0], atol=1e-15)


def test_elastic_deflection_adds_to_actuated_angle():
    model = make_6r_model()
    rng = np.random.default_rng(11)
    q = rng.uniform(-np.pi, np.pi, 6)
    theta = rng.uniform(-0.05, 0.05, 6)
    loaded = forward_kinematics(model, Configuration(q=q, theta=theta))
    summed = forward_kinematics(model, Configuration.from_q(q + theta))
    assert np.array_equal(loaded.position, summed.position)
    assert np.array_equal(loaded.orientation, summed.orientation)


def _finite_difference_jacobian(model, q, h=1e-7):
    J = np.empty((6, len(q)))
    for i in range(len(q)):
        qp = q.copy()
        qp[i] += h
        qm = q.copy()
        qm[i] -= h
        pp = forward_kinematics(model, Configuration.from_q(qp))
        pm = forward_kinematics(model, Configuration.from_q(qm))
        J[:3, i] = (pp.position - pm.position) / (2 * h)
        J[3:, i] = rotation_vector(pp.orientation @ pm.orientation.T) / (2 * h)
    return J


def test_jacobian_matches_finite_differences():
    model = make_6r_model()
    rng = np.random.default_rng(5)
    for _ in range(25):
        q = rng.uniform(-np.pi, np.pi, 6)
        J = jacobian_theta(model, Configuration.from_q(q))
        J_fd = _finite_difference_jacobian(model, q)
        scale = max(1.0, np.max(np.abs(J_fd)))
        assert np.max(np.abs(J - J_fd)) / scale < 1e-6


def test_ik_fk_round_trip():
    model = make_6r_model()
    rng = np.random.default_rng(17)
    for _ in range(20):
        q_true = rng.uniform(-1.2, 1.2, 6)
        target = forward_kinematics(model, Configuration.from_q(q_true))
        seed = Configuration.from_q(q_true + rng.uniform(-0.3, 0.3, 6))
        sol = inverse_kinematics(model, target, seed)
        reached = forward_kinematics(model, sol)
        assert np.linalg.norm(reached.position - target.position) < 1e-8
        assert np.allclose(reached.orientation, target.orientation, atol=1e-8)


def test_ik_returns_principal_angle_range():
    model = make_6r_model()
    q_true = np.array([0.4, 0.3, -0.5, 0.2, 0.7, -0.1])
    target = forward_kinematics(model, Configuration.from_q(q_true))
    # seed several turns away on a couple of joints
    seed = q_true + np.array([4 * np.pi, 0, 0, -6 * np.pi, 0, 2 * np.pi])
    sol = inverse_kinematics(model, target, Configuration.from_q(seed))
    assert np.all(np.abs(sol.q) <= np.pi + 1e-12)


def test_ik_unreachable_target_raises_with_residuals():
    model = make_planar_2r()
    target = Pose(position=(5.0, 0.0, 0.0), orientation=np.eye(3))
    with pytest.raises(UnreachableTargetError) as exc:
        inverse_kinematics(model, target, Configuration.from_q([0.1, 0.1]))
    assert exc.value.position_residual > 1.0
    assert exc.value.exit_code == 4


def test_model_validation():
    with pytest.raises(InvalidModelError):
        JointDescriptor(offset=(0, 0, 0), axis=(0, 0, 2.0))  # not unit
    good = JointDescriptor(offset=(0, 0, 0), axis=(0, 0, 1.0))
    with pytest.raises(InvalidModelError):
        RobotModel(joints=(good,), tool_offset=(1, 0, 0),
                   joint_compliances=(0.0,))  # compliance must be positive
    with pytest.raises(InvalidModelError):
        RobotModel(joints=(good,), tool_offset=(1, 0, 0),
                   joint_compliances=(1e-6, 1e-6))  # wrong length
    with pytest.raises(InvalidModelError):
        RobotModel(joints=(), tool_offset=(1, 0, 0), joint_compliances=())


def test_pose_validation_rejects_non_rotation():
    bad = np.eye(3)
    bad[0, 1] = 0.1
    with pytest.raises(InvalidModelError):
        Pose(position=(0, 0, 0), orientation=bad)


def test_configuration_dimension_mismatch():
    model = make_planar_2r()
    with pytest.raises(InvalidModelError):
        forward_kinematics(model, Configuration.from_q([0.0, 0.0, 0.0]))


def test_model_arrays_are_immutable(model6r):
    with pytest.raises(ValueError):
        model6r.tool_offset[0] = 9.9
    with pytest.raises(ValueError):
        model6r.joints[0].axis[0] = 9.9
