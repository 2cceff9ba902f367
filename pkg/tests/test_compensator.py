"""Spring compensator geometry, torque, stiffness and energy relations."""

import math

import numpy as np
import pytest

from elastarm import (CompensatorParams, SingularGeometryError,
                      joint_stiffness_contribution, joint_torque, spring_force,
                      spring_length, stiffness_factor, transmission_angle)

from conftest import make_compensator


def spring_energy(p, q):
    d = spring_length(p, q) - p.free_length
    return 0.5 * p.spring_stiffness * d * d


def test_anchor_geometry_hand_checked():
    p = make_compensator()
    assert p.anchor_distance == pytest.approx(0.6963993501576521, rel=1e-14)
    assert p.anchor_angle == pytest.approx(0.17361660913902494, rel=1e-14)


def test_length_force_and_transmission_angle_at_perpendicular_lever():
    # lever perpendicular to the anchor direction: cos term vanishes, so
    # the spring length is the hypotenuse of (anchor distance, lever)
    p = make_compensator()
    q = math.pi / 2 - p.anchor_angle
    assert spring_length(p, q) == pytest.approx(0.720481459372828, rel=1e-14)
    assert spring_force(p, q) == pytest.approx(1822787.9123113058, rel=1e-13)
    assert transmission_angle(p, q) == pytest.approx(1.3115169179399377,
                                                     rel=1e-13)


def test_length_stiffness_factor_and_contribution_at_zero_angle():
    p = make_compensator()
    assert spring_length(p, 0.0) == pytest.approx(0.8789217897515115,
                                                  rel=1e-14)
    assert stiffness_factor(p, 0.0) == pytest.approx(0.4691179072139591,
                                                     rel=1e-13)
    assert joint_stiffness_contribution(p, 0.0) == pytest.approx(
        419075.04101841856, rel=1e-13)


def test_torque_zero_when_spring_at_free_length():
    # choose the preload so the spring sits exactly at its free length
    p0 = make_compensator()
    q = 0.7
    p = make_compensator(s0=spring_length(p0, q))
    assert joint_torque(p, q) == pytest.approx(0.0, abs=1e-9)


def test_torque_is_odd_about_the_anchor_line():
    # q -> -(q + 2*alpha) mirrors the lever across the anchor line, which
    # flips the torque sign and preserves the spring length
    p = make_compensator()
    for q in (0.15, 0.6, 1.2):
        mirrored = -(q + 2 * p.anchor_angle)
        assert spring_length(p, mirrored) == pytest.approx(
            spring_length(p, q), rel=1e-14)
        assert joint_torque(p, mirrored) == pytest.approx(
            -joint_torque(p, q), rel=1e-12)


def test_stiffness_contribution_is_torque_gradient():
    p = make_compensator()
    rng = np.random.default_rng(2)
    h = 1e-6
    for q in rng.uniform(-2.5, 2.5, 200):
        fd = (joint_torque(p, q + h) - joint_torque(p, q - h)) / (2 * h)
        analytic = joint_stiffness_contribution(p, q)
        scale = max(abs(fd), 1e-9 * p.spring_stiffness
                    * p.anchor_distance * p.lever_length)
        assert abs(analytic - fd) / scale < 1e-5


def test_torque_is_negative_energy_gradient():
    p = make_compensator()
    rng = np.random.default_rng(4)
    h = 1e-6
    for q in rng.uniform(-2.5, 2.5, 200):
        fd = -(spring_energy(p, q + h) - spring_energy(p, q - h)) / (2 * h)
        analytic = joint_torque(p, q)
        scale = max(abs(fd), 1e-9 * p.spring_stiffness
                    * p.anchor_distance * p.lever_length)
        assert abs(analytic - fd) / scale < 1e-6


def test_preload_lowers_stiffness_below_unloaded_spring():
    # with zero free length the factor is exactly cos(alpha+q); preload
    # subtracts a positive term at small angles
    p = make_compensator()
    p0 = make_compensator(s0=0.0)
    q = 0.3
    x = p.anchor_angle + q
    assert stiffness_factor(p0, q) == pytest.approx(math.cos(x), rel=1e-14)
    assert stiffness_factor(p, q) < stiffness_factor(p0, q)


def test_folded_linkage_raises():
    # anchor distance equal to the lever length lets the loop fold to
    # zero spring length at alpha + q = pi
    p = CompensatorParams(spring_stiffness=1e6, free_length=0.1,
                          lever_length=0.5, anchor_x=0.5, anchor_y=0.0)
    q_fold = math.pi - p.anchor_angle
    with pytest.raises(SingularGeometryError):
        joint_torque(p, q_fold)
    with pytest.raises(SingularGeometryError):
        joint_stiffness_contribution(p, q_fold)


def test_parameter_validation():
    with pytest.raises(ValueError):
        make_compensator(lever=0.0)
    with pytest.raises(ValueError):
        make_compensator(s0=-0.1)
    with pytest.raises(ValueError):
        make_compensator(ax=0.0, ay=0.0)
    with pytest.raises(ValueError):
        CompensatorParams(spring_stiffness=-1.0, free_length=0.1,
                          lever_length=0.2, anchor_x=0.3, anchor_y=0.0)
    with pytest.raises(ValueError):
        make_compensator(joint_index=0)


def test_zero_stiffness_spring_contributes_nothing():
    p = make_compensator(kc=np.inf)  # zero spring rate
    assert p.spring_stiffness == 0.0
    assert joint_torque(p, 0.4) == 0.0
    assert joint_stiffness_contribution(p, 0.4) == 0.0
