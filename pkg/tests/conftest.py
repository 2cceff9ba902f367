"""Shared fixtures: reference models used across the test suite."""

import numpy as np
import pytest

from elastarm import (CompensatorParams, JointDescriptor, RobotModel, Wrench)

# Published calibration results for a heavy machining manipulator: joint
# compliances (rad/(N*m)), spring compliance (m/N), free length, lever
# length and anchor coordinates (m) of its joint-2 gravity compensator.
JOINT_COMPLIANCES = np.array([3.774e-6, 0.302e-6, 0.406e-6,
                              3.002e-6, 3.303e-6, 2.365e-6])
KC = 0.144e-6
S0 = 0.458
LEVER = 0.18472
AX = 0.68593
AY = 0.12030


def make_6r_model(compliances=None):
    """Stand-in 6R geometry with realistic heavy-manipulator link sizes."""
    joints = (
        JointDescriptor(offset=(0.0, 0.0, 0.675), axis=(0.0, 0.0, 1.0)),
        JointDescriptor(offset=(0.35, 0.0, 0.0), axis=(0.0, 1.0, 0.0)),
        JointDescriptor(offset=(0.0, 0.0, 1.35), axis=(0.0, 1.0, 0.0)),
        JointDescriptor(offset=(0.25, 0.0, 0.0), axis=(1.0, 0.0, 0.0)),
        JointDescriptor(offset=(1.05, 0.0, 0.0), axis=(0.0, 1.0, 0.0)),
        JointDescriptor(offset=(0.17, 0.0, 0.0), axis=(1.0, 0.0, 0.0)),
    )
    k = JOINT_COMPLIANCES if compliances is None else compliances
    return RobotModel(joints=joints, tool_offset=(0.12, 0.0, -0.08),
                      joint_compliances=k)


def make_compensator(kc=KC, s0=S0, lever=LEVER, ax=AX, ay=AY, joint_index=2):
    return CompensatorParams(spring_stiffness=1.0 / kc, free_length=s0,
                             lever_length=lever, anchor_x=ax, anchor_y=ay,
                             joint_index=joint_index)


def make_planar_2r():
    """Two 1 m links, both axes vertical; hand-checkable."""
    joints = (
        JointDescriptor(offset=(0.0, 0.0, 0.0), axis=(0.0, 0.0, 1.0)),
        JointDescriptor(offset=(1.0, 0.0, 0.0), axis=(0.0, 0.0, 1.0)),
    )
    return RobotModel(joints=joints, tool_offset=(1.0, 0.0, 0.0),
                      joint_compliances=(2e-6, 4e-6))


def random_6r_model(rng):
    """Random serial 6R chain with unit axes and non-degenerate links."""
    joints = []
    for _ in range(6):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        offset = rng.uniform(-0.6, 0.6, 3)
        joints.append(JointDescriptor(offset=offset, axis=axis))
    k = rng.uniform(1e-7, 1e-5, 6)
    tool = rng.uniform(-0.3, 0.3, 3)
    return RobotModel(joints=tuple(joints), tool_offset=tool,
                      joint_compliances=k)


def random_wrench(rng):
    return Wrench(force=rng.uniform(-500, 500, 3),
                  moment=rng.uniform(-200, 200, 3))


@pytest.fixture
def model6r():
    return make_6r_model()


@pytest.fixture
def compensator():
    return make_compensator()


@pytest.fixture
def planar2r():
    return make_planar_2r()
