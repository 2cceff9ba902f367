"""Spring gravity-compensator mechanics.

The compensator is a linear extension spring between a fixed anchor on
one link and a lever point on the next link; it closes a loop over one
actuated joint and acts on that joint as a configuration-dependent
rotational spring.  All angles follow the spanned joint's coordinate q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import SingularGeometryError

# relative spring length below which the triangle is treated as folded flat
_FOLD_TOL = 1e-12


@dataclass(frozen=True)
class CompensatorParams:
    """Geometry and stiffness of one spring compensator.

    spring_stiffness   linear spring rate (N/m); zero models a removed
                       spring and contributes nothing
    free_length        unloaded spring length (m)
    lever_length       joint pivot to moving attachment point (m)
    anchor_x, anchor_y components of the fixed anchor relative to the
                       joint pivot (m), in the plane of the mechanism
    joint_index        actuated joint the compensator spans, 1-based
    """

    spring_stiffness: float
    free_length: float
    lever_length: float
    anchor_x: float
    anchor_y: float
    joint_index: int = 2

    anchor_distance: float = field(init=False, repr=False, compare=False)
    anchor_angle: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.spring_stiffness < 0:
            raise ValueError("spring stiffness must be >= 0")
        if self.lever_length <= 0:
            raise ValueError("lever length must be positive")
        if self.free_length < 0:
            raise ValueError("free length must be >= 0")
        if self.anchor_x == 0.0 and self.anchor_y == 0.0:
            raise ValueError("anchor must not coincide with the joint pivot")
        if self.joint_index < 1:
            raise ValueError("joint index is 1-based")
        object.__setattr__(self, "anchor_distance",
                           math.hypot(self.anchor_x, self.anchor_y))
        object.__setattr__(self, "anchor_angle",
                           math.atan2(self.anchor_y, self.anchor_x))


def spring_length(p: CompensatorParams, q: float) -> float:
    """Spring length at joint angle q (law of cosines over the loop)."""
    a = p.anchor_distance
    L = p.lever_length
    s2 = a * a + L * L + 2.0 * a * L * math.cos(p.anchor_angle + q)
    return math.sqrt(max(s2, 0.0))


def spring_force(p: CompensatorParams, q: float) -> float:
    """Axial spring force; negative when shorter than the free length."""
    return p.spring_stiffness * (spring_length(p, q) - p.free_length)


def transmission_angle(p: CompensatorParams, q: float) -> float:
    """Angle between the spring line and the lever, in [-pi/2, pi/2]."""
    s = spring_length(p, q)
    _check_not_folded(p, s)
    ratio = p.anchor_distance / s * math.sin(p.anchor_angle + q)
    assert abs(ratio) <= 1.0 + 1e-12, "triangle inequality violated"
    return math.asin(min(1.0, max(-1.0, ratio)))


def joint_torque(p: CompensatorParams, q: float) -> float:
    """Torque applied by the compensator to its joint (N*m)."""
    s = spring_length(p, q)
    _check_not_folded(p, s)
    return (p.spring_stiffness * (1.0 - p.free_length / s)
            * p.anchor_distance * p.lever_length * math.sin(p.anchor_angle + q))


def stiffness_factor(p: CompensatorParams, q: float) -> float:
    """Dimensionless torque-gradient factor.

    The joint stiffness contribution is spring_stiffness * a * L times
    this factor; preload (free_length > 0) pulls it below cos(alpha+q)
    and can make it negative.
    """
    s = spring_length(p, q)
    _check_not_folded(p, s)
    a = p.anchor_distance
    L = p.lever_length
    x = p.anchor_angle + q
    cx = math.cos(x)
    sx = math.sin(x)
    return cx - (p.free_length / s) * ((a * L / (s * s)) * sx * sx + cx)


def joint_stiffness_contribution(p: CompensatorParams, q: float) -> float:
    """Equivalent rotational stiffness added at the spanned joint (N*m/rad).

    Analytically equal to the torque derivative d(joint_torque)/dq; may
    be negative for some preload/configuration combinations.
    """
    return (p.spring_stiffness * p.anchor_distance * p.lever_length
            * stiffness_factor(p, q))


def _check_not_folded(p: CompensatorParams, s: float):
    if s <= _FOLD_TOL * (p.anchor_distance + p.lever_length):
        raise SingularGeometryError(
            "compensator folded to zero spring length (anchor distance equals "
            "lever length and the linkage is fully folded)"
        )
