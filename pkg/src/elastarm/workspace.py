"""Deflection maps over a planar working area and pose compensation.

The working area is swept row-major with inverse kinematics seeded from
the previous node, and every node is evaluated with both the
compensator-augmented and the spring-free joint stiffness so the two
modelling strategies can be compared pointwise.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np

from .elastostatics import (Wrench, classical_joint_stiffness,
                            deflection_under_load, joint_stiffness)
from .errors import (CompensationFailureError, InvalidConfigurationError,
                     SingularConfigurationError, UnreachableTargetError)
from .kinematics import (Configuration, Pose, RobotModel, axis_angle_rotation,
                         forward_kinematics, inverse_kinematics)

log = logging.getLogger(__name__)

_FMT = "{:.9g}"


@dataclass(frozen=True)
class WorkspaceGrid:
    """Planar rectangular sampling area with a fixed tool orientation.

    ``u_axis``/``v_axis`` must be orthogonal unit vectors; node (iu, iv)
    sits at origin + u_axis*width*iu/(nu-1) + v_axis*height*iv/(nv-1).
    """

    origin: np.ndarray
    u_axis: np.ndarray
    v_axis: np.ndarray
    width: float
    height: float
    nu: int
    nv: int
    tool_orientation: np.ndarray

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=float)
        u = np.asarray(self.u_axis, dtype=float)
        v = np.asarray(self.v_axis, dtype=float)
        R = np.asarray(self.tool_orientation, dtype=float)
        if origin.shape != (3,) or u.shape != (3,) or v.shape != (3,):
            raise InvalidConfigurationError("grid origin and axes must be 3-vectors")
        if abs(np.linalg.norm(u) - 1) > 1e-12 or abs(np.linalg.norm(v) - 1) > 1e-12:
            raise InvalidConfigurationError("grid axes must be unit vectors")
        if abs(np.dot(u, v)) > 1e-12:
            raise InvalidConfigurationError("grid axes must be orthogonal")
        if self.nu < 2 or self.nv < 2:
            raise InvalidConfigurationError("grid needs at least 2 samples per axis")
        if self.width <= 0 or self.height <= 0:
            raise InvalidConfigurationError("grid size must be positive")
        if R.shape != (3, 3):
            raise InvalidConfigurationError("tool orientation must be 3x3")
        for name, arr in (("origin", origin), ("u_axis", u), ("v_axis", v),
                          ("tool_orientation", R)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def node_position(self, iu: int, iv: int) -> np.ndarray:
        du = self.width * iu / (self.nu - 1)
        dv = self.height * iv / (self.nv - 1)
        return self.origin + du * self.u_axis + dv * self.v_axis

    def with_resolution(self, nu: int, nv: int) -> "WorkspaceGrid":
        """Same area and orientation, resampled at nu x nv nodes."""
        return dataclasses.replace(self, nu=int(nu), nv=int(nv))


@dataclass(frozen=True)
class DeflectionMap:
    """Per-node IK solutions and deflections for both stiffness models.

    Arrays are indexed [iv, iu]; flagged (unreachable or singular) nodes
    hold NaN and ``ok`` False.  ``model_difference`` is the norm of the
    translational deflection gap between the two models, which is also
    the residual left by compensating with the spring-free model.
    """

    grid: WorkspaceGrid
    positions: np.ndarray            # (nv, nu, 3) node coordinates
    q: np.ndarray                    # (nv, nu, n) IK solutions
    deflection: np.ndarray           # (nv, nu, 6) compensator-augmented model
    deflection_classical: np.ndarray  # (nv, nu, 6) spring-free model
    ok: np.ndarray                   # (nv, nu) bool
    wrench: Wrench
    metadata: dict = field(default_factory=dict)

    @property
    def magnitude(self) -> np.ndarray:
        return np.linalg.norm(self.deflection[:, :, :3], axis=2)

    @property
    def magnitude_classical(self) -> np.ndarray:
        return np.linalg.norm(self.deflection_classical[:, :, :3], axis=2)

    @property
    def model_difference(self) -> np.ndarray:
        gap = self.deflection[:, :, :3] - self.deflection_classical[:, :, :3]
        return np.linalg.norm(gap, axis=2)

    # compensating with the wrong (spring-free) model leaves exactly the
    # model gap as positioning error under the linear deflection model
    compensation_residual = model_difference

    def summary(self) -> dict:
        """Min/max/mean of deflection magnitudes and model difference (m)."""
        out = {"nodes": int(self.ok.size), "ok": int(np.count_nonzero(self.ok))}
        for name, arr in (("magnitude", self.magnitude),
                          ("magnitude_classical", self.magnitude_classical),
                          ("model_difference", self.model_difference)):
            vals = arr[self.ok]
            if vals.size:
                out[name] = {"min": float(vals.min()), "max": float(vals.max()),
                             "mean": float(vals.mean())}
            else:
                out[name] = {"min": float("nan"), "max": float("nan"),
                             "mean": float("nan")}
        return out

    def to_csv(self, f) -> None:
        """Full map CSV, one row per node (deflections in mm)."""
        n = self.q.shape[2]
        qcols = ",".join(f"q{i + 1}" for i in range(n))
        f.write("# deflection map: u,v,x,y,z in m; q in rad; "
                "dx,dy,dz,mag_comp,mag_classical,diff in mm; flag 1 = skipped\n")
        f.write(f"u,v,x,y,z,{qcols},dx,dy,dz,mag_comp,mag_classical,diff,flag\n")
        mag = self.magnitude
        mag0 = self.magnitude_classical
        diff = self.model_difference
        for iv in range(self.grid.nv):
            for iu in range(self.grid.nu):
                du = self.grid.width * iu / (self.grid.nu - 1)
                dv = self.grid.height * iv / (self.grid.nv - 1)
                pos = self.positions[iv, iu]
                head = [_FMT.format(x) for x in (du, dv, *pos)]
                if self.ok[iv, iu]:
                    dp_mm = 1e3 * self.deflection[iv, iu, :3]
                    body = [_FMT.format(x) for x in self.q[iv, iu]]
                    body += [_FMT.format(x) for x in dp_mm]
                    body += [_FMT.format(1e3 * mag[iv, iu]),
                             _FMT.format(1e3 * mag0[iv, iu]),
                             _FMT.format(1e3 * diff[iv, iu]), "0"]
                else:
                    body = [""] * (n + 6) + ["1"]
                f.write(",".join(head + body) + "\n")

    def comparison_to_csv(self, f) -> None:
        """Model-difference (compensation residual) CSV in mm."""
        f.write("# strategy comparison: u,v,x,y,z in m; residual in mm; "
                "flag 1 = skipped\n")
        f.write("u,v,x,y,z,residual,flag\n")
        diff = self.model_difference
        for iv in range(self.grid.nv):
            for iu in range(self.grid.nu):
                du = self.grid.width * iu / (self.grid.nu - 1)
                dv = self.grid.height * iv / (self.grid.nv - 1)
                pos = self.positions[iv, iu]
                row = [_FMT.format(x) for x in (du, dv, *pos)]
                if self.ok[iv, iu]:
                    row += [_FMT.format(1e3 * diff[iv, iu]), "0"]
                else:
                    row += ["", "1"]
                f.write(",".join(row) + "\n")


def evaluate_map(model: RobotModel, comps, grid: WorkspaceGrid, F: Wrench,
                 home_q=None) -> DeflectionMap:
    """Deflections under F at every grid node, for both stiffness models.

    Nodes are visited row-major (v outer, u inner); each IK starts from
    the previous node's solution, the first from ``home_q``.  Nodes where
    IK fails or the configuration is singular are flagged, not fatal.
    """
    n = model.n_joints
    home = np.zeros(n) if home_q is None else np.asarray(home_q, dtype=float)
    if home.shape != (n,):
        raise InvalidConfigurationError(f"home posture must have length {n}")

    nv, nu = grid.nv, grid.nu
    positions = np.empty((nv, nu, 3))
    qs = np.full((nv, nu, n), np.nan)
    dts = np.full((nv, nu, 6), np.nan)
    dts0 = np.full((nv, nu, 6), np.nan)
    ok = np.zeros((nv, nu), dtype=bool)

    seed = home
    for iv in range(nv):
        for iu in range(nu):
            pos = grid.node_position(iu, iv)
            positions[iv, iu] = pos
            target = Pose(position=pos, orientation=grid.tool_orientation)
            try:
                sol = inverse_kinematics(model, target, Configuration.from_q(seed))
            except UnreachableTargetError:
                log.debug("node (%d, %d) unreachable", iu, iv)
                continue
            seed = sol.q
            try:
                K = joint_stiffness(model, comps, sol.q)
                K0 = classical_joint_stiffness(model)
                d = deflection_under_load(model, K, sol, F)
                d0 = deflection_under_load(model, K0, sol, F)
            except SingularConfigurationError:
                log.debug("node (%d, %d) singular", iu, iv)
                continue
            qs[iv, iu] = sol.q
            dts[iv, iu] = d.as_vector()
            dts0[iv, iu] = d0.as_vector()
            ok[iv, iu] = True

    metadata = {"ok": int(np.count_nonzero(ok)), "nodes": int(ok.size)}
    if metadata["ok"] == 0:
        metadata["warning"] = "empty map: no reachable non-singular nodes"
        log.warning(metadata["warning"])
    return DeflectionMap(grid=grid, positions=positions, q=qs, deflection=dts,
                         deflection_classical=dts0, ok=ok, wrench=F,
                         metadata=metadata)


def compare_strategies(model: RobotModel, comps, grid: WorkspaceGrid,
                       F: Wrench, home_q=None) -> DeflectionMap:
    """Residual error of compensating with the spring-free model.

    Under the linear deflection model the residual at each node equals
    the translational gap between the two models, so this is the map of
    ``model_difference`` values; use ``comparison_to_csv``/``summary``
    for reporting.
    """
    return evaluate_map(model, comps, grid, F, home_q=home_q)


def compensate_pose(model: RobotModel, comps, target: Pose, F: Wrench,
                    seed: Configuration | None = None,
                    max_iterations: int = 20, tol: float = 1e-6) -> Pose:
    """Command pose whose loaded (deflected) position lands on target.

    Fixed-point iteration: command <- target - predicted deflection at
    the command's IK solution.  Converged when the predicted loaded
    position is within ``tol`` of the target.
    """
    if seed is None:
        seed = Configuration.from_q(np.zeros(model.n_joints))
    command = target
    q = inverse_kinematics(model, target, seed).q
    residual = np.inf
    for _ in range(max_iterations):
        K = joint_stiffness(model, comps, q)
        d = deflection_under_load(model, K, Configuration.from_q(q), F)
        loaded = forward_kinematics(model, Configuration.from_q(q)).position \
            + d.translation
        residual = float(np.linalg.norm(loaded - target.position))
        if residual < tol:
            return command
        rot = d.rotation
        angle = np.linalg.norm(rot)
        if angle > 0:
            back_rotation = axis_angle_rotation(rot / angle, -angle)
        else:
            back_rotation = np.eye(3)
        command = Pose(position=target.position - d.translation,
                       orientation=back_rotation @ target.orientation)
        q = inverse_kinematics(model, command, Configuration.from_q(q)).q
    raise CompensationFailureError(
        f"pose compensation did not converge in {max_iterations} iterations "
        f"(residual {residual:.3e} m)", residual=residual)
