"""INI-style run configuration: parsing, validation and round-trip dump.

Lengths may be given in millimetres (``*_mm`` keys) or metres (``*_m``);
everything is converted to SI on load.  Unknown keys are rejected with
the section and key named, so typos cannot silently change a model.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass

import numpy as np

from .compensator import CompensatorParams
from .elastostatics import Wrench
from .errors import ConfigError, InvalidConfigurationError
from .kinematics import JointDescriptor, RobotModel
from .workspace import WorkspaceGrid

_MM = 1e-3


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs: model, compensators, grid, wrench."""

    model: RobotModel
    compensators: tuple
    grid: WorkspaceGrid | None
    wrench: Wrench | None
    home_q: np.ndarray | None


def _floats(section, key, text, count=None):
    parts = text.replace(",", " ").split()
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"expected numbers, got {text!r}",
                          section=section, key=key) from None
    if count is not None and len(vals) != count:
        raise ConfigError(f"expected {count} values, got {len(vals)}",
                          section=section, key=key)
    return vals


class _Section:
    """Tracks which keys were consumed so leftovers can be reported."""

    def __init__(self, name, items):
        self.name = name
        self._items = dict(items)
        self._used = set()

    def __contains__(self, key):
        return key in self._items

    def raw(self, key):
        self._used.add(key)
        return self._items[key]

    def take(self, key, count=None, required=True, default=None):
        if key not in self._items:
            if required:
                raise ConfigError("missing required key",
                                  section=self.name, key=key)
            return default
        return _floats(self.name, key, self.raw(key), count)

    def take_length(self, base, count=None, required=True, default=None):
        """Value from ``base_mm`` (converted) or ``base_m`` (as-is)."""
        key_mm, key_m = base + "_mm", base + "_m"
        if key_mm in self._items and key_m in self._items:
            raise ConfigError(f"give {key_mm} or {key_m}, not both",
                              section=self.name, key=key_mm)
        if key_mm in self._items:
            vals = _floats(self.name, key_mm, self.raw(key_mm), count)
            return [v * _MM for v in vals]
        if key_m in self._items:
            return _floats(self.name, key_m, self.raw(key_m), count)
        if required:
            raise ConfigError(f"missing required key (or {key_m})",
                              section=self.name, key=key_mm)
        return default

    def leftovers(self):
        return sorted(set(self._items) - self._used)


def _parse_robot(sec: _Section) -> RobotModel:
    joints = []
    i = 1
    while f"joint{i}.axis" in sec or f"joint{i}.offset_mm" in sec \
            or f"joint{i}.offset_m" in sec:
        offset = sec.take_length(f"joint{i}.offset", 3)
        axis = sec.take(f"joint{i}.axis", 3)
        joints.append(JointDescriptor(offset=offset, axis=axis))
        i += 1
    if not joints:
        raise ConfigError("defines no joints (need joint1.offset_mm and "
                          "joint1.axis)", section="robot")
    tool = sec.take_length("tool.offset", 3)
    return joints, tool


def parse_config(text: str, path: str = "<config>") -> RunConfig:
    """Parse and validate a configuration document."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"),
                                   interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text, source=path)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(f"{path}: {exc}", line=line) from None

    known = {"robot", "compliance", "compensator", "workspace", "force"}
    for name in cp.sections():
        if name not in known:
            raise ConfigError(f"unknown section [{name}]", section=name)
    for required in ("robot", "compliance"):
        if not cp.has_section(required):
            raise ConfigError(f"missing required section [{required}]",
                              section=required)

    robot = _Section("robot", cp.items("robot"))
    joints, tool = _parse_robot(robot)
    n = len(joints)

    compliance = _Section("compliance", cp.items("compliance"))
    k = [compliance.take(f"k{i + 1}", 1)[0] for i in range(n)]
    model = RobotModel(joints=tuple(joints), tool_offset=tool,
                       joint_compliances=k)

    comps = ()
    comp_sec = None
    if cp.has_section("compensator"):
        comp_sec = _Section("compensator", cp.items("compensator"))
        joint_index = int(comp_sec.take("joint", 1)[0])
        kc = comp_sec.take("kc", 1)[0]
        s0 = comp_sec.take_length("s0", 1)[0]
        lever = comp_sec.take_length("L", 1)[0]
        ax = comp_sec.take_length("ax", 1)[0]
        ay = comp_sec.take_length("ay", 1)[0]
        if kc < 0:
            raise ConfigError("kc must be >= 0 (m/N)",
                              section="compensator", key="kc")
        if kc == 0.0:
            comps = ()  # no spring attached
        else:
            try:
                comps = (CompensatorParams(
                    spring_stiffness=1.0 / kc, free_length=s0,
                    lever_length=lever, anchor_x=ax, anchor_y=ay,
                    joint_index=joint_index),)
            except ValueError as exc:
                raise ConfigError(str(exc), section="compensator") from None

    grid = None
    ws_sec = None
    home_q = None
    if cp.has_section("workspace"):
        ws_sec = _Section("workspace", cp.items("workspace"))
        origin = ws_sec.take_length("origin", 3)
        u_axis = ws_sec.take("u_axis", 3)
        v_axis = ws_sec.take("v_axis", 3)
        width = ws_sec.take_length("width", 1)[0]
        height = ws_sec.take_length("height", 1)[0]
        grid_txt = ws_sec.raw("grid") if "grid" in ws_sec else "21x21"
        try:
            nu_txt, nv_txt = grid_txt.lower().split("x")
            nu, nv = int(nu_txt), int(nv_txt)
        except ValueError:
            raise ConfigError(f"expected NxM, got {grid_txt!r}",
                              section="workspace", key="grid") from None
        orient_txt = ws_sec.raw("tool_orientation") \
            if "tool_orientation" in ws_sec else "identity"
        if orient_txt.strip().lower() == "identity":
            orientation = np.eye(3)
        else:
            vals = _floats("workspace", "tool_orientation", orient_txt, 9)
            orientation = np.array(vals).reshape(3, 3)
        hq = ws_sec.take("home_q", n, required=False)
        home_q = None if hq is None else np.asarray(hq, dtype=float)
        try:
            grid = WorkspaceGrid(origin=origin, u_axis=u_axis, v_axis=v_axis,
                                 width=width, height=height, nu=nu, nv=nv,
                                 tool_orientation=orientation)
        except (ValueError, InvalidConfigurationError) as exc:
            raise ConfigError(str(exc), section="workspace") from None

    wrench = None
    force_sec = None
    if cp.has_section("force"):
        force_sec = _Section("force", cp.items("force"))
        w = force_sec.take("wrench", 6)
        wrench = Wrench.from_vector(w)

    for sec in (robot, compliance, comp_sec, ws_sec, force_sec):
        if sec is None:
            continue
        extra = sec.leftovers()
        if extra:
            raise ConfigError("unknown key", section=sec.name, key=extra[0])

    return RunConfig(model=model, compensators=comps, grid=grid,
                     wrench=wrench, home_q=home_q)


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read(), path=path)


def _fmt(values) -> str:
    return " ".join(repr(float(v)) for v in np.atleast_1d(values))


def dump_config(cfg: RunConfig) -> str:
    """Serialize in SI units; reparsing yields a field-identical model."""
    out = io.StringIO()
    model = cfg.model
    out.write("[robot]\n")
    for i, joint in enumerate(model.joints, start=1):
        out.write(f"joint{i}.offset_m = {_fmt(joint.offset)}\n")
        out.write(f"joint{i}.axis = {_fmt(joint.axis)}\n")
    out.write(f"tool.offset_m = {_fmt(model.tool_offset)}\n")
    out.write("\n[compliance]\n")
    for i, k in enumerate(model.joint_compliances, start=1):
        out.write(f"k{i} = {float(k)!r}\n")
    if cfg.compensators:
        comp = cfg.compensators[0]
        out.write("\n[compensator]\n")
        out.write(f"joint = {comp.joint_index}\n")
        out.write(f"kc = {1.0 / comp.spring_stiffness!r}\n")
        out.write(f"s0_m = {float(comp.free_length)!r}\n")
        out.write(f"L_m = {float(comp.lever_length)!r}\n")
        out.write(f"ax_m = {float(comp.anchor_x)!r}\n")
        out.write(f"ay_m = {float(comp.anchor_y)!r}\n")
    if cfg.grid is not None:
        g = cfg.grid
        out.write("\n[workspace]\n")
        out.write(f"origin_m = {_fmt(g.origin)}\n")
        out.write(f"u_axis = {_fmt(g.u_axis)}\n")
        out.write(f"v_axis = {_fmt(g.v_axis)}\n")
        out.write(f"width_m = {float(g.width)!r}\n")
        out.write(f"height_m = {float(g.height)!r}\n")
        out.write(f"grid = {g.nu}x{g.nv}\n")
        out.write(f"tool_orientation = {_fmt(g.tool_orientation.ravel())}\n")
        if cfg.home_q is not None:
            out.write(f"home_q = {_fmt(cfg.home_q)}\n")
    if cfg.wrench is not None:
        out.write("\n[force]\n")
        out.write(f"wrench = {_fmt(cfg.wrench.as_vector())}\n")
    return out.getvalue()
