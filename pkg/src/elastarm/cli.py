"""Command line front end.

Subcommands cover the analysis pipeline: forward kinematics, Cartesian
stiffness, deflection under load, workspace deflection maps, model
comparison, parameter identification from calibration CSVs, and
synthetic calibration data generation.  Exit codes group error classes:
2 config, 3 model, 4 unreachable, 5 singular, 6 identification,
7 compensation, 8 I/O.
"""

from __future__ import annotations

import argparse
import contextlib
import sys

import numpy as np

from . import identification
from .config import dump_config, load_config
from .elastostatics import (Wrench, cartesian_stiffness, classical_joint_stiffness,
                            deflection_under_load, joint_stiffness)
from .errors import ConfigError, ElastArmError
from .kinematics import Configuration, forward_kinematics
from .workspace import evaluate_map

_FMT = "{:.9g}"


def _fmt_row(values) -> str:
    return " ".join(_FMT.format(v) for v in np.atleast_1d(values))


def _parse_vector(text, count, what):
    parts = text.replace(",", " ").split()
    try:
        vals = np.array([float(p) for p in parts])
    except ValueError:
        raise ConfigError(f"{what}: expected numbers, got {text!r}") from None
    if vals.shape != (count,):
        raise ConfigError(f"{what}: expected {count} values, got {len(vals)}")
    return vals


def _get_q(args, cfg):
    if args.q is not None:
        return _parse_vector(args.q, cfg.model.n_joints, "--q")
    if cfg.home_q is not None:
        return cfg.home_q
    return np.zeros(cfg.model.n_joints)


def _get_wrench(args, cfg):
    if args.force is not None:
        return Wrench.from_vector(_parse_vector(args.force, 6, "--force"))
    if cfg.wrench is not None:
        return cfg.wrench
    raise ConfigError("no wrench given: add a [force] section or pass --force")


def _get_comps(args, cfg):
    return () if args.no_compensator else cfg.compensators


def _get_grid(args, cfg):
    grid = cfg.grid
    if grid is None:
        raise ConfigError("no [workspace] section in config")
    if args.grid is not None:
        try:
            nu_txt, nv_txt = args.grid.lower().split("x")
            nu, nv = int(nu_txt), int(nv_txt)
        except ValueError:
            raise ConfigError(f"--grid: expected NxM, got {args.grid!r}") from None
        grid = grid.with_resolution(nu, nv)
    return grid


@contextlib.contextmanager
def _open_output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as f:
            yield f


def _cmd_fk(args, cfg, out):
    q = _get_q(args, cfg)
    pose = forward_kinematics(cfg.model, Configuration.from_q(q))
    out.write(f"position_m: {_fmt_row(pose.position)}\n")
    out.write("orientation:\n")
    for row in pose.orientation:
        out.write(_fmt_row(row) + "\n")
    return 0


def _cmd_stiffness(args, cfg, out):
    q = _get_q(args, cfg)
    comps = _get_comps(args, cfg)
    compensated = cartesian_stiffness(
        cfg.model, joint_stiffness(cfg.model, comps, q), Configuration.from_q(q))
    classical = cartesian_stiffness(
        cfg.model, classical_joint_stiffness(cfg.model), Configuration.from_q(q))
    out.write(f"jacobian_condition: {_FMT.format(compensated.jacobian_condition)}\n")
    out.write("cartesian_stiffness (translation N/m, rotation N*m/rad):\n")
    for row in compensated.matrix:
        out.write(_fmt_row(row) + "\n")
    out.write("cartesian_stiffness_classical:\n")
    for row in classical.matrix:
        out.write(_fmt_row(row) + "\n")
    return 0


def _frame_wrench(wrench, frame, orientation):
    if frame == "tool":
        return wrench.rotated(orientation)
    return wrench


def _cmd_deflect(args, cfg, out):
    q = _get_q(args, cfg)
    comps = _get_comps(args, cfg)
    cfg_q = Configuration.from_q(q)
    pose = forward_kinematics(cfg.model, cfg_q)
    wrench = _frame_wrench(_get_wrench(args, cfg), args.frame, pose.orientation)
    d = deflection_under_load(cfg.model, joint_stiffness(cfg.model, comps, q),
                              cfg_q, wrench)
    d0 = deflection_under_load(cfg.model, classical_joint_stiffness(cfg.model),
                               cfg_q, wrench)
    out.write(f"translation_mm: {_fmt_row(d.translation * 1e3)}\n")
    out.write(f"rotation_rad: {_fmt_row(d.rotation)}\n")
    out.write(f"translation_classical_mm: {_fmt_row(d0.translation * 1e3)}\n")
    out.write(f"rotation_classical_rad: {_fmt_row(d0.rotation)}\n")
    return 0


def _evaluate(args, cfg):
    grid = _get_grid(args, cfg)
    comps = _get_comps(args, cfg)
    wrench = _frame_wrench(_get_wrench(args, cfg), args.frame,
                           grid.tool_orientation)
    return evaluate_map(cfg.model, comps, grid, wrench, home_q=cfg.home_q)


def _cmd_map(args, cfg, out):
    dmap = _evaluate(args, cfg)
    dmap.to_csv(out)
    return 0


def _cmd_compare(args, cfg, out):
    dmap = _evaluate(args, cfg)
    dmap.comparison_to_csv(out)
    stats = dmap.summary()
    diff = stats["model_difference"]
    report = sys.stderr if out is sys.stdout else sys.stdout
    report.write(f"nodes_evaluated: {stats['ok']}\n")
    for key in ("min", "max", "mean"):
        report.write(f"difference_{key}_mm: {_FMT.format(1e3 * diff[key])}\n")
    return 0


def _identify_guess(cfg):
    model = cfg.model
    if not cfg.compensators:
        raise ConfigError("identify requires a [compensator] section with kc > 0")
    comp = cfg.compensators[0]
    guess = np.concatenate([
        np.asarray(model.joint_compliances, dtype=float),
        [1.0 / comp.spring_stiffness, comp.free_length, comp.lever_length,
         comp.anchor_x, comp.anchor_y]])
    return guess, comp.joint_index


def _cmd_identify(args, cfg, out):
    guess, comp_joint = _identify_guess(cfg)
    with open(args.samples, "r", encoding="utf-8") as f:
        samples = identification.samples_from_csv(f)
    fixed = tuple(s for s in args.fix.split(",") if s) if args.fix else ()
    est = identification.identify(cfg.model, samples, guess,
                                  compensator_joint=comp_joint, fixed=fixed)
    out.write(identification.format_estimate(est))
    return 0


def _cmd_simulate_calib(args, cfg, out):
    comps = _get_comps(args, cfg)
    n = cfg.model.n_joints
    rng = np.random.default_rng(args.seed)
    poses = [rng.uniform(-np.pi, np.pi, n) for _ in range(args.count)]
    forces = [Wrench(force=rng.uniform(-500.0, 500.0, 3),
                     moment=rng.uniform(-200.0, 200.0, 3))
              for _ in range(args.count)]
    samples = identification.simulate_calibration(
        cfg.model, comps, poses, forces,
        noise_sigma=args.noise_sigma_mm * 1e-3, rng=rng)
    identification.samples_to_csv(samples, out)
    return 0


_COMMANDS = {
    "fk": _cmd_fk,
    "stiffness": _cmd_stiffness,
    "deflect": _cmd_deflect,
    "map": _cmd_map,
    "compare": _cmd_compare,
    "identify": _cmd_identify,
    "simulate-calib": _cmd_simulate_calib,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elastarm",
        description="Elastostatic analysis of serial manipulators with "
                    "spring gravity compensators.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="configuration file")
        p.add_argument("--output", help="output file (default: stdout)")
        p.add_argument("--dump-config", metavar="PATH",
                       help="write the parsed configuration back out in SI "
                            "units, then run the command")
        p.add_argument("--no-compensator", action="store_true",
                       help="drop the compensator (classical model only)")

    p = sub.add_parser("fk", help="forward kinematics at a configuration")
    common(p)
    p.add_argument("--q", help="joint angles in rad, comma separated "
                               "(default: config home_q, else zeros)")

    p = sub.add_parser("stiffness", help="Cartesian stiffness, both models")
    common(p)
    p.add_argument("--q", help="joint angles in rad (default: config "
                               "home_q, else zeros)")

    p = sub.add_parser("deflect", help="end effector deflection under load")
    common(p)
    p.add_argument("--q", help="joint angles in rad (default: config "
                               "home_q, else zeros)")
    p.add_argument("--force", help='wrench "fx,fy,fz,mx,my,mz" (N, N*m); '
                                   "overrides the [force] section")
    p.add_argument("--frame", choices=("world", "tool"), default="world",
                   help="frame of the wrench components (default: world)")

    for name, desc in (("map", "deflection map CSV over the workspace grid"),
                       ("compare", "compensated vs classical difference CSV "
                                   "with min/max/mean summary")):
        p = sub.add_parser(name, help=desc)
        common(p)
        p.add_argument("--force", help='wrench "fx,fy,fz,mx,my,mz"')
        p.add_argument("--frame", choices=("world", "tool"), default="world")
        p.add_argument("--grid", metavar="NxM",
                       help="override the grid resolution")

    p = sub.add_parser("identify", help="fit parameters to a samples CSV")
    common(p)
    p.add_argument("--samples", required=True, help="calibration samples CSV")
    p.add_argument("--fix", default="L,ax,ay",
                   help="comma separated parameters held at the config "
                        "values (default: L,ax,ay; pass '' to free all)")

    p = sub.add_parser("simulate-calib", help="generate synthetic samples CSV")
    common(p)
    p.add_argument("--count", type=int, default=200,
                   help="number of samples (default: 200)")
    p.add_argument("--noise-sigma-mm", type=float, default=0.05,
                   help="measurement noise sigma in mm (default: 0.05)")
    p.add_argument("--seed", type=int, default=0,
                   help="random seed (default: 0)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.dump_config:
            with open(args.dump_config, "w", encoding="utf-8", newline="") as f:
                f.write(dump_config(cfg))
        with _open_output(args.output) as out:
            return _COMMANDS[args.command](args, cfg, out)
    except ElastArmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 8


if __name__ == "__main__":
    sys.exit(main())
