"""Estimation of joint compliances and compensator parameters.

The estimator fits the full parameter set (n joint compliances plus the
compensator's spring compliance, free length, lever length and anchor
coordinates) to measured translational deflections by damped
Gauss-Newton least squares with numeric central-difference Jacobians.
Positive parameters are optimized in log space; anchor coordinates are
unconstrained.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .elastostatics import Wrench, deflection_under_load, joint_stiffness
from .errors import (NonConvergenceError, SingularConfigurationError,
                     UnidentifiableSetError)
from .kinematics import Configuration, RobotModel
from .compensator import CompensatorParams

log = logging.getLogger(__name__)

# two-sided 97.5% standard normal quantile, for 95% confidence intervals
_Z95 = 1.959963984540054

# relative perturbation for numeric parameter Jacobians
_REL_STEP = 1e-6

# cond(J^T J) above which the parameter set is reported unidentifiable
_COND_LIMIT = 1e12

_FMT = "{:.9g}"


def parameter_names(n_joints: int) -> tuple[str, ...]:
    """Labels for the estimated vector: k1..kn, kc, s0, L, ax, ay."""
    return tuple(f"k{i + 1}" for i in range(n_joints)) + ("kc", "s0", "L", "ax", "ay")


def parameter_units(n_joints: int) -> tuple[str, ...]:
    return ("rad/(N.m)",) * n_joints + ("m/N", "m", "m", "m", "m")


@dataclass(frozen=True)
class CalibrationSample:
    """One loaded-pose measurement: q, applied wrench, deflection (m)."""

    q: np.ndarray
    wrench: Wrench
    measured_dp: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float).copy()
        dp = np.asarray(self.measured_dp, dtype=float).copy()
        if q.ndim != 1:
            raise ValueError("q must be a vector")
        if dp.shape != (3,):
            raise ValueError("measured_dp must be a 3-vector")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(dp))):
            raise ValueError("sample values must be finite")
        q.flags.writeable = False
        dp.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "measured_dp", dp)


@dataclass(frozen=True)
class ParameterEstimate:
    """Fit result: values, 95% CIs, covariance and identifiability flags."""

    values: np.ndarray
    ci95: np.ndarray
    residual_rms: float
    covariance: np.ndarray
    identifiable: np.ndarray
    names: tuple[str, ...]
    units: tuple[str, ...]
    iterations: int = 0

    def compensator(self, joint_index: int = 2) -> CompensatorParams:
        """Compensator parameters implied by the estimate."""
        n = len(self.values) - 5
        kc, s0, L, ax, ay = self.values[n:]
        return CompensatorParams(spring_stiffness=1.0 / kc, free_length=s0,
                                 lever_length=L, anchor_x=ax, anchor_y=ay,
                                 joint_index=joint_index)

    def joint_compliances(self) -> np.ndarray:
        return self.values[:len(self.values) - 5].copy()


def simulate_calibration(model: RobotModel, comps_true, poses, forces,
                         noise_sigma: float, rng=None) -> list[CalibrationSample]:
    """Synthetic calibration set from a ground-truth model.

    measured_dp is the predicted translational deflection plus i.i.d.
    zero-mean Gaussian noise per axis.  Singular poses are skipped with
    a warning.  Deterministic for a given ``rng`` seed.
    """
    if noise_sigma < 0:
        raise ValueError("noise sigma must be >= 0")
    rng = np.random.default_rng(rng)
    samples = []
    skipped = []
    for i, (q, F) in enumerate(zip(poses, forces)):
        cfg = Configuration.from_q(q)
        try:
            K = joint_stiffness(model, comps_true, cfg.q)
            d = deflection_under_load(model, K, cfg, F)
        except SingularConfigurationError:
            skipped.append(i)
            continue
        noise = rng.normal(0.0, noise_sigma, 3) if noise_sigma > 0 else np.zeros(3)
        samples.append(CalibrationSample(q=cfg.q, wrench=F,
                                         measured_dp=d.translation + noise))
    if skipped:
        log.warning("skipped %d singular calibration poses: %s",
                    len(skipped), skipped)
    return samples


def _predict_batch(model, Q, W, params, comp_joint0):
    """Translational deflections for all samples under a parameter vector."""
    n = model.n_joints
    k = params[:n]
    kc, s0, L, ax, ay = params[n:]
    base = 1.0 / k
    a = math.hypot(ax, ay)
    alpha = math.atan2(ay, ax)
    out = _kernels.deflection_batch(
        model._offsets, model._axes, model.tool_offset, Q, W, base,
        np.array([comp_joint0], dtype=np.int64),
        np.array([1.0 / kc]), np.array([a]), np.array([L]),
        np.array([s0]), np.array([alpha]))
    return out[:, :3]


def _normalize_columns(J):
    """Scale columns to unit norm so conditioning is unit-independent."""
    scale = np.linalg.norm(J, axis=0)
    scale[scale == 0] = 1.0
    return J / scale, scale


def _nullspace_combinations(J, names, tol_ratio=1e-6):
    """Human-readable near-null directions of the residual Jacobian."""
    Jn, _ = _normalize_columns(J)
    _, s, Vt = np.linalg.svd(Jn, full_matrices=False)
    combos = []
    cutoff = s[0] * tol_ratio if s[0] > 0 else 0.0
    for i in range(len(s)):
        if s[i] <= cutoff:
            terms = [f"{v:+.2f}*{name}" for v, name in zip(Vt[i], names)
                     if abs(v) > 0.2]
            combos.append(" ".join(terms) if terms else "(diffuse)")
    return combos


def _cond_sq(J):
    """Condition number of the normal equations, from normalized columns."""
    Jn, _ = _normalize_columns(J)
    s = np.linalg.svd(Jn, compute_uv=False)
    if s[-1] == 0:
        return float("inf")
    return float((s[0] / s[-1]) ** 2)


def identify(model_geometry: RobotModel, samples, initial_guess,
             compensator_joint: int = 2, max_iterations: int = 500,
             fixed: tuple = ()) -> ParameterEstimate:
    """Least-squares fit of compliances and compensator parameters.

    ``model_geometry`` supplies the chain (its own compliances are not
    used).  ``initial_guess`` orders parameters as k1..kn, kc, s0, L,
    ax, ay; all but ax, ay must be positive.  Confidence intervals come
    from the Gauss-Newton covariance at the solution; parameters whose
    95% CI exceeds 10x their estimate are flagged unidentifiable.

    ``fixed`` names parameters held at the initial guess (for example
    lever and anchor dimensions taken from mechanical drawings).  Fixed
    parameters are excluded from the fit and reported with zero CI.
    """
    n = model_geometry.n_joints
    npar = n + 5
    names = parameter_names(n)
    p0 = np.asarray(initial_guess, dtype=float)
    if p0.shape != (npar,):
        raise ValueError(f"initial guess must have {npar} entries, got {p0.shape}")
    n_pos = n + 3  # k1..kn, kc, s0, L are positive by reparameterization
    if np.any(p0[:n_pos] <= 0):
        raise ValueError("compliances, kc, s0 and L must start positive")
    unknown = set(fixed) - set(names)
    if unknown:
        raise ValueError(f"unknown fixed parameter names: {sorted(unknown)}")
    free = np.array([name not in fixed for name in names])
    free_idx = np.flatnonzero(free)
    free_names = tuple(names[i] for i in free_idx)
    nfree = len(free_idx)
    if nfree == 0:
        raise ValueError("all parameters fixed, nothing to estimate")

    samples = list(samples)
    m = len(samples)
    if 3 * m < nfree:
        raise UnidentifiableSetError(
            f"{3 * m} residual equations cannot determine {nfree} parameters")
    Q = np.ascontiguousarray([s.q for s in samples], dtype=float)
    W = np.ascontiguousarray([s.wrench.as_vector() for s in samples], dtype=float)
    D = np.asarray([s.measured_dp for s in samples], dtype=float)
    joint0 = compensator_joint - 1
    if not 0 <= joint0 < n:
        raise ValueError(f"compensator joint {compensator_joint} outside 1..{n}")

    z0_full = np.concatenate([np.log(p0[:n_pos]), p0[n_pos:]])

    def unpack(z):
        zf = z0_full.copy()
        zf[free_idx] = z
        p = np.empty(npar)
        p[:n_pos] = np.exp(zf[:n_pos])
        p[n_pos:] = zf[n_pos:]
        return p

    def residual(z):
        return (D - _predict_batch(model_geometry, Q, W, unpack(z), joint0)).ravel()

    def jacobian_z(z):
        # steps on log coordinates are relative steps on the parameters
        J = np.empty((3 * m, nfree))
        for col, j in enumerate(free_idx):
            h = _REL_STEP if j < n_pos else _REL_STEP * max(abs(z[col]), 1e-2)
            zp = z.copy()
            zp[col] += h
            zm = z.copy()
            zm[col] -= h
            J[:, col] = (residual(zp) - residual(zm)) / (2.0 * h)
        return J

    z = z0_full[free_idx].copy()
    r = residual(z)
    cost = float(r @ r)
    lam = 1e-3
    converged = False
    iterations = 0

    for iterations in range(1, max_iterations + 1):
        J = jacobian_z(z)
        if iterations == 1:
            cond2 = _cond_sq(J)
            if cond2 > _COND_LIMIT:
                raise UnidentifiableSetError(
                    f"normal equations rank deficient (cond {cond2:.3e}); "
                    "calibration poses do not excite all parameters",
                    combinations=_nullspace_combinations(J, free_names))
        JtJ = J.T @ J
        g = J.T @ r
        diag = np.diag(JtJ).copy()
        diag[diag <= 0] = 1.0
        # stop when the residual is orthogonal to the model tangent space,
        # the resolution limit of a finite-difference Jacobian
        colnorm = np.sqrt(diag)
        ortho = np.max(np.abs(g) / (colnorm * math.sqrt(cost) + 1e-300))
        if ortho < 1e-8:
            converged = True
            break
        accepted = False
        for _ in range(60):
            try:
                dz = np.linalg.solve(JtJ + lam * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            # cap the step so one bad linearization cannot shoot a log
            # parameter out of the representable range
            step = np.max(np.abs(dz))
            if step > 2.0:
                dz = dz * (2.0 / step)
            r_new = residual(z + dz)
            cost_new = float(r_new @ r_new)
            if cost_new <= cost:
                z = z + dz
                r = r_new
                drop = cost - cost_new
                cost = cost_new
                lam = max(lam * 0.3, 1e-14)
                accepted = True
                break
            lam *= 4.0
            if lam > 1e15:
                break
        if not accepted:
            # damping exhausted without an acceptable step: at a minimum
            converged = True
            break
        if np.max(np.abs(dz)) < 1e-8 or drop <= 1e-10 * max(cost, 1e-300):
            converged = True
            break

    if not converged:
        raise NonConvergenceError(
            f"estimator did not converge within {max_iterations} iterations "
            f"(cost {cost:.6e})")

    p_hat = unpack(z)

    # covariance from the raw-parameter Jacobian at the solution
    Jp = np.empty((3 * m, nfree))
    for col, j in enumerate(free_idx):
        h = _REL_STEP * max(abs(p_hat[j]), 1e-12)
        pp = p_hat.copy()
        pp[j] += h
        pm = p_hat.copy()
        pm[j] -= h
        rp = (D - _predict_batch(model_geometry, Q, W, pp, joint0)).ravel()
        rm = (D - _predict_batch(model_geometry, Q, W, pm, joint0)).ravel()
        Jp[:, col] = (rp - rm) / (2.0 * h)
    cond2 = _cond_sq(Jp)
    if cond2 > _COND_LIMIT:
        raise UnidentifiableSetError(
            f"normal equations rank deficient at the solution (cond {cond2:.3e})",
            combinations=_nullspace_combinations(Jp, free_names))

    sse = float(r @ r)
    dof = 3 * m - nfree
    sigma2 = sse / dof if dof > 0 else float("nan")
    # solve the normal equations on unit-norm columns for stability
    Jn, scale = _normalize_columns(Jp)
    cov_free = sigma2 * np.linalg.solve(Jn.T @ Jn, np.eye(nfree))
    cov_free = cov_free / np.outer(scale, scale)
    cov_free = 0.5 * (cov_free + cov_free.T)
    cov = np.zeros((npar, npar))
    cov[np.ix_(free_idx, free_idx)] = cov_free
    ci95 = _Z95 * np.sqrt(np.clip(np.diag(cov), 0.0, None))
    identifiable = (ci95 <= 10.0 * np.abs(p_hat)) | ~free
    return ParameterEstimate(values=p_hat, ci95=ci95,
                             residual_rms=math.sqrt(sse / (3 * m)),
                             covariance=cov, identifiable=identifiable,
                             names=names, units=parameter_units(n),
                             iterations=iterations)


def format_estimate(est: ParameterEstimate) -> str:
    """Plain-text report: parameter, unit, value, 95% CI, flag."""
    width = max(len("parameter"), *(len(s) for s in est.names))
    lines = [f"{'parameter':<{width + 2}}{'units':<12}{'value':>15}{'ci95':>15}"]
    for name, unit, value, ci, okflag in zip(est.names, est.units, est.values,
                                             est.ci95, est.identifiable):
        mark = "" if okflag else "  (unidentifiable)"
        lines.append(f"{name:<{width + 2}}{unit:<12}{value:>15.6e}{ci:>15.3e}{mark}")
    lines.append(f"residual rms [m]: {est.residual_rms:.6e}")
    lines.append(f"iterations: {est.iterations}")
    return "\n".join(lines) + "\n"


def samples_to_csv(samples, f) -> None:
    """Write calibration samples as CSV (q in rad, F in N / N*m, dp in m)."""
    if not samples:
        raise ValueError("no samples to write")
    n = samples[0].q.shape[0]
    f.write("# calibration samples: q in rad, forces in N, moments in N.m, "
            "deflections in m\n")
    qcols = ",".join(f"q{i + 1}" for i in range(n))
    f.write(f"{qcols},Fx,Fy,Fz,Mx,My,Mz,dx,dy,dz\n")
    for s in samples:
        row = list(s.q) + list(s.wrench.as_vector()) + list(s.measured_dp)
        f.write(",".join(_FMT.format(x) for x in row) + "\n")


def samples_from_csv(f) -> list[CalibrationSample]:
    """Read calibration samples written by ``samples_to_csv``."""
    header = None
    samples = []
    for raw in f:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = line.split(",")
            if len(header) < 10 or header[-9:] != ["Fx", "Fy", "Fz", "Mx", "My",
                                                   "Mz", "dx", "dy", "dz"]:
                raise ValueError(f"unexpected sample CSV header: {line!r}")
            continue
        vals = [float(x) for x in line.split(",")]
        if len(vals) != len(header):
            raise ValueError(f"row has {len(vals)} fields, header {len(header)}")
        n = len(vals) - 9
        samples.append(CalibrationSample(
            q=vals[:n], wrench=Wrench.from_vector(vals[n:n + 6]),
            measured_dp=vals[n + 6:]))
    return samples
