"""Combinatorial Ricci flows for ideal circle patterns.

The four flows

    hyperbolic   dr_i/dt = (Kbar_i - K_i) sinh(r_i)      (Kbar = 0 by default)
    Euclidean    dr_i/dt = (Kbar_i - K_i) r_i            (Kbar = K_av by default)

are integrated in log coordinates ``u_i = ln tanh(r_i / 2)`` (hyperbolic)
and ``u_i = ln r_i`` (Euclidean), where both become ``du_i/dt = Kbar_i - K_i``.
Positivity of the radii is then automatic and, in the Euclidean case,
``sum(u)`` is a linear invariant of the vector field.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from .complex import WeightedComplex, euler_characteristic, triangulate, validate_b1
from .geometry import (
    CurvatureVector,
    Geometry,
    curvature_from_log,
    log_to_radii,
    radii_to_log,
)
from .integrate import DormandPrince, StepSizeUnderflow

__all__ = [
    "FlowError",
    "FlowStatus",
    "FlowConfig",
    "Trajectory",
    "RateEstimate",
    "ConservationReport",
    "FlowResult",
    "run_flow",
    "resolve_target",
    "conserved_quantities",
    "estimate_rate",
    "write_trajectory_csv",
]

SUM_TOL = 1e-9


class FlowError(ValueError):
    """Invalid flow input (B1 failure or configuration invariant violation)."""


class FlowStatus(str, enum.Enum):
    CONVERGED = "converged"
    COLLAPSED = "collapsed_to_zero"
    UNDETERMINED = "undetermined"


@dataclass
class FlowConfig:
    """Settings for :func:`run_flow`.

    ``target`` is ``"zero"``, ``"average"`` or a sequence of prescribed
    curvatures.  ``None`` selects zero curvature for hyperbolic runs and the
    average curvature ``2 pi chi / N`` for Euclidean runs.
    """

    geometry: Geometry | str = Geometry.HYPERBOLIC
    target: str | Sequence[float] | np.ndarray | None = None
    initial_radii: Sequence[float] | np.ndarray | None = None
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    convergence_eps: float = 1e-10
    collapse_floor: float = -50.0
    max_time: float = 500.0
    sample_stride: float = 0.01
    max_step: float = 0.5

    def __post_init__(self):
        self.geometry = Geometry.parse(self.geometry)


@dataclass
class Trajectory:
    geometry: Geometry
    times: np.ndarray
    log_radii: np.ndarray  # (samples, N)
    gap_supnorm: np.ndarray

    @property
    def radii(self) -> np.ndarray:
        return log_to_radii(self.geometry, self.log_radii)

    @property
    def conserved_sum(self) -> np.ndarray:
        """``sum(ln r_i)`` at every sample."""
        if self.geometry is Geometry.EUCLIDEAN:
            return self.log_radii.sum(axis=1)
        return np.log(self.radii).sum(axis=1)

    def __len__(self) -> int:
        return len(self.times)


@dataclass
class RateEstimate:
    slope: float
    intercept: float
    r_squared: float
    samples: int
    quantity: str


@dataclass
class ConservationReport:
    applicable: bool
    max_drift: float = float("nan")
    threshold: float = float("nan")

    @property
    def passed(self) -> bool | None:
        return None if not self.applicable else bool(self.max_drift < self.threshold)


@dataclass
class FlowResult:
    status: FlowStatus
    final_radii: np.ndarray
    final_curvature: CurvatureVector
    trajectory: Trajectory
    rate_estimate: RateEstimate | None
    conservation: ConservationReport
    time: float
    steps: int
    rejected_steps: int
    function_evaluations: int
    message: str = ""
    final_log_radii: np.ndarray = field(default=None, repr=False)

    @property
    def gap_supnorm(self) -> float:
        return float(np.max(np.abs(self.final_curvature.gap())))


def resolve_target(c: WeightedComplex, cfg: FlowConfig) -> np.ndarray:
    """Target curvature vector after checking the configuration invariants."""
    n = c.vertex_count
    chi = euler_characteristic(c)
    target = cfg.target
    if target is None:
        target = "zero" if cfg.geometry is Geometry.HYPERBOLIC else "average"
    if isinstance(target, str):
        if target == "zero":
            kbar = np.zeros(n)
        elif target == "average":
            if cfg.geometry is not Geometry.EUCLIDEAN:
                raise FlowError("the average-curvature flow is Euclidean only")
            kbar = np.full(n, 2 * math.pi * chi / n)
        else:
            raise FlowError(f"unknown target {target!r}")
    else:
        kbar = np.asarray(target, dtype=float)
        if kbar.shape != (n,):
            raise FlowError(f"prescribed curvature must have {n} entries")
    if not np.all(np.isfinite(kbar)) or np.any(kbar >= 2 * math.pi):
        raise FlowError("prescribed curvatures must be finite and below 2 pi")
    if cfg.geometry is Geometry.EUCLIDEAN:
        total = math.fsum(kbar)
        if abs(total - 2 * math.pi * chi) > SUM_TOL:
            raise FlowError(
                f"Euclidean targets must sum to 2 pi chi = {2 * math.pi * chi:.12g}, "
                f"got {total:.12g}"
            )
    return kbar


def _initial_log(c: WeightedComplex, cfg: FlowConfig) -> np.ndarray:
    r0 = np.ones(c.vertex_count) if cfg.initial_radii is None else np.asarray(cfg.initial_radii, float)
    if r0.shape != (c.vertex_count,):
        raise FlowError(f"initial radii must have {c.vertex_count} entries")
    if not np.all(np.isfinite(r0)) or np.any(r0 <= 0):
        raise FlowError("initial radii must be positive and finite")
    return radii_to_log(cfg.geometry, r0)


def run_flow(c: WeightedComplex, cfg: FlowConfig) -> FlowResult:
    """Integrate the flow until convergence, collapse or the time budget.

    Terminal classification:

    * converged: ``max |K - Kbar| < convergence_eps``;
    * collapsed: every ``u_i`` is below ``collapse_floor`` and the largest
      radius has been strictly decreasing over the recent samples;
    * undetermined: ``max_time`` reached or the step size underflowed.
    """
    b1 = validate_b1(c)
    if not b1.passed:
        raise FlowError(
            f"face angle-sum condition fails (max residual {b1.max_abs_residual:.3g})"
        )
    if not (cfg.abs_tol > 0 and cfg.rel_tol >= 0 and cfg.convergence_eps > 0 and cfg.max_time > 0):
        raise FlowError("tolerances, eps and max_time must be positive")
    kbar = resolve_target(c, cfg)
    u0 = _initial_log(c, cfg)
    g = cfg.geometry
    tri = triangulate(c)

    def rhs(_t, u):
        return kbar - curvature_from_log(tri, g, u)

    stepper = DormandPrince(rhs, 0.0, u0, cfg.abs_tol, cfg.rel_tol, max_step=cfg.max_step)
    times = [0.0]
    samples = [u0.copy()]
    gaps = [float(np.max(np.abs(stepper.dy)))]
    status = FlowStatus.UNDETERMINED
    message = ""
    steps = rejected = 0
    peak_history = [float(np.max(u0))]

    if gaps[0] < cfg.convergence_eps:
        status = FlowStatus.CONVERGED
        message = "initial state already satisfies the target"
    else:
        while True:
            try:
                info = stepper.step(cfg.max_time)
            except StepSizeUnderflow as exc:
                message = str(exc)
                break
            steps += 1
            rejected += info.rejected
            gap = float(np.max(np.abs(info.dy)))
            if not np.all(np.isfinite(info.y)):
                message = "non-finite state"
                break
            done_conv = gap < cfg.convergence_eps
            peak = float(np.max(info.y))
            done_collapse = peak < cfg.collapse_floor and _decreasing_tail(peak_history + [peak])
            if info.t - times[-1] >= cfg.sample_stride or done_conv or done_collapse or info.t >= cfg.max_time:
                times.append(info.t)
                samples.append(info.y.copy())
                gaps.append(gap)
                peak_history.append(peak)
            if done_conv:
                status = FlowStatus.CONVERGED
                break
            if done_collapse:
                status = FlowStatus.COLLAPSED
                break
            if info.t >= cfg.max_time:
                message = f"time budget {cfg.max_time:g} exhausted"
                break

    traj = Trajectory(g, np.asarray(times), np.asarray(samples), np.asarray(gaps))
    u_final = stepper.y
    k_final = kbar - stepper.dy
    rate = None
    try:
        rate = estimate_rate(traj, "collapse" if status is FlowStatus.COLLAPSED else "gap")
    except ValueError:
        pass
    return FlowResult(
        status=status,
        final_radii=log_to_radii(g, u_final),
        final_curvature=CurvatureVector(k_final, kbar),
        trajectory=traj,
        rate_estimate=rate,
        conservation=conserved_quantities(cfg, traj),
        time=stepper.t,
        steps=steps,
        rejected_steps=rejected,
        function_evaluations=stepper.nfev,
        message=message,
        final_log_radii=u_final.copy(),
    )


def _decreasing_tail(history: list[float], length: int = 5) -> bool:
    if len(history) < length + 1:
        return False
    tail = np.asarray(history[-(length + 1):])
    return bool(np.all(np.diff(tail) < 0))


def conserved_quantities(cfg: FlowConfig, trajectory: Trajectory) -> ConservationReport:
    """Drift of ``sum(ln r_i)`` along a Euclidean run; not applicable otherwise."""
    if Geometry.parse(cfg.geometry) is not Geometry.EUCLIDEAN:
        return ConservationReport(applicable=False)
    s = trajectory.log_radii.sum(axis=1)
    n = trajectory.log_radii.shape[1]
    return ConservationReport(True, float(np.max(np.abs(s - s[0]))), SUM_TOL * n)


def estimate_rate(trajectory: Trajectory, quantity: str = "gap",
                  min_samples: int = 20) -> RateEstimate:
    """Least-squares exponential rate over the trailing half of the samples.

    ``quantity="gap"`` fits ``ln(max |K - Kbar|)`` against time;
    ``quantity="collapse"`` fits ``max_i u_i``, which is
    ``ln tanh(r_max / 2)`` for hyperbolic runs and ``ln r_max`` otherwise.
    """
    n = len(trajectory)
    tail = slice(n // 2, n)
    t = trajectory.times[tail]
    if quantity == "gap":
        y = trajectory.gap_supnorm[tail]
        ok = y > 0
        t, y = t[ok], np.log(y[ok])
    elif quantity == "collapse":
        y = trajectory.log_radii[tail].max(axis=1)
    else:
        raise ValueError(f"unknown quantity {quantity!r}")
    if len(t) < min_samples:
        raise ValueError(f"need at least {min_samples} tail samples, have {len(t)}")
    fit = stats.linregress(t, y)
    return RateEstimate(float(fit.slope), float(fit.intercept), float(fit.rvalue**2), len(t), quantity)


def write_trajectory_csv(trajectory: Trajectory, path: str | Path) -> None:
    """Columns ``t, r_1..r_N, gap_supnorm, conserved_sum``."""
    radii = trajectory.radii
    cons = trajectory.conserved_sum
    n = radii.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"r_{i + 1}" for i in range(n)] + ["gap_supnorm", "conserved_sum"])
        for k in range(len(trajectory)):
            w.writerow([repr(float(trajectory.times[k]))]
                       + [repr(float(x)) for x in radii[k]]
                       + [repr(float(trajectory.gap_supnorm[k])), repr(float(cons[k]))])
