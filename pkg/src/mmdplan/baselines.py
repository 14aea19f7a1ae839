"""Gaussian-approximation baselines for the distribution-matching planner.

Two standard ways to replace a non-parametric chance constraint with a
deterministic surrogate:

* ``gauss-lin``: first-order Taylor expansion of the collision cone about the
  mean relative state; the cone's mean and variance follow from the gradient
  and the sample covariance of the stacked (relative position, relative
  velocity) particles.
* ``gauss-moment``: mean and variance taken directly from the empirical cone
  samples, with no linearization.

Either summary feeds the one-sided Cantelli test: a constraint ``g <= 0``
holding with probability at least ``eta`` is replaced by
``mean + sqrt(eta / (1 - eta)) * std <= 0`` (mirrored for ``>= 0``), which is
valid for any distribution with that mean and variance. The baseline planner
minimizes the tracking cost over the controls whose surrogates all hold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import constraints as cs
from ._batch import cone_values, corridor_values, propagate_controls
from .controls import ControlGrid, GoalSpec, PlannerWeights, argmin_with_ties, tracking_costs
from .errors import ConfigurationError
from .kinematics import ControlInput, ObstacleBelief, RobotBelief, propagate_robot
from .sampling import WeightedSamples, uniform_weights

VARIANT_LINEARIZED = "gauss-lin"
VARIANT_MOMENT = "gauss-moment"
VARIANTS = (VARIANT_LINEARIZED, VARIANT_MOMENT)

SENSE_LEQ = "<=0"
SENSE_GEQ = ">=0"


@dataclass(frozen=True)
class GaussianSummary:
    """Mean and variance of one scalar constraint value."""

    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0:
            raise ConfigurationError(f"variance: must be >= 0, got {self.variance}")


def cone_and_gradient(
    r: np.ndarray, v: np.ndarray, r_sum: float
) -> tuple[float, np.ndarray]:
    """Cone value and its gradient in the stacked (r, v) variables.

    Receding or near-stationary pairs sit on the overlap-test branch, whose
    gradient has no velocity component.
    """
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    vv = float(v @ v)
    rv = float(r @ v)
    if vv < cs.RELATIVE_SPEED_EPS**2 or rv >= 0.0:
        value = r_sum**2 - float(r @ r)
        return value, np.concatenate([-2.0 * r, np.zeros(2)])
    value = rv * rv / vv - float(r @ r) + r_sum**2
    grad_r = 2.0 * rv / vv * v - 2.0 * r
    grad_v = 2.0 * rv / vv * r - 2.0 * rv * rv / vv**2 * v
    return value, np.concatenate([grad_r, grad_v])


def linearized_cone_summary(
    robot: RobotBelief,
    obstacle: ObstacleBelief,
    u: ControlInput,
    dt: float,
    noise: WeightedSamples | None = None,
) -> GaussianSummary:
    """Gaussian summary of the cone under ``u`` by linearizing about the means.

    The robot belief is propagated one step under ``u`` (with the paired
    actuation noise when given); the variance is g' Sigma g for the cone
    gradient g at the mean relative state and the sample covariance Sigma of
    the stacked (relative position, relative velocity) particles.
    """
    if noise is None:
        noise = WeightedSamples(
            values=np.zeros((robot.n, 2)), weights=uniform_weights(robot.n)
        )
    after = propagate_robot(robot, u, noise, dt)
    stacked = np.concatenate(
        [after.positions - obstacle.positions, after.velocities - obstacle.velocities],
        axis=1,
    )
    weights = after.weights
    mean = weights @ stacked
    dev = stacked - mean
    cov = np.einsum("n,ni,nj->ij", weights, dev, dev)
    value, grad = cone_and_gradient(mean[:2], mean[2:], robot.radius + obstacle.radius)
    variance = float(max(0.0, grad @ cov @ grad))
    return GaussianSummary(mean=value, variance=variance)


def sample_moment_summary(values: np.ndarray, weights: np.ndarray) -> GaussianSummary:
    """Weighted mean/variance of empirical constraint samples."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    mean = float(weights @ values)
    variance = float(max(0.0, weights @ (values - mean) ** 2))
    return GaussianSummary(mean=mean, variance=variance)


def _cantelli_k(eta: float) -> float:
    if not 0.0 < eta < 1.0:
        raise ConfigurationError(f"eta: must lie strictly in (0, 1), got {eta}")
    return float(np.sqrt(eta / (1.0 - eta)))


def surrogate_satisfied(summary: GaussianSummary, eta: float, sense: str) -> bool:
    """Distribution-free test that the constraint holds with probability >= eta."""
    k = _cantelli_k(eta)
    std = float(np.sqrt(summary.variance))
    if sense == SENSE_LEQ:
        return summary.mean + k * std <= 0.0
    if sense == SENSE_GEQ:
        return summary.mean - k * std >= 0.0
    raise ConfigurationError(f"sense: expected {SENSE_LEQ!r} or {SENSE_GEQ!r}, got {sense!r}")


def surrogate_margin(summary: GaussianSummary, eta: float, sense: str) -> float:
    """Violation amount of the surrogate (0 when satisfied)."""
    k = _cantelli_k(eta)
    std = float(np.sqrt(summary.variance))
    if sense == SENSE_LEQ:
        return max(0.0, summary.mean + k * std)
    if sense == SENSE_GEQ:
        return max(0.0, -(summary.mean - k * std))
    raise ConfigurationError(f"sense: expected {SENSE_LEQ!r} or {SENSE_GEQ!r}, got {sense!r}")


@dataclass(frozen=True)
class BaselinePlanResult:
    """Baseline control choice plus sweep diagnostics."""

    u_opt: ControlInput
    index: int
    costs: np.ndarray
    feasible: np.ndarray
    infeasible: bool
    eta: dict[int, float]
    corridor_eta: tuple[float, float] | None
    cone_samples: dict[int, np.ndarray]
    corridor_samples: tuple[np.ndarray, np.ndarray] | None


def _linearized_cone_rows(
    positions: np.ndarray,
    velocities: np.ndarray,
    obstacle: ObstacleBelief,
    robot_radius: float,
    weights: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-control (mean, variance) of the linearized cone, each (m,)."""
    r = positions - obstacle.positions[None, :, :]
    v = velocities - obstacle.velocities[None, :, :]
    z = np.concatenate([r, v], axis=2)  # (m, n, 4)
    mean_z = np.einsum("n,mnj->mj", weights, z)
    dev = z - mean_z[:, None, :]
    cov = np.einsum("n,mni,mnj->mij", weights, dev, dev)

    r_sum = robot_radius + obstacle.radius
    mr, mv = mean_z[:, :2], mean_z[:, 2:]
    rr = np.sum(mr * mr, axis=1)
    vv = np.sum(mv * mv, axis=1)
    rv = np.sum(mr * mv, axis=1)
    cone_branch = (vv >= cs.RELATIVE_SPEED_EPS**2) & (rv < 0.0)
    safe_vv = np.where(cone_branch, vv, 1.0)
    mean_f = np.where(cone_branch, rv * rv / safe_vv - rr + r_sum**2, r_sum**2 - rr)
    coef = np.where(cone_branch, rv / safe_vv, 0.0)
    grad_r = 2.0 * coef[:, None] * mv - 2.0 * mr
    grad_v = 2.0 * coef[:, None] * mr - 2.0 * (coef**2)[:, None] * mv
    grad = np.concatenate([grad_r, grad_v], axis=1)
    variance = np.maximum(0.0, np.einsum("mi,mij,mj->m", grad, cov, grad))
    return mean_f, variance


def _moment_rows(values: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-control (mean, variance) straight from sample rows (m, n)."""
    mean = values @ weights
    variance = np.maximum(0.0, ((values - mean[:, None]) ** 2) @ weights)
    return mean, variance


def _corridor_linear_rows(
    positions: np.ndarray, corridor: cs.CorridorSpec, weights: np.ndarray
) -> tuple[tuple[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """Exact per-control (mean, variance) of both corridor distances."""
    mean_p = np.einsum("n,mnj->mj", weights, positions)
    dev = positions - mean_p[:, None, :]
    cov = np.einsum("n,mni,mnj->mij", weights, dev, dev)
    out = []
    for a, b, c in (corridor.line1, corridor.line2):
        h = np.array([a, b]) / np.hypot(a, b)
        mean_d = (a * mean_p[:, 0] + b * mean_p[:, 1] + c) / np.hypot(a, b)
        variance = np.maximum(0.0, np.einsum("i,mij,j->m", h, cov, h))
        out.append((mean_d, variance))
    return out[0], out[1]


def baseline_plan_step(
    robot: RobotBelief,
    obstacles: Sequence[ObstacleBelief],
    corridor: cs.CorridorSpec | None,
    goal: GoalSpec,
    grid: ControlGrid,
    weights: PlannerWeights,
    noise: WeightedSamples,
    dt: float,
    eta: float = 0.8,
    variant: str = VARIANT_LINEARIZED,
) -> BaselinePlanResult:
    """Tracking-cost argmin over controls whose surrogate constraints hold.

    When no grid control satisfies every surrogate, the control with the
    least total surrogate violation is returned flagged infeasible.
    """
    if variant not in VARIANTS:
        raise ConfigurationError(f"variant: expected one of {VARIANTS}, got {variant!r}")
    k = _cantelli_k(eta)
    positions, velocities = propagate_controls(robot, grid.controls, noise, dt)
    pw = robot.weights

    checks: list[tuple[np.ndarray, np.ndarray, str]] = []  # (mean, variance, sense)
    for obstacle in obstacles:
        if variant == VARIANT_LINEARIZED:
            mean, variance = _linearized_cone_rows(
                positions, velocities, obstacle, robot.radius, pw
            )
        else:
            f = cone_values(positions, velocities, obstacle, robot.radius)
            mean, variance = _moment_rows(f, pw)
        checks.append((mean, variance, SENSE_LEQ))
    if corridor is not None:
        if variant == VARIANT_LINEARIZED:
            (m1, v1), (m2, v2) = _corridor_linear_rows(positions, corridor, pw)
        else:
            d1, d2 = corridor_values(positions, corridor)
            m1, v1 = _moment_rows(d1, pw)
            m2, v2 = _moment_rows(d2, pw)
        checks.append((m1, v1, SENSE_LEQ))
        checks.append((m2, v2, SENSE_GEQ))

    feasible = np.ones(len(grid), dtype=bool)
    # Fallback ranking uses the expected violation, not the Cantelli-shifted
    # margin: the linearized variance vanishes on the cone axis (the gradient
    # is zero at dead aim), which would otherwise make the fallback favor
    # exactly the collision-course controls.
    violation = np.zeros(len(grid))
    for mean, variance, sense in checks:
        std = np.sqrt(variance)
        if sense == SENSE_LEQ:
            feasible &= mean + k * std <= 0.0
            violation += np.maximum(0.0, mean)
        else:
            feasible &= mean - k * std >= 0.0
            violation += np.maximum(0.0, -mean)

    costs = tracking_costs(
        grid.controls, robot.mean_position, robot.mean_heading, goal, weights, dt
    )
    if feasible.any():
        index = argmin_with_ties(np.where(feasible, costs, np.inf))
        infeasible = False
    else:
        index = argmin_with_ties(violation)
        infeasible = True
    u_opt = grid.control(index)

    after = propagate_robot(robot, u_opt, noise, dt)
    emp_eta: dict[int, float] = {}
    cone_samples: dict[int, np.ndarray] = {}
    for obstacle in obstacles:
        dist = cs.constraint_distribution(after, cs.COLLISION_CONE, obstacle=obstacle)
        emp_eta[obstacle.obstacle_id] = cs.empirical_eta(dist)
        cone_samples[obstacle.obstacle_id] = dist.values
    corridor_eta = None
    corridor_samples = None
    if corridor is not None:
        lower = cs.constraint_distribution(after, cs.CORRIDOR_LOWER, corridor=corridor)
        upper = cs.constraint_distribution(after, cs.CORRIDOR_UPPER, corridor=corridor)
        corridor_eta = (cs.empirical_eta(lower), cs.empirical_eta(upper))
        corridor_samples = (lower.values, upper.values)

    return BaselinePlanResult(
        u_opt=u_opt,
        index=index,
        costs=costs,
        feasible=feasible,
        infeasible=infeasible,
        eta=emp_eta,
        corridor_eta=corridor_eta,
        cone_samples=cone_samples,
        corridor_samples=corridor_samples,
    )
