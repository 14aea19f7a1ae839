"""Control selection: grid sweep minimizing the MMD-augmented MPC cost.

For every candidate control the robot belief is propagated one step under
the shared actuation-noise samples, the empirical constraint distributions
are formed, and their squared MMD to the desired (collision-free) sets is
added to the tracking cost:

    q(u) = J(u) + lambda * sum_j mmd^2(F_j, F_j_des)
                + lambda_1 * mmd^2(D1, D1_des) + lambda_2 * mmd^2(D2, D2_des)

The argmin over the grid is returned, ties broken by the lowest grid index.
Per-control evaluations are independent, so the sweep may be chunked across
workers without changing any output bit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import constraints as cs
from ._batch import cone_values, corridor_values, propagate_controls
from .controls import ControlGrid, GoalSpec, PlannerWeights, argmin_with_ties, tracking_costs
from .desired import (
    SHRINK_SCHEDULE,
    DesiredDistributions,
    NominalSolution,
    build_desired,
    solve_nominal,
)
from .errors import ConfigurationError
from .kinematics import ControlInput, ObstacleBelief, RobotBelief, propagate_robot
from .rkhs import KernelConfig, mmd_squared_rows
from .sampling import WeightedSamples


@dataclass(frozen=True)
class PlanResult:
    """Chosen control plus the diagnostics of the sweep that produced it."""

    u_opt: ControlInput
    index: int
    costs: np.ndarray
    tracking: np.ndarray
    nominal: NominalSolution
    desired: DesiredDistributions
    eta: dict[int, float]
    corridor_eta: tuple[float, float] | None
    cone_samples: dict[int, np.ndarray]
    corridor_samples: tuple[np.ndarray, np.ndarray] | None


def _mmd_terms(
    robot: RobotBelief,
    obstacles: Sequence[ObstacleBelief],
    corridor: cs.CorridorSpec | None,
    desired: DesiredDistributions,
    kernel: KernelConfig,
    weights: PlannerWeights,
    noise: WeightedSamples,
    dt: float,
    controls: np.ndarray,
) -> np.ndarray:
    """Summed distribution-matching cost for each control row."""
    total = np.zeros(len(controls))
    need_cones = weights.collision > 0.0 and len(obstacles) > 0
    need_lower = corridor is not None and weights.corridor_lower > 0.0
    need_upper = corridor is not None and weights.corridor_upper > 0.0
    if not (need_cones or need_lower or need_upper):
        return total
    positions, velocities = propagate_controls(robot, controls, noise, dt)
    if need_cones:
        for obstacle, dset in zip(obstacles, desired.cone_sets):
            f = cone_values(positions, velocities, obstacle, robot.radius)
            total += weights.collision * mmd_squared_rows(
                f, robot.weights, dset.samples.values, dset.samples.weights, kernel
            )
    if need_lower or need_upper:
        d1, d2 = corridor_values(positions, corridor)
        if need_lower:
            total += weights.corridor_lower * mmd_squared_rows(
                d1, robot.weights, desired.lower.samples.values,
                desired.lower.samples.weights, kernel,
            )
        if need_upper:
            total += weights.corridor_upper * mmd_squared_rows(
                d2, robot.weights, desired.upper.samples.values,
                desired.upper.samples.weights, kernel,
            )
    return total


def plan_step(
    robot: RobotBelief,
    obstacles: Sequence[ObstacleBelief],
    corridor: cs.CorridorSpec | None,
    goal: GoalSpec,
    grid: ControlGrid,
    kernel: KernelConfig,
    weights: PlannerWeights,
    noise: WeightedSamples,
    dt: float,
    workers: int = 1,
    schedule: Sequence[float] = SHRINK_SCHEDULE,
) -> PlanResult:
    """One planning step: desired-set construction plus the full grid sweep."""
    if len(grid) < 1:
        raise ConfigurationError("grid: control grid is empty")
    nominal = solve_nominal(robot, obstacles, corridor, goal, grid, weights, dt)
    desired = build_desired(
        nominal.control, robot, obstacles, corridor, noise, dt, schedule
    )

    tracking = tracking_costs(
        grid.controls, robot.mean_position, robot.mean_heading, goal, weights, dt
    )
    if workers <= 1:
        terms = _mmd_terms(
            robot, obstacles, corridor, desired, kernel, weights, noise, dt, grid.controls
        )
    else:
        chunks = np.array_split(np.arange(len(grid)), workers)
        chunks = [chunk for chunk in chunks if len(chunk)]
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            pieces = list(
                pool.map(
                    lambda chunk: _mmd_terms(
                        robot, obstacles, corridor, desired, kernel, weights,
                        noise, dt, grid.controls[chunk],
                    ),
                    chunks,
                )
            )
        terms = np.concatenate(pieces)
    costs = tracking + terms

    index = argmin_with_ties(costs)
    u_opt = grid.control(index)

    after = propagate_robot(robot, u_opt, noise, dt)
    eta: dict[int, float] = {}
    cone_samples: dict[int, np.ndarray] = {}
    for obstacle in obstacles:
        dist = cs.constraint_distribution(after, cs.COLLISION_CONE, obstacle=obstacle)
        eta[obstacle.obstacle_id] = cs.empirical_eta(dist)
        cone_samples[obstacle.obstacle_id] = dist.values
    corridor_eta = None
    corridor_samples = None
    if corridor is not None:
        lower = cs.constraint_distribution(after, cs.CORRIDOR_LOWER, corridor=corridor)
        upper = cs.constraint_distribution(after, cs.CORRIDOR_UPPER, corridor=corridor)
        corridor_eta = (cs.empirical_eta(lower), cs.empirical_eta(upper))
        corridor_samples = (lower.values, upper.values)

    return PlanResult(
        u_opt=u_opt,
        index=index,
        costs=costs,
        tracking=tracking,
        nominal=nominal,
        desired=desired,
        eta=eta,
        corridor_eta=corridor_eta,
        cone_samples=cone_samples,
        corridor_samples=corridor_samples,
    )


def cost_surface(
    robot: RobotBelief,
    obstacles: Sequence[ObstacleBelief],
    corridor: cs.CorridorSpec | None,
    goal: GoalSpec,
    grid: ControlGrid,
    kernel: KernelConfig,
    weights: PlannerWeights,
    noise: WeightedSamples,
    dt: float,
    workers: int = 1,
) -> np.ndarray:
    """Full-grid cost table: rows (v, w, q) in the grid's row-major order."""
    result = plan_step(
        robot, obstacles, corridor, goal, grid, kernel, weights, noise, dt, workers
    )
    return np.column_stack([grid.controls, result.costs])


def format_cost_surface(table: np.ndarray) -> str:
    """Tab-separated text rows ``v<TAB>w<TAB>q``, one per grid control."""
    lines = ["\t".join(repr(float(x)) for x in row) for row in np.asarray(table)]
    return "\n".join(lines) + "\n"
