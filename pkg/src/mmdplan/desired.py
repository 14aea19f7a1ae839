"""Construction of the collision-free desired constraint distributions.

A nominal control is found by solving the deterministic problem on the mean
states (grid search; the cost surface has kinks and valleys that defeat
gradient methods). The constraint samples produced by that nominal control,
with violating samples filtered out, form the desired distributions the
planner matches. If filtering empties a set, the particles are contracted
toward their mean in stages until the set is non-empty; a fully contracted
set that still violates degenerates to the zero boundary value and is
flagged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import constraints as cs
from .controls import ControlGrid, GoalSpec, PlannerWeights, argmin_with_ties, tracking_costs
from .errors import ConfigurationError
from .kinematics import ControlInput, ObstacleBelief, RobotBelief, propagate_robot
from .sampling import WeightedSamples, uniform_weights

SHRINK_SCHEDULE = (1.0, 0.5, 0.25, 0.1, 0.0)


@dataclass(frozen=True)
class NominalSolution:
    """Best grid control for the mean-state problem."""

    control: ControlInput
    index: int
    feasible: bool


@dataclass(frozen=True)
class DesiredSet:
    """One filtered constraint distribution with its fallback provenance."""

    samples: cs.ConstraintSamples
    contraction: float
    degenerate: bool


@dataclass(frozen=True)
class DesiredDistributions:
    """Desired sets per obstacle plus the corridor pair, all at ``u_nom``."""

    u_nom: ControlInput
    cone_sets: tuple[DesiredSet, ...]
    lower: DesiredSet | None
    upper: DesiredSet | None


def solve_nominal(
    robot: RobotBelief,
    obstacles: Sequence[ObstacleBelief],
    corridor: cs.CorridorSpec | None,
    goal: GoalSpec,
    grid: ControlGrid,
    weights: PlannerWeights,
    dt: float,
) -> NominalSolution:
    """Deterministic mean-state argmin of the tracking cost over the grid.

    Feasibility means every collision cone is <= 0 and the corridor holds at
    the predicted next position. With no feasible grid control, the control
    with the least total constraint violation (sum of positive parts) is
    returned flagged infeasible.
    """
    if len(grid) < 1:
        raise ConfigurationError("grid: control grid is empty")
    position = robot.mean_position
    heading = robot.mean_heading
    controls = grid.controls
    theta = heading + controls[:, 1] * dt
    velocity = controls[:, 0][:, None] * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    next_position = position[None, :] + dt * velocity

    violation = np.zeros(len(grid))
    for obstacle in obstacles:
        r = next_position - obstacle.mean_position[None, :]
        v = velocity - obstacle.mean_velocity[None, :]
        f = cs._cone_values(r, v, robot.radius + obstacle.radius)
        violation += np.maximum(0.0, f)
    if corridor is not None:
        d1, d2 = cs.corridor_distances(next_position, corridor)
        violation += np.maximum(0.0, d1) + np.maximum(0.0, -d2)

    costs = tracking_costs(controls, position, heading, goal, weights, dt)
    feasible = violation == 0.0
    if feasible.any():
        index = argmin_with_ties(np.where(feasible, costs, np.inf))
        return NominalSolution(control=grid.control(index), index=index, feasible=True)
    index = argmin_with_ties(violation)
    return NominalSolution(control=grid.control(index), index=index, feasible=False)


def _contract_robot(robot: RobotBelief, factor: float) -> RobotBelief:
    mean_p = robot.mean_position
    mean_h = robot.mean_heading
    mean_v = robot.mean_velocity
    dh = np.mod(robot.headings - mean_h + np.pi, 2 * np.pi) - np.pi
    return RobotBelief(
        positions=mean_p + factor * (robot.positions - mean_p),
        headings=mean_h + factor * dh,
        velocities=mean_v + factor * (robot.velocities - mean_v),
        weights=robot.weights,
        radius=robot.radius,
    )


def _contract_obstacle(obstacle: ObstacleBelief, factor: float) -> ObstacleBelief:
    mean_p = obstacle.mean_position
    mean_v = obstacle.mean_velocity
    return ObstacleBelief(
        positions=mean_p + factor * (obstacle.positions - mean_p),
        velocities=mean_v + factor * (obstacle.velocities - mean_v),
        weights=obstacle.weights,
        radius=obstacle.radius,
        obstacle_id=obstacle.obstacle_id,
    )


def _contract_noise(noise: WeightedSamples, factor: float) -> WeightedSamples:
    mean = noise.weights @ noise.values
    return WeightedSamples(
        values=mean + factor * (noise.values - mean), weights=noise.weights
    )


def _search_desired_set(
    values_at: Callable[[float], np.ndarray],
    kind: str,
    obstacle_id: int | None,
    schedule: Sequence[float],
) -> DesiredSet:
    def singleton(value: float) -> cs.ConstraintSamples:
        return cs.ConstraintSamples(
            values=np.array([value]),
            weights=np.ones(1),
            kind=kind,
            obstacle_id=obstacle_id,
        )

    for factor in schedule:
        values = values_at(factor)
        probe = cs.ConstraintSamples(
            values=values, weights=uniform_weights(len(values)), kind=kind, obstacle_id=obstacle_id
        )
        mask = probe.satisfied()
        if factor == 0.0:
            # Fully contracted: all samples sit at the mean state.
            value = float(values[0])
            if bool(mask[0]):
                return DesiredSet(samples=singleton(value), contraction=0.0, degenerate=False)
            return DesiredSet(samples=singleton(0.0), contraction=0.0, degenerate=True)
        if mask.any():
            kept = values[mask]
            samples = cs.ConstraintSamples(
                values=kept,
                weights=uniform_weights(len(kept)),
                kind=kind,
                obstacle_id=obstacle_id,
            )
            return DesiredSet(samples=samples, contraction=factor, degenerate=False)
    return DesiredSet(samples=singleton(0.0), contraction=schedule[-1], degenerate=True)


def build_desired(
    u_nom: ControlInput,
    robot: RobotBelief,
    obstacles: Sequence[ObstacleBelief],
    corridor: cs.CorridorSpec | None,
    noise: WeightedSamples,
    dt: float,
    schedule: Sequence[float] = SHRINK_SCHEDULE,
) -> DesiredDistributions:
    """Filter the constraint samples at ``u_nom`` down to their feasible part.

    One desired set per obstacle collision cone, plus the two corridor sets
    when a corridor is configured; retained samples are reweighted uniformly.
    """

    def propagate_contracted(factor: float) -> RobotBelief:
        return propagate_robot(
            _contract_robot(robot, factor), u_nom, _contract_noise(noise, factor), dt
        )

    cone_sets = []
    for obstacle in obstacles:

        def cone_values_at(factor: float, obstacle=obstacle) -> np.ndarray:
            after = propagate_contracted(factor)
            shrunk = _contract_obstacle(obstacle, factor)
            return cs.constraint_distribution(
                after, cs.COLLISION_CONE, obstacle=shrunk
            ).values

        cone_sets.append(
            _search_desired_set(
                cone_values_at, cs.COLLISION_CONE, obstacle.obstacle_id, schedule
            )
        )

    lower = upper = None
    if corridor is not None:

        def corridor_values_at(kind: str) -> Callable[[float], np.ndarray]:
            def values_at(factor: float) -> np.ndarray:
                after = propagate_contracted(factor)
                return cs.constraint_distribution(after, kind, corridor=corridor).values

            return values_at

        lower = _search_desired_set(
            corridor_values_at(cs.CORRIDOR_LOWER), cs.CORRIDOR_LOWER, None, schedule
        )
        upper = _search_desired_set(
            corridor_values_at(cs.CORRIDOR_UPPER), cs.CORRIDOR_UPPER, None, schedule
        )

    return DesiredDistributions(
        u_nom=u_nom, cone_sets=tuple(cone_sets), lower=lower, upper=upper
    )
