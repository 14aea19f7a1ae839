"""Closed-loop scenario simulation, collision accounting and run logs.

One run repeats {plan -> execute the chosen control with freshly drawn
actuation noise -> advance obstacles -> re-estimate obstacle velocities}
until the mean robot position is within the goal tolerance or the step
budget runs out. Every random draw takes its seed from one deterministic
stream, so a (scenario, seed) pair reproduces its log byte for byte.

Wall-clock time is reported in sweep tables only, never in run logs, so the
logs stay comparable across machines and runs.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import constraints as cs
from .baselines import BaselinePlanResult, baseline_plan_step
from .controls import goal_greedy_index
from .desired import DesiredSet
from .kinematics import (
    ControlInput,
    ObstacleBelief,
    RobotBelief,
    advance_obstacle,
    estimate_obstacle_velocity,
    propagate_robot,
)
from .planner import PlanResult, cost_surface, plan_step
from .sampling import SeedStream, WeightedSamples, draw_noise, uniform_weights
from .scenario import ScenarioSpec, scenario_to_dict


def _unit_clamp(x: float) -> float:
    """Clamp a weighted fraction into [0, 1] against weight-sum rounding."""
    return float(min(1.0, max(0.0, x)))


@dataclass(frozen=True)
class StepRecord:
    """Everything logged about one executed step."""

    index: int
    v: float
    w: float
    cost: float
    robot_positions: np.ndarray
    obstacle_positions: dict[int, np.ndarray]
    eta: dict[int, float]
    corridor_eta: tuple[float, float] | None
    colliding_fraction: float
    corridor_violation_fraction: float | None
    infeasible: bool
    cone_samples: dict[int, np.ndarray]
    corridor_samples: tuple[np.ndarray, np.ndarray] | None
    desired_cone: dict[int, dict] | None
    desired_corridor: dict[str, dict] | None

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "control": {"v": self.v, "w": self.w},
            "cost": self.cost,
            "robot_positions": np.asarray(self.robot_positions).tolist(),
            "obstacle_positions": {
                str(k): np.asarray(v).tolist() for k, v in self.obstacle_positions.items()
            },
            "eta": {str(k): float(v) for k, v in self.eta.items()},
            "corridor_eta": list(self.corridor_eta) if self.corridor_eta else None,
            "colliding_fraction": self.colliding_fraction,
            "corridor_violation_fraction": self.corridor_violation_fraction,
            "infeasible": self.infeasible,
            "cone_samples": {
                str(k): np.asarray(v).tolist() for k, v in self.cone_samples.items()
            },
            "corridor_samples": (
                [np.asarray(v).tolist() for v in self.corridor_samples]
                if self.corridor_samples
                else None
            ),
            "desired_cone": self.desired_cone,
            "desired_corridor": self.desired_corridor,
        }


@dataclass(frozen=True)
class RunMetrics:
    """Aggregate quality measures of one run."""

    deviation: float
    control_cost: float
    steps: int
    reached: bool
    min_clearance: float | None
    collision_events: int

    def to_dict(self) -> dict:
        return {
            "deviation": self.deviation,
            "control_cost": self.control_cost,
            "steps": self.steps,
            "reached": self.reached,
            "min_clearance": self.min_clearance,
            "collision_events": self.collision_events,
        }


@dataclass(frozen=True)
class StepOutcome:
    """Pre-step state, plan result and log record of one executed step."""

    robot_before: RobotBelief
    obstacles_before: tuple[ObstacleBelief, ...]
    plan_noise: WeightedSamples
    result: PlanResult | BaselinePlanResult
    record: StepRecord


def _desired_set_dict(dset: DesiredSet) -> dict:
    return {
        "values": np.asarray(dset.samples.values).tolist(),
        "contraction": dset.contraction,
        "degenerate": dset.degenerate,
    }


class Simulation:
    """Stateful closed-loop runner for one scenario."""

    def __init__(self, spec: ScenarioSpec, workers: int = 1):
        self.spec = spec
        self.workers = workers
        self.grid = spec.grid.build()
        self.dt = spec.dt
        self._stream = SeedStream(spec.seed)
        n = spec.sample_count

        state_noise = draw_noise(spec.robot.noise, self._stream.next(), dimension=2)
        start = np.asarray(spec.robot.position, dtype=float)
        self.robot = RobotBelief(
            positions=start[None, :] + state_noise.values,
            headings=np.full(n, float(spec.robot.heading)),
            velocities=np.zeros((n, 2)),
            weights=uniform_weights(n),
            radius=spec.robot.radius,
        )

        self._truths: list[ObstacleBelief] = []
        self.obstacles: list[ObstacleBelief] = []
        for i, obs in enumerate(spec.obstacles):
            position = np.asarray(obs.position, dtype=float)
            velocity = np.asarray(obs.velocity, dtype=float)
            truth = ObstacleBelief(
                positions=np.tile(position, (n, 1)),
                velocities=np.tile(velocity, (n, 1)),
                weights=uniform_weights(n),
                radius=obs.radius,
                obstacle_id=i,
            )
            self._truths.append(truth)
            observation = draw_noise(obs.noise, self._stream.next(), dimension=2)
            self.obstacles.append(
                ObstacleBelief(
                    positions=truth.positions + observation.values,
                    velocities=truth.velocities,
                    weights=uniform_weights(n),
                    radius=obs.radius,
                    obstacle_id=i,
                )
            )

        self.steps_taken = 0
        self.records: list[StepRecord] = []
        self._mean_path = [self.robot.mean_position.copy()]
        self._control_cost = 0.0
        self._clearances = [self._clearance()]
        self._collision_events = 0

    # -- state queries ----------------------------------------------------

    def goal_reached(self) -> bool:
        offset = np.asarray(self.spec.goal.position) - self.robot.mean_position
        return float(np.hypot(*offset)) <= self.spec.goal.tolerance

    def done(self) -> bool:
        return self.goal_reached() or self.steps_taken >= self.spec.max_steps

    def _clearance(self) -> float | None:
        if not self.obstacles:
            return None
        gaps = []
        for obstacle in self.obstacles:
            offset = self.robot.mean_position - obstacle.mean_position
            gaps.append(float(np.hypot(*offset)) - self.robot.radius - obstacle.radius)
        return min(gaps)

    # -- one step ----------------------------------------------------------

    def advance(self) -> StepOutcome:
        """Plan and execute one step; returns the pre-step state and record."""
        spec = self.spec
        robot_before = self.robot
        obstacles_before = tuple(self.obstacles)
        plan_noise = draw_noise(spec.actuation, self._stream.next(), dimension=2)

        if spec.method == "rkhs":
            result = plan_step(
                robot_before,
                obstacles_before,
                spec.corridor,
                spec.goal,
                self.grid,
                spec.kernel,
                spec.weights,
                plan_noise,
                self.dt,
                workers=self.workers,
            )
            infeasible = not result.nominal.feasible
            desired_cone = {
                obs.obstacle_id: _desired_set_dict(dset)
                for obs, dset in zip(obstacles_before, result.desired.cone_sets)
            }
            desired_corridor = None
            if result.desired.lower is not None:
                desired_corridor = {
                    "lower": _desired_set_dict(result.desired.lower),
                    "upper": _desired_set_dict(result.desired.upper),
                }
        else:
            result = baseline_plan_step(
                robot_before,
                obstacles_before,
                spec.corridor,
                spec.goal,
                self.grid,
                spec.weights,
                plan_noise,
                self.dt,
                eta=spec.baseline_eta,
                variant=spec.method,
            )
            infeasible = result.infeasible
            desired_cone = None
            desired_corridor = None

        exec_noise = draw_noise(spec.actuation, self._stream.next(), dimension=2)
        self.robot = propagate_robot(robot_before, result.u_opt, exec_noise, self.dt)

        new_obstacles = []
        zero = WeightedSamples(
            values=np.zeros((spec.sample_count, 2)),
            weights=uniform_weights(spec.sample_count),
        )
        for i, obs_spec in enumerate(spec.obstacles):
            self._truths[i] = advance_obstacle(self._truths[i], zero, self.dt)
            observation = draw_noise(obs_spec.noise, self._stream.next(), dimension=2)
            observed = ObstacleBelief(
                positions=self._truths[i].positions + observation.values,
                velocities=self._truths[i].velocities,
                weights=self._truths[i].weights,
                radius=obs_spec.radius,
                obstacle_id=i,
            )
            new_obstacles.append(
                estimate_obstacle_velocity(self.obstacles[i], observed, self.dt)
            )
        self.obstacles = new_obstacles

        record = self._record(result, infeasible, desired_cone, desired_corridor)
        self.records.append(record)
        self.steps_taken += 1
        self._mean_path.append(self.robot.mean_position.copy())
        self._control_cost += result.u_opt.v**2 + result.u_opt.w**2
        clearance = self._clearance()
        if clearance is not None:
            self._clearances.append(clearance)
            if clearance < 0.0:
                self._collision_events += 1
        return StepOutcome(
            robot_before=robot_before,
            obstacles_before=obstacles_before,
            plan_noise=plan_noise,
            result=result,
            record=record,
        )

    def _record(
        self,
        result: PlanResult | BaselinePlanResult,
        infeasible: bool,
        desired_cone: dict | None,
        desired_corridor: dict | None,
    ) -> StepRecord:
        colliding = 0.0
        for obstacle in self.obstacles:
            gaps = np.hypot(
                *(self.robot.positions - obstacle.positions).T
            ) - (self.robot.radius + obstacle.radius)
            colliding = max(colliding, _unit_clamp(self.robot.weights @ (gaps < 0.0)))
        violation = None
        if self.spec.corridor is not None:
            d1, d2 = cs.corridor_distances(self.robot.positions, self.spec.corridor)
            violation = _unit_clamp(self.robot.weights @ ((d1 > 0.0) | (d2 < 0.0)))
        return StepRecord(
            index=self.steps_taken,
            v=result.u_opt.v,
            w=result.u_opt.w,
            cost=float(result.costs[result.index]),
            robot_positions=self.robot.positions,
            obstacle_positions={o.obstacle_id: o.positions for o in self.obstacles},
            eta=dict(result.eta),
            corridor_eta=result.corridor_eta,
            colliding_fraction=colliding,
            corridor_violation_fraction=violation,
            infeasible=infeasible,
            cone_samples=dict(result.cone_samples),
            corridor_samples=result.corridor_samples,
            desired_cone=desired_cone,
            desired_corridor=desired_corridor,
        )

    def surface(self) -> np.ndarray:
        """Cost table (v, w, q) for the current state; consumes one noise draw."""
        plan_noise = draw_noise(self.spec.actuation, self._stream.next(), dimension=2)
        return cost_surface(
            self.robot,
            tuple(self.obstacles),
            self.spec.corridor,
            self.spec.goal,
            self.grid,
            self.spec.kernel,
            self.spec.weights,
            plan_noise,
            self.dt,
            workers=self.workers,
        )

    # -- aggregates ---------------------------------------------------------

    def metrics(self) -> RunMetrics:
        path = np.asarray(self._mean_path)
        segments = np.diff(path, axis=0)
        path_length = float(np.sum(np.hypot(segments[:, 0], segments[:, 1]))) if len(segments) else 0.0
        start = path[0]
        end = path[-1]
        goal = np.asarray(self.spec.goal.position, dtype=float)
        straight = float(np.hypot(*(goal - start)))
        remaining = float(np.hypot(*(goal - end)))
        # Completion-adjusted deviation: path length plus the unfinished gap,
        # minus the straight start-goal distance; >= 0 by triangle inequality.
        deviation = max(0.0, path_length + remaining - straight)
        clearances = [c for c in self._clearances if c is not None]
        return RunMetrics(
            deviation=deviation,
            control_cost=self._control_cost,
            steps=self.steps_taken,
            reached=self.goal_reached(),
            min_clearance=min(clearances) if clearances else None,
            collision_events=self._collision_events,
        )


def run_scenario(
    spec: ScenarioSpec, workers: int = 1
) -> tuple[list[StepRecord], RunMetrics]:
    """Run a scenario to completion; deterministic in (spec, spec.seed)."""
    sim = Simulation(spec, workers=workers)
    while not sim.done():
        sim.advance()
    return sim.records, sim.metrics()


def run_log_json(
    spec: ScenarioSpec, records: Sequence[StepRecord], metrics: RunMetrics
) -> str:
    """Canonical JSON document for one run (sorted keys, no whitespace drift)."""
    log = {
        "scenario": scenario_to_dict(spec),
        "method": spec.method,
        "degree": spec.kernel.degree,
        "seed": spec.seed,
        "steps": [r.to_dict() for r in records],
        "metrics": metrics.to_dict(),
    }
    return json.dumps(log, sort_keys=True, separators=(",", ": "), indent=1)


def brute_force_eta(
    robot: RobotBelief,
    obstacle: ObstacleBelief,
    u: ControlInput,
    dt: float,
    noise: WeightedSamples | None = None,
) -> float:
    """All-pairs satisfaction oracle for the collision-cone chance constraint.

    Propagates the robot belief one step under ``u`` (paired actuation noise
    when given), then evaluates the cone for every robot-particle x
    obstacle-particle combination instead of pairing by index.
    """
    if noise is None:
        noise = WeightedSamples(
            values=np.zeros((robot.n, 2)), weights=uniform_weights(robot.n)
        )
    after = propagate_robot(robot, u, noise, dt)
    r = after.positions[:, None, :] - obstacle.positions[None, :, :]
    v = after.velocities[:, None, :] - obstacle.velocities[None, :, :]
    f = cs._cone_values(r, v, after.radius + obstacle.radius)
    pair_weights = np.outer(after.weights, obstacle.weights)
    return _unit_clamp(np.sum(pair_weights * (f <= 0.0)))


def greedy_control_index(sim: Simulation) -> int:
    """Grid index the pure goal-tracking controller would pick right now."""
    return goal_greedy_index(
        sim.grid,
        sim.robot.mean_position,
        sim.robot.mean_heading,
        sim.spec.goal,
        sim.spec.weights,
        sim.dt,
    )


SWEEP_COLUMNS = (
    "scenario",
    "method",
    "degree",
    "seed",
    "reached",
    "steps",
    "deviation",
    "control_cost",
    "min_clearance",
    "collision_events",
    "infeasible_steps",
    "wall_time_s",
)


def run_row(spec: ScenarioSpec, workers: int = 1) -> dict:
    """One sweep-table row: run the scenario and summarize it."""
    started = time.perf_counter()
    records, metrics = run_scenario(spec, workers=workers)
    elapsed = time.perf_counter() - started
    return {
        "scenario": spec.name,
        "method": spec.method,
        "degree": spec.kernel.degree,
        "seed": spec.seed,
        "reached": metrics.reached,
        "steps": metrics.steps,
        "deviation": metrics.deviation,
        "control_cost": metrics.control_cost,
        "min_clearance": metrics.min_clearance,
        "collision_events": metrics.collision_events,
        "infeasible_steps": sum(r.infeasible for r in records),
        "wall_time_s": elapsed,
    }


def ablation_sweep(
    spec: ScenarioSpec,
    degrees: Iterable[int],
    methods: Iterable[str],
    seeds: Iterable[int],
    workers: int = 1,
) -> list[dict]:
    """Run every (method, degree, seed) combination and tabulate the metrics."""
    from .scenario import with_overrides

    rows = []
    for method in methods:
        for degree in degrees:
            for seed in seeds:
                run_spec = with_overrides(spec, method=method, degree=degree, seed=seed)
                rows.append(run_row(run_spec, workers=workers))
    return rows


def metrics_csv(rows: Sequence[dict]) -> str:
    """Flat CSV of sweep rows in the fixed column order."""
    lines = [",".join(SWEEP_COLUMNS)]
    for row in rows:
        cells = []
        for column in SWEEP_COLUMNS:
            value = row.get(column)
            cells.append("" if value is None else str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
