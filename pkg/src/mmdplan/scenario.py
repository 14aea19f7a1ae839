"""Declarative scenario descriptions and their YAML on-disk form.

A scenario file is human-readable YAML (key-value with nested sections); see
the canonical library under ``mmdplan/scenarios/``. All sample counts in one
scenario must agree because beliefs and noise are paired by index.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .constraints import CorridorSpec
from .controls import GoalSpec, PlannerWeights, build_grid
from .errors import ConfigurationError
from .rkhs import KernelConfig
from .sampling import MixtureComponent, NoiseSpec

METHODS = ("rkhs", "gauss-lin", "gauss-moment")

BUILTIN_SCENARIOS = (
    "head_on",
    "crossing",
    "five_obstacles",
    "static_cluster",
    "corridor",
    "boxed_in",
)


@dataclass(frozen=True)
class ObstacleSpec:
    """Initial obstacle state plus its observation noise."""

    position: tuple[float, float]
    velocity: tuple[float, float]
    radius: float
    noise: NoiseSpec

    def __post_init__(self):
        if self.radius <= 0:
            raise ConfigurationError(f"obstacle radius: must be positive, got {self.radius}")
        object.__setattr__(self, "position", tuple(float(x) for x in self.position))
        object.__setattr__(self, "velocity", tuple(float(x) for x in self.velocity))


@dataclass(frozen=True)
class RobotSpec:
    """Initial robot state plus its state noise."""

    position: tuple[float, float]
    heading: float
    radius: float
    noise: NoiseSpec

    def __post_init__(self):
        if self.radius <= 0:
            raise ConfigurationError(f"robot radius: must be positive, got {self.radius}")
        object.__setattr__(self, "position", tuple(float(x) for x in self.position))


@dataclass(frozen=True)
class GridSpec:
    """Control grid parameters; see :func:`mmdplan.controls.build_grid`."""

    v_bounds: tuple[float, float] = (0.0, 1.25)
    w_bounds: tuple[float, float] = (-1.2, 1.2)
    n_v: int = 15
    n_w: int = 15

    def build(self):
        return build_grid(self.v_bounds, self.w_bounds, self.n_v, self.n_w)


@dataclass(frozen=True)
class ScenarioSpec:
    """Complete closed-loop experiment description."""

    name: str
    robot: RobotSpec
    actuation: NoiseSpec
    goal: GoalSpec
    obstacles: tuple[ObstacleSpec, ...] = ()
    corridor: CorridorSpec | None = None
    dt: float = 0.25
    max_steps: int = 60
    grid: GridSpec = field(default_factory=GridSpec)
    kernel: KernelConfig = field(default_factory=KernelConfig)
    weights: PlannerWeights = field(default_factory=PlannerWeights)
    method: str = "rkhs"
    baseline_eta: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigurationError(f"dt: must be positive, got {self.dt}")
        if self.max_steps < 1:
            raise ConfigurationError(f"max_steps: must be >= 1, got {self.max_steps}")
        if self.method not in METHODS:
            raise ConfigurationError(f"method: expected one of {METHODS}, got {self.method!r}")
        if not 0.0 < self.baseline_eta < 1.0:
            raise ConfigurationError(
                f"baseline_eta: must lie strictly in (0, 1), got {self.baseline_eta}"
            )
        start = np.asarray(self.robot.position)
        goal = np.asarray(self.goal.position)
        if float(np.hypot(*(goal - start))) < 1e-9:
            raise ConfigurationError("goal.position: must be distinct from the robot start")
        v_lb, v_ub = self.grid.v_bounds
        if not v_lb <= self.goal.speed <= v_ub:
            raise ConfigurationError(
                f"goal.speed: {self.goal.speed} outside grid speed bounds {self.grid.v_bounds}"
            )
        counts = {self.robot.noise.sample_count, self.actuation.sample_count}
        counts.update(o.noise.sample_count for o in self.obstacles)
        if len(counts) != 1:
            raise ConfigurationError(
                f"samples: all noise sample counts must agree, got {sorted(counts)}"
            )

    @property
    def sample_count(self) -> int:
        return self.actuation.sample_count


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigurationError(f"{context}.{key}: missing required field")
    return mapping[key]


def _noise_from_dict(data: dict, context: str, default_count: int) -> NoiseSpec:
    if not isinstance(data, dict):
        raise ConfigurationError(f"{context}: expected a mapping, got {type(data).__name__}")
    kind = data.get("kind", "gaussian")
    count = int(data.get("count", default_count))
    components = tuple(
        MixtureComponent(
            mean=c.get("mean", 0.0), spread=c.get("spread", 0.0), weight=c.get("weight", 1.0)
        )
        for c in data.get("components", ())
    )
    return NoiseSpec(
        kind=kind,
        sample_count=count,
        mean=data.get("mean", 0.0),
        spread=data.get("spread", 0.0),
        low=data.get("low", 0.0),
        high=data.get("high", 0.0),
        components=components,
        path=data.get("path"),
    )


def scenario_from_dict(data: dict) -> ScenarioSpec:
    """Build and validate a scenario from its plain-dict (YAML) form."""
    if not isinstance(data, dict):
        raise ConfigurationError("scenario: expected a mapping at the top level")
    samples = int(data.get("samples", 25))
    if samples < 1:
        raise ConfigurationError(f"samples: must be >= 1, got {samples}")

    robot_data = _require(data, "robot", "scenario")
    robot = RobotSpec(
        position=tuple(_require(robot_data, "position", "robot")),
        heading=float(robot_data.get("heading", 0.0)),
        radius=float(_require(robot_data, "radius", "robot")),
        noise=_noise_from_dict(robot_data.get("noise", {}), "robot.noise", samples),
    )
    actuation = _noise_from_dict(data.get("actuation", {}), "actuation", samples)

    goal_data = _require(data, "goal", "scenario")
    goal = GoalSpec(
        position=tuple(_require(goal_data, "position", "goal")),
        speed=float(_require(goal_data, "speed", "goal")),
        tolerance=float(goal_data.get("tolerance", 0.2)),
    )

    obstacles = []
    for i, obs in enumerate(data.get("obstacles", []) or []):
        obstacles.append(
            ObstacleSpec(
                position=tuple(_require(obs, "position", f"obstacles[{i}]")),
                velocity=tuple(obs.get("velocity", (0.0, 0.0))),
                radius=float(_require(obs, "radius", f"obstacles[{i}]")),
                noise=_noise_from_dict(obs.get("noise", {}), f"obstacles[{i}].noise", samples),
            )
        )

    corridor = None
    if data.get("corridor"):
        cor = data["corridor"]
        corridor = CorridorSpec(
            line1=tuple(_require(cor, "line1", "corridor")),
            line2=tuple(_require(cor, "line2", "corridor")),
        )

    grid_data = data.get("grid", {})
    grid = GridSpec(
        v_bounds=tuple(grid_data.get("v", (0.0, 1.25))),
        w_bounds=tuple(grid_data.get("omega", (-1.2, 1.2))),
        n_v=int(grid_data.get("n_v", 15)),
        n_w=int(grid_data.get("n_omega", 15)),
    )

    kernel_data = data.get("kernel", {})
    kernel = KernelConfig(
        degree=int(kernel_data.get("degree", 3)),
        scale=float(kernel_data.get("scale", 1.0)),
        offset=float(kernel_data.get("offset", 1.0)),
    )

    weights_data = data.get("weights", {})
    corridor_weights = weights_data.get("corridor", (0.0, 0.0))
    if isinstance(corridor_weights, (int, float)):
        corridor_weights = (corridor_weights, corridor_weights)
    weights = PlannerWeights(
        collision=float(weights_data.get("collision", 1.0)),
        corridor_lower=float(corridor_weights[0]),
        corridor_upper=float(corridor_weights[1]),
        goal=float(weights_data.get("goal", 1.0)),
        control=float(weights_data.get("control", 0.1)),
        tracking=weights_data.get("tracking", "velocity"),
    )

    return ScenarioSpec(
        name=str(data.get("name", "scenario")),
        robot=robot,
        actuation=actuation,
        goal=goal,
        obstacles=tuple(obstacles),
        corridor=corridor,
        dt=float(data.get("dt", 0.25)),
        max_steps=int(data.get("max_steps", 60)),
        grid=grid,
        kernel=kernel,
        weights=weights,
        method=str(data.get("method", "rkhs")),
        baseline_eta=float(data.get("baseline_eta", 0.8)),
        seed=int(data.get("seed", 0)),
    )


def scenario_to_dict(spec: ScenarioSpec) -> dict:
    """Plain-dict form of a scenario, suitable for embedding in run logs."""
    def noise_dict(n: NoiseSpec) -> dict:
        return {
            "kind": n.kind,
            "count": n.sample_count,
            "mean": np.asarray(n.mean, dtype=float).tolist(),
            "spread": np.asarray(n.spread, dtype=float).tolist(),
            "low": np.asarray(n.low, dtype=float).tolist(),
            "high": np.asarray(n.high, dtype=float).tolist(),
            "components": [
                {
                    "mean": np.asarray(c.mean, dtype=float).tolist(),
                    "spread": np.asarray(c.spread, dtype=float).tolist(),
                    "weight": float(c.weight),
                }
                for c in n.components
            ],
            "path": n.path,
        }
    return {
        "name": spec.name,
        "seed": spec.seed,
        "dt": spec.dt,
        "max_steps": spec.max_steps,
        "samples": spec.sample_count,
        "method": spec.method,
        "baseline_eta": spec.baseline_eta,
        "robot": {
            "position": list(spec.robot.position),
            "heading": spec.robot.heading,
            "radius": spec.robot.radius,
            "noise": noise_dict(spec.robot.noise),
        },
        "actuation": noise_dict(spec.actuation),
        "goal": {
            "position": list(spec.goal.position),
            "speed": spec.goal.speed,
            "tolerance": spec.goal.tolerance,
        },
        "obstacles": [
            {
                "position": list(o.position),
                "velocity": list(o.velocity),
                "radius": o.radius,
                "noise": noise_dict(o.noise),
            }
            for o in spec.obstacles
        ],
        "corridor": (
            {"line1": list(spec.corridor.line1), "line2": list(spec.corridor.line2)}
            if spec.corridor
            else None
        ),
        "grid": {
            "v": list(spec.grid.v_bounds),
            "omega": list(spec.grid.w_bounds),
            "n_v": spec.grid.n_v,
            "n_omega": spec.grid.n_w,
        },
        "kernel": {
            "degree": spec.kernel.degree,
            "scale": spec.kernel.scale,
            "offset": spec.kernel.offset,
        },
        "weights": {
            "collision": spec.weights.collision,
            "corridor": [spec.weights.corridor_lower, spec.weights.corridor_upper],
            "goal": spec.weights.goal,
            "control": spec.weights.control,
            "tracking": spec.weights.tracking,
        },
    }


def load_scenario(source: str | Path) -> ScenarioSpec:
    """Load a scenario from a YAML file path or a builtin scenario name."""
    path = Path(source)
    if path.exists():
        try:
            data = yaml.safe_load(path.read_text())
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"scenario file {source}: invalid YAML: {exc}") from None
        return scenario_from_dict(data)
    name = str(source)
    if name in BUILTIN_SCENARIOS:
        text = resources.files("mmdplan").joinpath(f"scenarios/{name}.yaml").read_text()
        return scenario_from_dict(yaml.safe_load(text))
    raise ConfigurationError(
        f"scenario: {source!r} is neither a file nor a builtin name {BUILTIN_SCENARIOS}"
    )


def with_overrides(
    spec: ScenarioSpec,
    method: str | None = None,
    degree: int | None = None,
    seed: int | None = None,
) -> ScenarioSpec:
    """Copy of ``spec`` with the CLI-level knobs swapped out."""
    out = spec
    if method is not None:
        out = replace(out, method=method)
    if degree is not None:
        out = replace(out, kernel=replace(out.kernel, degree=int(degree)))
    if seed is not None:
        out = replace(out, seed=int(seed))
    return out
