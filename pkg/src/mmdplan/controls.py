"""Feasible control grid, planner weights, goal and tracking cost."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .kinematics import ControlInput

TIE_TOL = 1e-12


@dataclass(frozen=True)
class ControlGrid:
    """The candidate control set: a (speed x angular speed) lattice.

    Speeds are v_lb + i * (v_ub - v_lb) / n_v for i = 1..n_v (half-open on
    the lower bound), likewise angular speeds; controls are stored row-major
    (every angular speed for the first speed, then the next speed...). The
    fixed ordering is the tie-breaking order for argmin selections.
    """

    v_bounds: tuple[float, float]
    w_bounds: tuple[float, float]
    n_v: int
    n_w: int
    controls: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        (v_lb, v_ub), (w_lb, w_ub) = self.v_bounds, self.w_bounds
        if not v_ub > v_lb:
            raise ConfigurationError(f"v_bounds: need upper > lower, got {self.v_bounds}")
        if not w_ub > w_lb:
            raise ConfigurationError(f"w_bounds: need upper > lower, got {self.w_bounds}")
        if self.n_v < 1 or self.n_w < 1:
            raise ConfigurationError(f"n_v/n_w: must be >= 1, got {self.n_v}, {self.n_w}")
        speeds = v_lb + np.arange(1, self.n_v + 1) * (v_ub - v_lb) / self.n_v
        rates = w_lb + np.arange(1, self.n_w + 1) * (w_ub - w_lb) / self.n_w
        controls = np.stack(
            [np.repeat(speeds, self.n_w), np.tile(rates, self.n_v)], axis=1
        )
        controls.flags.writeable = False
        object.__setattr__(self, "controls", controls)

    def __len__(self) -> int:
        return self.n_v * self.n_w

    @property
    def speeds(self) -> np.ndarray:
        return np.unique(self.controls[:, 0])

    @property
    def rates(self) -> np.ndarray:
        return self.controls[: self.n_w, 1]

    def control(self, index: int) -> ControlInput:
        v, w = self.controls[index]
        return ControlInput(v=float(v), w=float(w))


def build_grid(
    v_bounds: tuple[float, float],
    w_bounds: tuple[float, float],
    n_v: int,
    n_w: int,
) -> ControlGrid:
    """Build the control lattice; bounds are (lower, upper) with upper > lower."""
    return ControlGrid(
        v_bounds=(float(v_bounds[0]), float(v_bounds[1])),
        w_bounds=(float(w_bounds[0]), float(w_bounds[1])),
        n_v=int(n_v),
        n_w=int(n_w),
    )


@dataclass(frozen=True)
class PlannerWeights:
    """Cost weights: distribution-matching terms plus goal/control effort.

    ``tracking`` selects the tracking-error space: "velocity" compares the
    mean achieved velocity against the desired velocity toward the goal;
    "position" compares the predicted next position against the position one
    step along that desired velocity.
    """

    collision: float = 1.0
    corridor_lower: float = 0.0
    corridor_upper: float = 0.0
    goal: float = 1.0
    control: float = 0.1
    tracking: str = "velocity"

    def __post_init__(self):
        for name in ("collision", "corridor_lower", "corridor_upper", "goal", "control"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name}: weight must be >= 0")
        if self.tracking not in ("velocity", "position"):
            raise ConfigurationError(
                f"tracking: expected 'velocity' or 'position', got {self.tracking!r}"
            )


@dataclass(frozen=True)
class GoalSpec:
    """Goal position with the speed the robot prefers while heading there."""

    position: tuple[float, float]
    speed: float
    tolerance: float = 0.2

    def __post_init__(self):
        if self.speed <= 0:
            raise ConfigurationError(f"speed: must be positive, got {self.speed}")
        if self.tolerance <= 0:
            raise ConfigurationError(f"tolerance: must be positive, got {self.tolerance}")
        object.__setattr__(self, "position", tuple(float(x) for x in self.position))

    def desired_velocity(self, position: np.ndarray) -> np.ndarray:
        """Preferred speed along the unit vector from ``position`` to the goal."""
        offset = np.asarray(self.position, dtype=float) - np.asarray(position, dtype=float)
        distance = float(np.hypot(offset[0], offset[1]))
        if distance < 1e-12:
            return np.zeros(2)
        return self.speed * offset / distance


def tracking_costs(
    controls: np.ndarray,
    position: np.ndarray,
    heading: float,
    goal: GoalSpec,
    weights: PlannerWeights,
    dt: float,
) -> np.ndarray:
    """Tracking-plus-effort cost of each control row, evaluated on the mean state.

    goal-weight * ||achieved - desired||^2 + control-weight * (v^2 + w^2),
    with achieved/desired in the space picked by ``weights.tracking``.
    """
    controls = np.asarray(controls, dtype=float)
    theta = heading + controls[:, 1] * dt
    velocity = controls[:, 0][:, None] * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    desired = goal.desired_velocity(position)
    if weights.tracking == "velocity":
        err = velocity - desired[None, :]
    else:
        err = (position[None, :] + dt * velocity) - (position + dt * desired)[None, :]
    tracking = np.sum(err * err, axis=1)
    effort = np.sum(controls * controls, axis=1)
    return weights.goal * tracking + weights.control * effort


def tracking_cost(
    u: ControlInput,
    position: np.ndarray,
    heading: float,
    goal: GoalSpec,
    weights: PlannerWeights,
    dt: float,
) -> float:
    """Cost of a single control; see :func:`tracking_costs`."""
    return float(
        tracking_costs(u.as_array()[None, :], position, heading, goal, weights, dt)[0]
    )


def argmin_with_ties(costs: np.ndarray, tol: float = TIE_TOL) -> int:
    """Lowest index whose cost is within ``tol`` of the minimum."""
    costs = np.asarray(costs, dtype=float)
    return int(np.argmax(costs <= costs.min() + tol))


def goal_greedy_index(
    grid: ControlGrid,
    position: np.ndarray,
    heading: float,
    goal: GoalSpec,
    weights: PlannerWeights,
    dt: float,
) -> int:
    """Grid index of the pure tracking-cost minimizer (no constraint terms)."""
    return argmin_with_ties(
        tracking_costs(grid.controls, position, heading, goal, weights, dt)
    )
