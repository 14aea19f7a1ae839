"""Vectorized evaluation of many candidate controls against one belief state.

The planner sweeps a control grid; evaluating each control separately would
spend most of the step in Python overhead. These helpers broadcast the
unicycle propagation and the constraint functions over a whole control array
at once. Each element is computed independently, so splitting the control
axis into chunks (for worker pools) reproduces the exact same numbers.
"""

from __future__ import annotations

import numpy as np

from .constraints import CorridorSpec, _cone_values
from .errors import DimensionError
from .kinematics import ObstacleBelief, RobotBelief
from .sampling import WeightedSamples


def propagate_controls(
    robot: RobotBelief,
    controls: np.ndarray,
    noise: WeightedSamples,
    dt: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Propagate every particle under every control.

    controls: (m, 2) commanded (v, w) rows; noise values: (n, 2) paired with
    particles by index. Returns (positions, velocities), each (m, n, 2).
    """
    controls = np.asarray(controls, dtype=float)
    if noise.values.ndim != 2 or noise.values.shape != (robot.n, 2):
        raise DimensionError(
            f"actuation noise shape {noise.values.shape} does not match "
            f"{robot.n} particles"
        )
    v_eff = controls[:, 0][:, None] + noise.values[None, :, 0]  # (m, n)
    w_eff = controls[:, 1][:, None] + noise.values[None, :, 1]
    headings = robot.headings[None, :] + w_eff * dt
    velocities = v_eff[..., None] * np.stack([np.cos(headings), np.sin(headings)], axis=-1)
    positions = robot.positions[None, :, :] + dt * velocities
    return positions, velocities


def cone_values(
    positions: np.ndarray,
    velocities: np.ndarray,
    obstacle: ObstacleBelief,
    robot_radius: float,
) -> np.ndarray:
    """Collision-cone value per (control, particle) pair, shape (m, n)."""
    if obstacle.n != positions.shape[1]:
        raise DimensionError(
            f"particle counts differ: robot has {positions.shape[1]}, "
            f"obstacle has {obstacle.n}"
        )
    r = positions - obstacle.positions[None, :, :]
    v = velocities - obstacle.velocities[None, :, :]
    return _cone_values(r, v, robot_radius + obstacle.radius)


def corridor_values(
    positions: np.ndarray, corridor: CorridorSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Signed distances (d1, d2) per (control, particle) pair, each (m, n)."""
    out = []
    for a, b, c in (corridor.line1, corridor.line2):
        out.append((a * positions[..., 0] + b * positions[..., 1] + c) / np.hypot(a, b))
    return out[0], out[1]
