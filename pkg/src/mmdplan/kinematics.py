"""Particle beliefs and their propagation under unicycle kinematics.

The robot state is a cloud of ``n`` weighted particles (position, heading,
velocity). A commanded control ``(v, w)`` is perturbed per particle by an
actuation noise sample, the heading integrates the angular rate, and the
position integrates the resulting world-frame velocity:

    theta' = theta + (w + dw) * dt
    vel'   = (v + dv) * (cos theta', sin theta')
    pos'   = pos + dt * vel'

Obstacles carry position/velocity particles; their velocities are estimated
by finite differences of successive position clouds.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, DimensionError
from .sampling import WEIGHT_TOL, WeightedSamples


def _check_weights(weights: np.ndarray, n: int):
    if weights.shape != (n,):
        raise ConfigurationError(f"weights: expected shape ({n},), got {weights.shape}")
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > WEIGHT_TOL:
        raise ConfigurationError("weights: must be non-negative and sum to 1")


@dataclass(frozen=True)
class RobotBelief:
    """Weighted particle cloud over the robot state.

    positions (n, 2) meters, headings (n,) radians, velocities (n, 2) m/s.
    """

    positions: np.ndarray
    headings: np.ndarray
    velocities: np.ndarray
    weights: np.ndarray
    radius: float

    def __post_init__(self):
        positions = np.array(self.positions, dtype=float)
        headings = np.array(self.headings, dtype=float)
        velocities = np.array(self.velocities, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if positions.ndim != 2 or positions.shape[1] != 2 or len(positions) < 1:
            raise ConfigurationError(f"positions: expected (n, 2) array, got {positions.shape}")
        n = len(positions)
        if headings.shape != (n,):
            raise ConfigurationError(f"headings: expected shape ({n},), got {headings.shape}")
        if velocities.shape != (n, 2):
            raise ConfigurationError(f"velocities: expected shape ({n}, 2), got {velocities.shape}")
        _check_weights(weights, n)
        if self.radius <= 0:
            raise ConfigurationError(f"radius: must be positive, got {self.radius}")
        for arr in (positions, headings, velocities, weights):
            arr.flags.writeable = False
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "headings", headings)
        object.__setattr__(self, "velocities", velocities)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def mean_position(self) -> np.ndarray:
        return self.weights @ self.positions

    @property
    def mean_heading(self) -> float:
        """Weighted circular mean of the particle headings."""
        s = self.weights @ np.sin(self.headings)
        c = self.weights @ np.cos(self.headings)
        return float(np.arctan2(s, c))

    @property
    def mean_velocity(self) -> np.ndarray:
        return self.weights @ self.velocities


@dataclass(frozen=True)
class ObstacleBelief:
    """Weighted particle cloud over one obstacle's position and velocity."""

    positions: np.ndarray
    velocities: np.ndarray
    weights: np.ndarray
    radius: float
    obstacle_id: int = 0

    def __post_init__(self):
        positions = np.array(self.positions, dtype=float)
        velocities = np.array(self.velocities, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if positions.ndim != 2 or positions.shape[1] != 2 or len(positions) < 1:
            raise ConfigurationError(f"positions: expected (n, 2) array, got {positions.shape}")
        n = len(positions)
        if velocities.shape != (n, 2):
            raise ConfigurationError(f"velocities: expected shape ({n}, 2), got {velocities.shape}")
        _check_weights(weights, n)
        if self.radius <= 0:
            raise ConfigurationError(f"radius: must be positive, got {self.radius}")
        for arr in (positions, velocities, weights):
            arr.flags.writeable = False
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "velocities", velocities)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def mean_position(self) -> np.ndarray:
        return self.weights @ self.positions

    @property
    def mean_velocity(self) -> np.ndarray:
        return self.weights @ self.velocities


@dataclass(frozen=True)
class ControlInput:
    """Commanded (linear speed, angular speed) pair."""

    v: float
    w: float

    def as_array(self) -> np.ndarray:
        return np.array([self.v, self.w], dtype=float)


def propagate_robot(
    belief: RobotBelief,
    u: ControlInput,
    noise: WeightedSamples,
    dt: float,
) -> RobotBelief:
    """Advance every particle one step under ``u`` plus its paired noise sample.

    ``noise.values`` must be ``(n, 2)`` samples of (dv, dw), paired with the
    particles by index. Weights and radius are preserved.
    """
    if noise.values.ndim != 2 or noise.values.shape != (belief.n, 2):
        raise DimensionError(
            f"actuation noise shape {noise.values.shape} does not match "
            f"{belief.n} particles"
        )
    v_eff = u.v + noise.values[:, 0]
    w_eff = u.w + noise.values[:, 1]
    headings = belief.headings + w_eff * dt
    velocities = v_eff[:, None] * np.stack([np.cos(headings), np.sin(headings)], axis=1)
    positions = belief.positions + dt * velocities
    return RobotBelief(
        positions=positions,
        headings=headings,
        velocities=velocities,
        weights=belief.weights,
        radius=belief.radius,
    )


def estimate_obstacle_velocity(
    prev: ObstacleBelief,
    curr: ObstacleBelief,
    dt: float,
) -> ObstacleBelief:
    """Attach finite-difference velocities to ``curr``: (curr - prev) / dt."""
    if dt <= 0:
        raise ConfigurationError(f"dt: must be positive, got {dt}")
    if prev.n != curr.n:
        raise DimensionError(f"particle counts differ: prev has {prev.n}, curr has {curr.n}")
    if prev.obstacle_id != curr.obstacle_id:
        raise DimensionError(
            f"obstacle ids differ: prev is {prev.obstacle_id}, curr is {curr.obstacle_id}"
        )
    velocities = (curr.positions - prev.positions) / dt
    return replace(curr, velocities=velocities)


def advance_obstacle(
    belief: ObstacleBelief,
    process_noise: WeightedSamples,
    dt: float,
) -> ObstacleBelief:
    """Constant-velocity step: position += dt * velocity + noise_i per particle."""
    if process_noise.values.ndim != 2 or process_noise.values.shape != (belief.n, 2):
        raise DimensionError(
            f"process noise shape {process_noise.values.shape} does not match "
            f"{belief.n} particles"
        )
    positions = belief.positions + dt * belief.velocities + process_noise.values
    return replace(belief, positions=positions)
