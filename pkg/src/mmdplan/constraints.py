"""Velocity-obstacle collision cone and corridor boundary distances.

For a robot/obstacle pair with relative position ``r`` and relative velocity
``v`` (robot minus obstacle) and combined disc radius ``R``, the cone value

    f(r, v) = (r.v)^2 / |v|^2 - |r|^2 + R^2

is positive exactly when the current relative velocity leads the discs to
collide. Corridor boundaries are two lines ``a x + b y + c = 0``; the signed
normalized distance of the robot's next position to each line must keep the
robot inside the band (``d1 <= 0`` and ``d2 >= 0``).

Evaluating these functions across a particle cloud yields the empirical
constraint distributions the planner steers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionError
from .kinematics import ObstacleBelief, RobotBelief
from .sampling import WEIGHT_TOL

# Relative speeds below this are treated as a static pair (pure overlap test).
RELATIVE_SPEED_EPS = 1e-9

COLLISION_CONE = "collision_cone"
CORRIDOR_LOWER = "corridor_lower"
CORRIDOR_UPPER = "corridor_upper"
CONSTRAINT_KINDS = (COLLISION_CONE, CORRIDOR_LOWER, CORRIDOR_UPPER)


@dataclass(frozen=True)
class CorridorSpec:
    """Two boundary lines, each as coefficients (a, b, c) of a x + b y + c = 0.

    The interior is {d1 <= 0} for line1 intersected with {d2 >= 0} for line2;
    non-emptiness is checked at construction by sampling candidate points.
    """

    line1: tuple[float, float, float]
    line2: tuple[float, float, float]

    def __post_init__(self):
        for name, line in (("line1", self.line1), ("line2", self.line2)):
            line = tuple(float(x) for x in line)
            if len(line) != 3:
                raise ConfigurationError(f"{name}: expected 3 coefficients (a, b, c)")
            if line[0] == 0.0 and line[1] == 0.0:
                raise ConfigurationError(f"{name}: (a, b) must not both be zero")
            object.__setattr__(self, name, line)
        if not self._interior_nonempty():
            raise ConfigurationError(
                "line1/line2: corridor interior {d1 <= 0, d2 >= 0} is empty"
            )

    def _interior_nonempty(self, extent: float = 1000.0, steps: int = 41) -> bool:
        a1, b1, c1 = self.line1
        a2, b2, c2 = self.line2
        n1 = np.array([a1, b1]) / np.hypot(a1, b1)
        n2 = np.array([a2, b2]) / np.hypot(a2, b2)
        anchor1 = -c1 / np.hypot(a1, b1) * n1
        anchor2 = -c2 / np.hypot(a2, b2) * n2
        # Candidate points that witness every geometric case: the line
        # intersection (non-parallel), points on each line, and far points
        # along both normals (parallel half-planes opening the same way).
        candidates = [anchor1, anchor2]
        det = a1 * b2 - a2 * b1
        if abs(det) > 1e-12:
            candidates.append(
                np.array([(b1 * c2 - b2 * c1) / det, (a2 * c1 - a1 * c2) / det])
            )
        far = 1e6
        candidates += [far * n1, -far * n1, far * n2, -far * n2]
        # Plus a coarse patch around line1 for good measure.
        direction = np.array([-n1[1], n1[0]])
        ts = np.linspace(-extent, extent, steps)
        ss = np.linspace(-extent, extent, steps)
        patch = (
            anchor1[None, None, :]
            + ts[:, None, None] * direction[None, None, :]
            + ss[None, :, None] * n1[None, None, :]
        ).reshape(-1, 2)
        points = np.vstack([np.stack(candidates), patch])
        d1, d2 = corridor_distances(points, self)
        return bool(np.any((d1 <= 1e-9) & (d2 >= -1e-9)))


@dataclass(frozen=True)
class ConstraintSamples:
    """Empirical distribution of one constraint function across particles."""

    values: np.ndarray
    weights: np.ndarray
    kind: str
    obstacle_id: int | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if values.ndim != 1 or len(values) < 1:
            raise ConfigurationError(f"values: expected non-empty 1-D array, got {values.shape}")
        if weights.shape != values.shape:
            raise ConfigurationError(
                f"weights: expected shape {values.shape}, got {weights.shape}"
            )
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > WEIGHT_TOL:
            raise ConfigurationError("weights: must be non-negative and sum to 1")
        if self.kind not in CONSTRAINT_KINDS:
            raise ConfigurationError(f"kind: unknown constraint kind {self.kind!r}")
        values.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return len(self.values)

    def satisfied(self) -> np.ndarray:
        """Boolean mask of samples on the feasible side of the inequality."""
        if self.kind == CORRIDOR_UPPER:
            return self.values >= 0.0
        return self.values <= 0.0


def collision_cone(r: np.ndarray, v: np.ndarray, r_sum: float) -> float:
    """Cone value for relative position ``r``, relative velocity ``v`` (m^2).

    Positive exactly when the relative ray intersects the combined disc of
    radius ``r_sum``: while approaching (r.v < 0) this is the algebraic cone
    (r.v)^2/|v|^2 - |r|^2 + R^2; a receding or near-stationary pair reduces
    to the static overlap test R^2 - |r|^2 (the closest approach is now).
    """
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    rr = float(r @ r)
    vv = float(v @ v)
    if vv < RELATIVE_SPEED_EPS**2:
        return r_sum**2 - rr
    approach = min(0.0, float(r @ v))
    return approach * approach / vv - rr + r_sum**2


def corridor_distances(position: np.ndarray, spec: CorridorSpec):
    """Signed normalized distances (d1, d2) of ``position`` to the two lines.

    Accepts a single point ``(2,)`` or a batch ``(..., 2)``; returns floats or
    arrays accordingly.
    """
    position = np.asarray(position, dtype=float)
    out = []
    for a, b, c in (spec.line1, spec.line2):
        d = (a * position[..., 0] + b * position[..., 1] + c) / np.hypot(a, b)
        out.append(float(d) if d.ndim == 0 else d)
    return out[0], out[1]


def constraint_distribution(
    robot: RobotBelief,
    kind: str,
    obstacle: ObstacleBelief | None = None,
    corridor: CorridorSpec | None = None,
) -> ConstraintSamples:
    """Evaluate one constraint per particle pair (index ``i`` with index ``i``).

    ``robot`` is the belief after applying the candidate control for one step.
    Collision-cone kinds need ``obstacle``; corridor kinds need ``corridor``.
    Weights are copied from the robot belief.
    """
    if kind == COLLISION_CONE:
        if obstacle is None:
            raise ConfigurationError("obstacle: required for collision_cone distributions")
        if obstacle.n != robot.n:
            raise DimensionError(
                f"particle counts differ: robot has {robot.n}, obstacle has {obstacle.n}"
            )
        r = robot.positions - obstacle.positions
        v = robot.velocities - obstacle.velocities
        r_sum = robot.radius + obstacle.radius
        values = _cone_values(r, v, r_sum)
        return ConstraintSamples(
            values=values, weights=robot.weights, kind=kind, obstacle_id=obstacle.obstacle_id
        )
    if kind in (CORRIDOR_LOWER, CORRIDOR_UPPER):
        if corridor is None:
            raise ConfigurationError("corridor: required for corridor distributions")
        d1, d2 = corridor_distances(robot.positions, corridor)
        values = d1 if kind == CORRIDOR_LOWER else d2
        return ConstraintSamples(values=values, weights=robot.weights, kind=kind)
    raise ConfigurationError(f"kind: unknown constraint kind {kind!r}")


def _cone_values(r: np.ndarray, v: np.ndarray, r_sum: float) -> np.ndarray:
    """Vectorized cone evaluation over leading axes of ``r``/``v`` (..., 2)."""
    rr = np.sum(r * r, axis=-1)
    vv = np.sum(v * v, axis=-1)
    approach = np.minimum(0.0, np.sum(r * v, axis=-1))
    moving = vv >= RELATIVE_SPEED_EPS**2
    safe_vv = np.where(moving, vv, 1.0)
    return np.where(moving, approach * approach / safe_vv - rr + r_sum**2, r_sum**2 - rr)


def empirical_eta(samples: ConstraintSamples) -> float:
    """Weighted fraction of samples satisfying the constraint's inequality.

    This is the Monte-Carlo estimate of the chance-constraint satisfaction
    probability (reported as eta in diagnostics). Clamped to [0, 1] against
    weight-sum rounding.
    """
    return float(min(1.0, max(0.0, samples.weights @ samples.satisfied())))
