import numpy as np
import pytest

from mmdplan import ObstacleBelief, RobotBelief, WeightedSamples
from mmdplan.sampling import uniform_weights


def make_robot(
    positions,
    headings=None,
    velocities=None,
    weights=None,
    radius=0.4,
) -> RobotBelief:
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    n = len(positions)
    return RobotBelief(
        positions=positions,
        headings=np.zeros(n) if headings is None else np.asarray(headings, dtype=float),
        velocities=np.zeros((n, 2)) if velocities is None else np.asarray(velocities, dtype=float),
        weights=uniform_weights(n) if weights is None else np.asarray(weights, dtype=float),
        radius=radius,
    )


def make_obstacle(
    positions,
    velocities=None,
    weights=None,
    radius=0.4,
    obstacle_id=0,
) -> ObstacleBelief:
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    n = len(positions)
    return ObstacleBelief(
        positions=positions,
        velocities=np.zeros((n, 2)) if velocities is None else np.asarray(velocities, dtype=float),
        weights=uniform_weights(n) if weights is None else np.asarray(weights, dtype=float),
        radius=radius,
        obstacle_id=obstacle_id,
    )


def zero_noise(n: int) -> WeightedSamples:
    return WeightedSamples(values=np.zeros((n, 2)), weights=uniform_weights(n))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
