import numpy as np
import pytest
from hypothesis import given, strategies as st

from mmdplan import (
    ConfigurationError,
    ControlInput,
    DimensionError,
    WeightedSamples,
    advance_obstacle,
    estimate_obstacle_velocity,
    propagate_robot,
)
from mmdplan.sampling import uniform_weights

from conftest import make_obstacle, make_robot, zero_noise


def test_straight_line_step():
    robot = make_robot([[0.0, 0.0]])
    after = propagate_robot(robot, ControlInput(v=1.0, w=0.0), zero_noise(1), dt=0.1)
    assert np.allclose(after.velocities, [[1.0, 0.0]])
    assert np.allclose(after.positions, [[0.1, 0.0]])


def test_quarter_turn_velocity():
    # w * dt = pi/2 rotates the velocity to the +y axis.
    robot = make_robot([[0.0, 0.0]])
    after = propagate_robot(robot, ControlInput(v=1.0, w=5 * np.pi), zero_noise(1), dt=0.1)
    assert np.allclose(after.velocities, [[0.0, 1.0]], atol=1e-12)


def test_zero_speed_turns_in_place():
    robot = make_robot([[2.0, 3.0]], headings=[0.3])
    after = propagate_robot(robot, ControlInput(v=0.0, w=0.5), zero_noise(1), dt=0.2)
    assert np.allclose(after.positions, [[2.0, 3.0]])
    assert np.allclose(after.headings, [0.3 + 0.5 * 0.2])


def test_zero_noise_zero_turn_moves_along_heading():
    headings = np.array([0.0, 0.7, -1.2, 2.5])
    robot = make_robot(np.zeros((4, 2)), headings=headings)
    dt, v = 0.25, 0.8
    after = propagate_robot(robot, ControlInput(v=v, w=0.0), zero_noise(4), dt=dt)
    expected = dt * v * np.stack([np.cos(headings), np.sin(headings)], axis=1)
    assert np.allclose(after.positions, expected, atol=1e-12)


def test_velocity_magnitude_matches_commanded_plus_noise():
    noise = WeightedSamples(
        values=np.array([[0.1, 0.0], [-0.2, 0.4]]), weights=uniform_weights(2)
    )
    robot = make_robot(np.zeros((2, 2)), headings=[0.4, -0.9])
    u = ControlInput(v=1.0, w=0.3)
    after = propagate_robot(robot, u, noise, dt=0.25)
    speeds = np.hypot(after.velocities[:, 0], after.velocities[:, 1])
    assert np.allclose(speeds, np.abs(u.v + noise.values[:, 0]), atol=1e-12)


def test_propagation_preserves_weights_and_count():
    weights = np.array([0.2, 0.3, 0.5])
    robot = make_robot(np.zeros((3, 2)), weights=weights)
    after = propagate_robot(robot, ControlInput(v=0.5, w=0.1), zero_noise(3), dt=0.1)
    assert after.n == 3
    assert np.array_equal(after.weights, weights)


def test_noise_count_mismatch_raises():
    robot = make_robot(np.zeros((3, 2)))
    with pytest.raises(DimensionError):
        propagate_robot(robot, ControlInput(v=1.0, w=0.0), zero_noise(2), dt=0.1)


def test_stationary_obstacle_velocity_estimate_is_zero():
    prev = make_obstacle(np.ones((4, 2)))
    curr = make_obstacle(np.ones((4, 2)))
    est = estimate_obstacle_velocity(prev, curr, dt=0.5)
    assert np.all(est.velocities == 0.0)


def test_finite_difference_velocity():
    prev = make_obstacle([[0.0, 0.0]])
    curr = make_obstacle([[1.0, 0.0]])
    est = estimate_obstacle_velocity(prev, curr, dt=0.5)
    assert np.allclose(est.velocities, [[2.0, 0.0]])
    assert np.array_equal(est.positions, curr.positions)


def test_velocity_estimate_count_mismatch_raises():
    prev = make_obstacle(np.zeros((2, 2)))
    curr = make_obstacle(np.zeros((3, 2)))
    with pytest.raises(DimensionError):
        estimate_obstacle_velocity(prev, curr, dt=0.5)


def test_velocity_estimate_id_mismatch_raises():
    prev = make_obstacle(np.zeros((2, 2)), obstacle_id=0)
    curr = make_obstacle(np.zeros((2, 2)), obstacle_id=1)
    with pytest.raises(DimensionError):
        estimate_obstacle_velocity(prev, curr, dt=0.5)


def test_velocity_estimate_needs_positive_dt():
    belief = make_obstacle(np.zeros((2, 2)))
    with pytest.raises(ConfigurationError):
        estimate_obstacle_velocity(belief, belief, dt=0.0)


def test_advance_obstacle_zero_velocity_zero_noise_is_identity():
    belief = make_obstacle([[1.0, 2.0], [3.0, 4.0]])
    after = advance_obstacle(belief, zero_noise(2), dt=1.0)
    assert np.array_equal(after.positions, belief.positions)


def test_advance_obstacle_exact_integration():
    belief = make_obstacle(np.zeros((3, 2)), velocities=np.tile([1.0, 0.0], (3, 1)))
    after = advance_obstacle(belief, zero_noise(3), dt=1.0)
    assert np.allclose(after.positions, np.tile([1.0, 0.0], (3, 1)))


def test_advance_obstacle_symmetric_noise_keeps_mean_shift():
    # Two particles with +/- x noise: the mean displacement is still dt * v.
    belief = make_obstacle(np.zeros((2, 2)), velocities=np.tile([1.0, 0.0], (2, 1)))
    noise = WeightedSamples(
        values=np.array([[0.5, 0.0], [-0.5, 0.0]]), weights=uniform_weights(2)
    )
    after = advance_obstacle(belief, noise, dt=1.0)
    assert np.allclose(after.positions, [[1.5, 0.0], [0.5, 0.0]])
    assert np.allclose(after.weights @ after.positions, [1.0, 0.0])


def test_advance_then_estimate_recovers_true_velocity():
    velocities = np.array([[0.3, -0.2], [0.1, 0.4]])
    belief = make_obstacle(np.zeros((2, 2)), velocities=velocities)
    after = advance_obstacle(belief, zero_noise(2), dt=0.25)
    est = estimate_obstacle_velocity(belief, after, dt=0.25)
    assert np.allclose(est.velocities, velocities, atol=1e-12)


@given(
    st.floats(min_value=-1.0, max_value=1.5, allow_nan=False),
    st.floats(min_value=-1.5, max_value=1.5, allow_nan=False),
    st.floats(min_value=0.05, max_value=1.0, allow_nan=False),
)
def test_propagation_preserves_particle_count(v, w, dt):
    robot = make_robot(np.zeros((7, 2)), headings=np.linspace(-1, 1, 7))
    after = propagate_robot(robot, ControlInput(v=v, w=w), zero_noise(7), dt=dt)
    assert after.n == robot.n
    assert np.array_equal(after.weights, robot.weights)
