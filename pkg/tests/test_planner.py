import numpy as np
import pytest

from mmdplan import (
    ConfigurationError,
    ControlInput,
    GoalSpec,
    KernelConfig,
    PlannerWeights,
    build_grid,
    cost_surface,
    plan_step,
    solve_nominal,
    tracking_cost,
)
from mmdplan.controls import tracking_costs
from mmdplan.planner import format_cost_surface
from mmdplan.sampling import NoiseSpec, draw_noise

from conftest import make_obstacle, make_robot, zero_noise

GOAL = GoalSpec(position=(8.0, 0.0), speed=1.0)
KERNEL = KernelConfig(degree=3)


def test_grid_formula_two_by_two():
    grid = build_grid((0.0, 1.0), (-1.0, 1.0), 2, 2)
    assert np.allclose(grid.controls, [[0.5, 0.0], [0.5, 1.0], [1.0, 0.0], [1.0, 1.0]])


def test_grid_single_cell_is_upper_bounds():
    grid = build_grid((0.0, 1.0), (-1.0, 1.0), 1, 1)
    assert np.allclose(grid.controls, [[1.0, 1.0]])


def test_grid_speed_levels():
    grid = build_grid((0.0, 1.0), (-1.0, 1.0), 4, 1)
    assert np.allclose(grid.speeds, [0.25, 0.5, 0.75, 1.0])


def test_grid_row_major_order():
    grid = build_grid((0.0, 2.0), (-1.0, 1.0), 2, 3)
    # All rates for the first speed, then the second speed.
    assert np.allclose(grid.controls[:3, 0], 1.0)
    assert np.allclose(grid.controls[3:, 0], 2.0)
    assert np.allclose(grid.controls[:3, 1], grid.controls[3:, 1])


def test_grid_cardinality():
    grid = build_grid((0.0, 1.25), (-1.2, 1.2), 15, 15)
    assert len(grid) == 225
    assert grid.controls.shape == (225, 2)


def test_grid_rejects_inverted_bounds():
    with pytest.raises(ConfigurationError, match="v_bounds"):
        build_grid((1.0, 0.0), (-1.0, 1.0), 3, 3)
    with pytest.raises(ConfigurationError, match="w_bounds"):
        build_grid((0.0, 1.0), (1.0, -1.0), 3, 3)


def test_tracking_cost_perfect_tracking_is_zero():
    weights = PlannerWeights(goal=1.0, control=0.0)
    # Heading 0, w = 0, v = 1 produces velocity (1, 0) = desired velocity.
    cost = tracking_cost(
        ControlInput(v=1.0, w=0.0), np.zeros(2), 0.0, GOAL, weights, dt=0.25
    )
    assert cost == pytest.approx(0.0, abs=1e-12)


def test_tracking_cost_stationary_control():
    weights = PlannerWeights(goal=1.0, control=1.0)
    cost = tracking_cost(
        ControlInput(v=0.0, w=0.0), np.zeros(2), 0.0, GOAL, weights, dt=0.25
    )
    assert cost == pytest.approx(1.0)


def test_tracking_cost_control_term_quadratic_identity():
    # With the tracking error weighted to zero, doubling u raises the cost by
    # exactly 3 * ||u||^2 * control_weight.
    weights = PlannerWeights(goal=0.0, control=0.7)
    u = ControlInput(v=0.6, w=-0.4)
    u2 = ControlInput(v=1.2, w=-0.8)
    base = tracking_cost(u, np.zeros(2), 0.0, GOAL, weights, dt=0.25)
    doubled = tracking_cost(u2, np.zeros(2), 0.0, GOAL, weights, dt=0.25)
    norm_sq = u.v**2 + u.w**2
    assert doubled - base == pytest.approx(3.0 * norm_sq * 0.7)


def test_position_tracking_mode_differs_but_agrees_on_argmin_direction():
    velocity_mode = PlannerWeights(goal=1.0, control=0.0, tracking="velocity")
    position_mode = PlannerWeights(goal=1.0, control=0.0, tracking="position")
    grid = build_grid((0.0, 1.25), (-1.2, 1.2), 8, 9)
    cv = tracking_costs(grid.controls, np.zeros(2), 0.0, GOAL, velocity_mode, 0.25)
    cp = tracking_costs(grid.controls, np.zeros(2), 0.0, GOAL, position_mode, 0.25)
    assert not np.allclose(cv, cp)  # different scales
    assert int(np.argmin(cv)) == int(np.argmin(cp))  # same preferred control


def make_head_on(n=25, seed=0):
    rng = np.random.default_rng(seed)
    robot = make_robot(
        rng.normal([0.0, 0.0], 0.04, (n, 2)),
        velocities=np.zeros((n, 2)),
    )
    obstacle = make_obstacle(
        rng.normal([3.0, 0.0], 0.04, (n, 2)),
        velocities=np.tile([-0.4, 0.0], (n, 1)),
    )
    noise = draw_noise(
        NoiseSpec(kind="gaussian", sample_count=n, spread=[0.02, 0.03]), seed + 1, 2
    )
    return robot, obstacle, noise


def test_no_obstacles_reduces_to_nominal():
    robot = make_robot(np.zeros((5, 2)))
    grid = build_grid((0.0, 1.25), (-1.2, 1.2), 8, 9)
    weights = PlannerWeights(collision=2.0, goal=1.0, control=0.1)
    result = plan_step(
        robot, [], None, GOAL, grid, KERNEL, weights, zero_noise(5), dt=0.25
    )
    nominal = solve_nominal(robot, [], None, GOAL, grid, weights, dt=0.25)
    assert result.index == nominal.index
    assert result.u_opt == nominal.control


def test_zero_weights_reduce_to_tracking_argmin():
    robot, obstacle, noise = make_head_on()
    grid = build_grid((0.0, 1.25), (-1.2, 1.2), 8, 9)
    weights = PlannerWeights(collision=0.0, goal=1.0, control=0.1)
    result = plan_step(
        robot, [obstacle], None, GOAL, grid, KERNEL, weights, noise, dt=0.25
    )
    tracking = tracking_costs(
        grid.controls, robot.mean_position, robot.mean_heading, GOAL, weights, 0.25
    )
    assert result.index == int(np.argmin(tracking))
    assert np.allclose(result.costs, tracking)


def test_exact_ties_break_to_lowest_index():
    robot = make_robot(np.zeros((3, 2)))
    grid = build_grid((0.0, 1.0), (-1.0, 1.0), 3, 3)
    weights = PlannerWeights(collision=0.0, goal=0.0, control=0.0)
    result = plan_step(
        robot, [], None, GOAL, grid, KERNEL, weights, zero_noise(3), dt=0.25
    )
    assert np.allclose(result.costs, result.costs[0])
    assert result.index == 0


def test_costs_nonnegative_with_nonnegative_weights():
    robot, obstacle, noise = make_head_on()
    grid = build_grid((0.0, 1.25), (-1.2, 1.2), 8, 9)
    weights = PlannerWeights(collision=1.5, goal=1.0, control=0.1)
    result = plan_step(
        robot, [obstacle], None, GOAL, grid, KERNEL, weights, noise, dt=0.25
    )
    assert np.all(result.costs >= 0.0)


def test_plan_step_deterministic_across_worker_counts():
    robot, obstacle, noise = make_head_on()
    grid = build_grid((0.0, 1.25), (-1.2, 1.2), 10, 11)
    weights = PlannerWeights(collision=1.5, goal=1.0, control=0.1)
    results = [
        plan_step(
            robot, [obstacle], None, GOAL, grid, KERNEL, weights, noise, 0.25, workers=w
        )
        for w in (1, 2, 5)
    ]
    for other in results[1:]:
        assert other.index == results[0].index
        assert np.array_equal(other.costs, results[0].costs)


def test_plan_step_matches_per_control_composition():
    # The batched sweep must equal composing the public per-control ops.
    from mmdplan import constraint_distribution, mmd_squared, propagate_robot
    from mmdplan.constraints import COLLISION_CONE
    from mmdplan import WeightedSamples

    robot, obstacle, noise = make_head_on(n=10)
    grid = build_grid((0.0, 1.0), (-1.0, 1.0), 4, 5)
    weights = PlannerWeights(collision=1.5, goal=1.0, control=0.1)
    result = plan_step(
        robot, [obstacle], None, GOAL, grid, KERNEL, weights, noise, dt=0.25
    )
    desired = result.desired.cone_sets[0].samples
    desired_ws = WeightedSamples(values=desired.values, weights=desired.weights)
    for i in range(len(grid)):
        u = grid.control(i)
        after = propagate_robot(robot, u, noise, 0.25)
        dist = constraint_distribution(after, COLLISION_CONE, obstacle=obstacle)
        expected = tracking_cost(
            u, robot.mean_position, robot.mean_heading, GOAL, weights, 0.25
        ) + weights.collision * mmd_squared(
            WeightedSamples(values=dist.values, weights=dist.weights), desired_ws, KERNEL
        )
        assert result.costs[i] == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_diagnostics_carry_eta_and_flags():
    robot, obstacle, noise = make_head_on()
    grid = build_grid((0.0, 1.25), (-1.2, 1.2), 8, 9)
    weights = PlannerWeights(collision=1.5, goal=1.0, control=0.1)
    result = plan_step(
        robot, [obstacle], None, GOAL, grid, KERNEL, weights, noise, dt=0.25
    )
    assert set(result.eta) == {obstacle.obstacle_id}
    assert 0.0 <= result.eta[obstacle.obstacle_id] <= 1.0
    assert len(result.desired.cone_sets) == 1
    assert result.costs.shape == (len(grid),)


def test_cost_surface_no_obstacles_equals_tracking_surface():
    robot = make_robot(np.zeros((4, 2)))
    grid = build_grid((0.0, 1.25), (-1.2, 1.2), 6, 7)
    weights = PlannerWeights(collision=1.5, goal=1.0, control=0.1)
    table = cost_surface(
        robot, [], None, GOAL, grid, KERNEL, weights, zero_noise(4), dt=0.25
    )
    tracking = tracking_costs(grid.controls, np.zeros(2), 0.0, GOAL, weights, 0.25)
    assert table.shape == (len(grid), 3)
    assert np.allclose(table[:, 2], tracking)
    assert np.allclose(table[:, :2], grid.controls)


def test_cost_surface_obstacle_changes_at_least_one_cell():
    robot, obstacle, noise = make_head_on()
    grid = build_grid((0.0, 1.25), (-1.2, 1.2), 6, 7)
    weights = PlannerWeights(collision=1.5, goal=1.0, control=0.1)
    with_obs = cost_surface(
        robot, [obstacle], None, GOAL, grid, KERNEL, weights, noise, dt=0.25
    )
    tracking = tracking_costs(
        grid.controls, robot.mean_position, robot.mean_heading, GOAL, weights, 0.25
    )
    assert np.any(np.abs(with_obs[:, 2] - tracking) > 1e-9)


def test_cost_surface_row_count_and_format():
    robot = make_robot(np.zeros((3, 2)))
    grid = build_grid((0.0, 1.25), (-1.2, 1.2), 15, 15)
    weights = PlannerWeights(collision=0.0, goal=1.0, control=0.1)
    table = cost_surface(
        robot, [], None, GOAL, grid, KERNEL, weights, zero_noise(3), dt=0.25
    )
    text = format_cost_surface(table)
    lines = text.strip().split("\n")
    assert len(lines) == 225
    assert all(len(line.split("\t")) == 3 for line in lines)
