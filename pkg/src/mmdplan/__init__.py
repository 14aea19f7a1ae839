"""Distribution-matching MPC for noisy unicycle robots.

A sampling-based planner that keeps the empirical distribution of each
velocity-obstacle collision cone (and the corridor boundary distances) close
to a collision-free desired distribution, measured by the Maximum Mean
Discrepancy under a polynomial kernel. Noise is fully non-parametric: every
uncertain quantity is a weighted sample set.
"""

from .baselines import (
    BaselinePlanResult,
    GaussianSummary,
    baseline_plan_step,
    linearized_cone_summary,
    sample_moment_summary,
    surrogate_satisfied,
)
from .constraints import (
    COLLISION_CONE,
    CORRIDOR_LOWER,
    CORRIDOR_UPPER,
    ConstraintSamples,
    CorridorSpec,
    collision_cone,
    constraint_distribution,
    corridor_distances,
    empirical_eta,
)
from .controls import (
    ControlGrid,
    GoalSpec,
    PlannerWeights,
    build_grid,
    tracking_cost,
)
from .desired import (
    DesiredDistributions,
    DesiredSet,
    NominalSolution,
    build_desired,
    solve_nominal,
)
from .errors import ConfigurationError, DimensionError
from .harness import (
    RunMetrics,
    Simulation,
    StepRecord,
    ablation_sweep,
    brute_force_eta,
    metrics_csv,
    run_log_json,
    run_scenario,
)
from .kinematics import (
    ControlInput,
    ObstacleBelief,
    RobotBelief,
    advance_obstacle,
    estimate_obstacle_velocity,
    propagate_robot,
)
from .planner import PlanResult, cost_surface, plan_step
from .rkhs import KernelConfig, mmd_squared, polynomial_gram
from .sampling import (
    MixtureComponent,
    NoiseSpec,
    SeedStream,
    WeightedSamples,
    draw_noise,
)
from .scenario import ScenarioSpec, load_scenario, scenario_from_dict, with_overrides

__version__ = "0.1.0"

__all__ = [
    "BaselinePlanResult",
    "GaussianSummary",
    "baseline_plan_step",
    "linearized_cone_summary",
    "sample_moment_summary",
    "surrogate_satisfied",
    "COLLISION_CONE",
    "CORRIDOR_LOWER",
    "CORRIDOR_UPPER",
    "ConstraintSamples",
    "CorridorSpec",
    "collision_cone",
    "constraint_distribution",
    "corridor_distances",
    "empirical_eta",
    "ControlGrid",
    "GoalSpec",
    "PlannerWeights",
    "build_grid",
    "tracking_cost",
    "DesiredDistributions",
    "DesiredSet",
    "NominalSolution",
    "build_desired",
    "solve_nominal",
    "ConfigurationError",
    "DimensionError",
    "RunMetrics",
    "Simulation",
    "StepRecord",
    "ablation_sweep",
    "brute_force_eta",
    "metrics_csv",
    "run_log_json",
    "run_scenario",
    "ControlInput",
    "ObstacleBelief",
    "RobotBelief",
    "advance_obstacle",
    "estimate_obstacle_velocity",
    "propagate_robot",
    "PlanResult",
    "cost_surface",
    "plan_step",
    "KernelConfig",
    "mmd_squared",
    "polynomial_gram",
    "MixtureComponent",
    "NoiseSpec",
    "SeedStream",
    "WeightedSamples",
    "draw_noise",
    "ScenarioSpec",
    "load_scenario",
    "scenario_from_dict",
    "with_overrides",
]
