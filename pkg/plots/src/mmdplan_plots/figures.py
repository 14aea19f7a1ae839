"""Render the four figure kinds from mmdplan output files.

* ``snapshot``: world-space view of one step; mean discs are drawn filled,
  the other particles as unfilled circles (robot blue, obstacles orange).
* ``distribution``: the current collision-cone sample histogram of the
  closest obstacle overlaid on its desired (collision-free) histogram, with
  a vertical line at zero.
* ``bars``: per-method/degree averages of control cost, deviation and steps
  from a sweep metrics CSV.
* ``surface``: heatmap of the planning cost over the (v, w) control grid.

The renderer only reads the documented JSON/CSV/table formats; it never
touches planner internals and never modifies its inputs.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import ParseError, RequestError
from .logio import load_metrics_csv, load_run_log, load_surface_table

FIGURE_KINDS = ("snapshot", "distribution", "bars", "surface")

ROBOT_COLOR = "tab:blue"
OBSTACLE_COLOR = "tab:orange"
DESIRED_COLOR = "black"


@dataclass(frozen=True)
class FigureRequest:
    """What to draw, from which log, to which image file."""

    log: str
    kind: str
    out: str
    step: int | None = None

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise RequestError(f"kind: expected one of {FIGURE_KINDS}, got {self.kind!r}")
        if self.kind in ("snapshot", "distribution") and self.step is None:
            raise RequestError(f"step: required for {self.kind} figures")


def render(request: FigureRequest) -> Path:
    """Draw the requested figure and write it to ``request.out``."""
    out = Path(request.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if request.kind == "snapshot":
        fig = _snapshot(load_run_log(request.log), _checked_step(request))
    elif request.kind == "distribution":
        fig = _distribution(load_run_log(request.log), _checked_step(request))
    elif request.kind == "bars":
        fig = _bars(load_metrics_csv(request.log))
    else:
        fig = _surface(load_surface_table(request.log))
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out


def _checked_step(request: FigureRequest) -> int:
    log = load_run_log(request.log)
    steps = len(log["steps"])
    if steps == 0:
        raise RequestError(f"step: log {request.log} recorded no steps")
    if not 0 <= request.step < steps:
        raise RequestError(
            f"step: index {request.step} outside run length {steps}"
        )
    return request.step


def _disc_cloud(ax, positions: np.ndarray, radius: float, color: str):
    """Unfilled particle discs plus a filled mean disc."""
    for x, y in positions:
        ax.add_patch(plt.Circle((x, y), radius, fill=False, ec=color, lw=0.5, alpha=0.5))
    mean = positions.mean(axis=0)
    ax.add_patch(plt.Circle(tuple(mean), radius, fc=color, ec=color, alpha=0.9, zorder=3))


def _snapshot(log: dict, step: int):
    scenario = log["scenario"]
    record = log["steps"][step]
    fig, ax = plt.subplots(figsize=(7, 5))

    trail = np.array(
        [np.mean(r["robot_positions"], axis=0) for r in log["steps"][: step + 1]]
    )
    ax.plot(trail[:, 0], trail[:, 1], "-", color=ROBOT_COLOR, lw=1.0, alpha=0.6)

    _disc_cloud(ax, np.asarray(record["robot_positions"]), scenario["robot"]["radius"], ROBOT_COLOR)
    for key, positions in record["obstacle_positions"].items():
        radius = scenario["obstacles"][int(key)]["radius"]
        _disc_cloud(ax, np.asarray(positions), radius, OBSTACLE_COLOR)

    if scenario.get("corridor"):
        xs = np.array(ax.get_xlim())
        xs = np.array([min(xs[0], -1.0), max(xs[1], scenario["goal"]["position"][0] + 1.0)])
        for a, b, c in (scenario["corridor"]["line1"], scenario["corridor"]["line2"]):
            if abs(b) > 1e-12:
                ax.plot(xs, -(a * xs + c) / b, "k--", lw=1.0)
            else:
                ax.axvline(-c / a, color="k", ls="--", lw=1.0)

    goal = scenario["goal"]["position"]
    ax.plot(*goal, marker="*", ms=14, color="gold", mec="black", zorder=4)
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title(f"{scenario['name']}: step {step} (u = {record['control']['v']:.2f}, "
                 f"{record['control']['w']:+.2f})")
    ax.set_aspect("equal", adjustable="datalim")
    ax.autoscale_view()
    return fig


def _closest_obstacle(record: dict) -> str:
    robot_mean = np.mean(record["robot_positions"], axis=0)
    best_key, best_gap = None, np.inf
    for key, positions in record["obstacle_positions"].items():
        gap = float(np.hypot(*(np.mean(positions, axis=0) - robot_mean)))
        if gap < best_gap:
            best_key, best_gap = key, gap
    return best_key


def _distribution(log: dict, step: int):
    record = log["steps"][step]
    if not record["cone_samples"]:
        raise RequestError("distribution: log has no obstacles")
    if not record.get("desired_cone"):
        raise RequestError(
            "distribution: log carries no desired sets "
            f"(method {log.get('method')!r}); run with the rkhs method"
        )
    key = _closest_obstacle(record)
    current = np.asarray(record["cone_samples"][key])
    desired = np.asarray(record["desired_cone"][key]["values"])

    fig, ax = plt.subplots(figsize=(6, 4))
    lo = min(current.min(), desired.min(), 0.0)
    hi = max(current.max(), desired.max(), 0.0)
    span = hi - lo or 1.0
    bins = np.linspace(lo - 0.05 * span, hi + 0.05 * span, 24)
    ax.hist(desired, bins=bins, density=True, color=DESIRED_COLOR, alpha=0.55,
            label="desired (collision-free)")
    ax.hist(current, bins=bins, density=True, color=ROBOT_COLOR, alpha=0.55,
            label="current")
    ax.axvline(0.0, color="red", lw=1.5)
    eta = record["eta"][key]
    # Top bar: fraction of obstacle samples avoided at the chosen control.
    ax.plot([0.02, 0.02 + 0.4 * eta], [0.96, 0.96], transform=ax.transAxes,
            color="green", lw=5, solid_capstyle="butt")
    ax.text(0.02, 0.90, f"avoided fraction = {eta:.2f}", transform=ax.transAxes)
    ax.set_xlabel("collision-cone value [m$^2$]")
    ax.set_ylabel("density")
    ax.set_title(f"step {step}, obstacle {key}")
    ax.legend(loc="upper right")
    return fig


def _bars(rows: list[dict]):
    groups: dict[str, list[dict]] = defaultdict(list)
    for row in rows:
        groups[row["label"]].append(row)
    labels = sorted(groups)
    metrics = (
        ("control_cost", "control cost"),
        ("deviation", "deviation [m]"),
        ("steps", "steps to goal"),
    )
    fig, axes = plt.subplots(1, 3, figsize=(11, 3.5))
    palette = plt.get_cmap("tab10")
    for ax, (field, title) in zip(axes, metrics):
        values = [float(np.mean([r[field] for r in groups[label]])) for label in labels]
        ax.bar(range(len(labels)), values,
               color=[palette(i % 10) for i in range(len(labels))])
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=20, ha="right", fontsize=8)
        ax.set_title(title)
    fig.tight_layout()
    return fig


def _surface(table: np.ndarray):
    speeds = np.unique(table[:, 0])
    rates = np.unique(table[:, 1])
    if len(speeds) * len(rates) != len(table):
        raise ParseError(
            f"surface: {len(table)} rows do not fill a "
            f"{len(speeds)}x{len(rates)} grid"
        )
    grid = table[:, 2].reshape(len(speeds), len(rates))
    fig, ax = plt.subplots(figsize=(6, 4.5))
    mesh = ax.pcolormesh(rates, speeds, grid, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="cost q(u)")
    ax.set_xlabel("angular speed w [rad/s]")
    ax.set_ylabel("speed v [m/s]")
    ax.set_title(f"planning cost surface ({len(speeds)}x{len(rates)} grid)")
    return fig
