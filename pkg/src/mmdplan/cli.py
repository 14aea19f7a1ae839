"""Command-line interface: run, ablate, compare, surface."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigurationError
from .harness import ablation_sweep, metrics_csv, run_log_json, run_row, run_scenario
from .planner import format_cost_surface
from .scenario import load_scenario, with_overrides


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--scenario", required=True, help="scenario YAML file or builtin name")
    parser.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    parser.add_argument("--workers", type=int, default=1, help="parallel workers for the control sweep")


def _parse_args(argv):
    parser = argparse.ArgumentParser(
        prog="mmdplan",
        description="Distribution-matching MPC for noisy unicycle robots",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and write its JSON log")
    _add_common(run)
    run.add_argument("--method", choices=("rkhs", "gauss-lin", "gauss-moment"), default=None)
    run.add_argument("--degree", type=int, default=None, help="polynomial kernel degree")
    run.add_argument("--out", required=True, help="output directory")

    ablate = sub.add_parser("ablate", help="sweep kernel degrees over seeded runs")
    _add_common(ablate)
    ablate.add_argument("--degrees", default="1,2,3", help="comma-separated degrees")
    ablate.add_argument("--seeds", type=int, default=10, help="number of consecutive seeds")
    ablate.add_argument("--out", default=None, help="output directory (default: print CSV)")

    compare = sub.add_parser("compare", help="sweep methods over seeded runs")
    _add_common(compare)
    compare.add_argument("--methods", default="rkhs,gauss-lin", help="comma-separated methods")
    compare.add_argument("--degree", type=int, default=None)
    compare.add_argument("--seeds", type=int, default=10)
    compare.add_argument("--out", default=None, help="output directory (default: print CSV)")

    surface = sub.add_parser("surface", help="dump the planning cost surface at step K")
    _add_common(surface)
    surface.add_argument("--step", type=int, default=0, help="steps to simulate before dumping")
    surface.add_argument("--degree", type=int, default=None)
    surface.add_argument("--out", default=None, help="output file (default: stdout)")

    return parser.parse_args(argv)


def _cmd_run(args) -> int:
    spec = load_scenario(args.scenario)
    spec = with_overrides(spec, method=args.method, degree=args.degree, seed=args.seed)
    records, metrics = run_scenario(spec, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "run.json").write_text(run_log_json(spec, records, metrics))
    (out / "metrics.csv").write_text(metrics_csv([run_row(spec, workers=args.workers)]))
    status = "reached goal" if metrics.reached else "stopped"
    print(
        f"{spec.name}: {status} in {metrics.steps} steps, "
        f"deviation {metrics.deviation:.3f} m, control cost {metrics.control_cost:.3f}"
    )
    print(f"log written to {out / 'run.json'}")
    return 0


def _cmd_ablate(args) -> int:
    spec = load_scenario(args.scenario)
    if args.seed is not None:
        spec = with_overrides(spec, seed=args.seed)
    degrees = [int(d) for d in str(args.degrees).split(",") if d != ""]
    seeds = [spec.seed + i for i in range(args.seeds)]
    rows = ablation_sweep(spec, degrees, ["rkhs"], seeds, workers=args.workers)
    return _emit_csv(rows, args.out, "ablation.csv")


def _cmd_compare(args) -> int:
    spec = load_scenario(args.scenario)
    spec = with_overrides(spec, degree=args.degree, seed=args.seed)
    methods = [m.strip() for m in str(args.methods).split(",") if m.strip()]
    seeds = [spec.seed + i for i in range(args.seeds)]
    rows = ablation_sweep(spec, [spec.kernel.degree], methods, seeds, workers=args.workers)
    return _emit_csv(rows, args.out, "compare.csv")


def _emit_csv(rows, out, filename) -> int:
    text = metrics_csv(rows)
    if out is None:
        sys.stdout.write(text)
    else:
        directory = Path(out)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / filename).write_text(text)
        print(f"table written to {directory / filename}")
    return 0


def _cmd_surface(args) -> int:
    from .harness import Simulation

    spec = load_scenario(args.scenario)
    spec = with_overrides(spec, degree=args.degree, seed=args.seed)
    sim = Simulation(spec, workers=args.workers)
    for _ in range(args.step):
        if sim.done():
            raise ConfigurationError(
                f"step: run ended after {sim.steps_taken} steps, cannot reach step {args.step}"
            )
        sim.advance()
    text = format_cost_surface(sim.surface())
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        print(f"surface written to {args.out}")
    return 0


def main(argv=None) -> int:
    args = _parse_args(argv if argv is not None else sys.argv[1:])
    handlers = {
        "run": _cmd_run,
        "ablate": _cmd_ablate,
        "compare": _cmd_compare,
        "surface": _cmd_surface,
    }
    try:
        return handlers[args.command](args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
