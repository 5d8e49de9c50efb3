"""Command-line front end.

Exit codes: 0 success (including "hypotheses do not hold", which is a result),
2 configuration error, 3 parameter validation failure, 4 integration failure,
5 condition-check failure (the check itself could not be carried out).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import almostperiod, plotting
from .bounds import check_dispersal_bound, estimate_ultimate_bounds
from .integrator import StepUnderflow, integrate_batch, write_csv_rows
from .model import STATE_NAMES, ParameterError
from .scenario import ConfigError, Scenario, example51_scenario, load_scenario
from .stability import attractivity_experiment, check_contraction, verify_decay

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_INTEGRATION = 4
EXIT_CHECK = 5

OUTPUT_ENV = "LVPATCH_OUTPUT_DIR"
STAGES = ("simulate", "check", "attract", "almost-period")


class CheckFailure(RuntimeError):
    pass


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _trajectory_csv(path: Path, traj) -> Path:
    traj.to_csv(path)
    return path


def run_simulate(sc: Scenario, out: Path) -> dict:
    trajs = integrate_batch(sc.params, np.array(sc.initial_states), sc.t0, sc.t_end, sc.integration)
    paths = [_trajectory_csv(out / f"trajectory_{k}.csv", tr) for k, tr in enumerate(trajs)]
    plotting.emit_plot(paths, out / "simulate.svg",
                       kind="timeseries" if len(paths) == 1 else "overlay",
                       title="Trajectories")
    return {"trajectories": [p.name for p in paths]}


def run_check(sc: Scenario, out: Path, seed: int | None = None) -> dict:
    dispersal = check_dispersal_bound(sc.params)
    rows = [q.row() for q in dispersal.inequalities]
    report = {"dispersal": dispersal.to_dict(), "region": None, "contraction": None, "decay": None}
    if dispersal.holds:
        ro = sc.region
        try:
            region = estimate_ultimate_bounds(
                sc.params, seed=ro.seed if seed is None else seed, ensemble_size=ro.ensemble_size,
                ic_box=ro.ic_box, burn_in=ro.burn_in, horizon=ro.horizon, margin=ro.margin,
                opts=sc.integration)
        except StepUnderflow:
            raise
        except ValueError as exc:
            raise CheckFailure(f"region estimate failed: {exc}") from exc
        cond = check_contraction(sc.params, region)
        rows += [q.row() for q in cond.inequalities]
        report["region"] = region.to_dict()
        report["contraction"] = cond.to_dict()
        if cond.holds:
            do = sc.decay
            decay = verify_decay(sc.params, do.state, do.shadow_state, do.t0, do.t1, cond.c,
                                 do.tol, sc.integration)
            report["decay"] = decay.to_dict()
            with open(out / "decay.csv", "w", newline="") as fh:
                write_csv_rows(fh, ["t", "V", "envelope"],
                               np.column_stack([decay.t, decay.V, decay.envelope()]))
    with open(out / "conditions.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["name", "lhs", "rhs", "margin", "holds"])
        for name, lhs, rhs, margin, holds in rows:
            w.writerow([name, repr(float(lhs)), repr(float(rhs)), repr(float(margin)), int(holds)])
    _write_json(out / "check.json", report)
    return report


def run_attract(sc: Scenario, out: Path) -> dict:
    ao = sc.attract
    if len(sc.initial_states) < 2:
        raise ConfigError("attract needs at least two initial states")
    rep = attractivity_experiment(sc.params, sc.initial_states, ao.t_end, ao.eps, sc.integration, t0=sc.t0)
    paths = [_trajectory_csv(out / f"attract_{k}.csv", tr) for k, tr in enumerate(rep.trajectories)]
    with open(out / "attract_pairs.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j", "converged", "time", "max_after", "final"])
        for p in rep.pairs:
            w.writerow([p.i, p.j, int(p.converged), repr(p.time), repr(p.max_after), repr(p.final)])
    plotting.emit_plot(paths, out / "attract.svg", kind="overlay", title="Global attractivity")
    summary = rep.to_dict()
    summary["max_after_hold_from"] = rep.max_after(ao.hold_from)
    _write_json(out / "attract.json", summary)
    return summary


def run_almost_period(sc: Scenario, out: Path) -> dict:
    so = sc.scan
    traj = integrate_batch(sc.params, np.array(sc.initial_states[:1]), sc.t0, so.t_end, sc.integration)[0]
    shifts, defects = almostperiod.defect_curve(traj, so.window, so.T_range, so.T_step, so.grid_step)
    cands = almostperiod.candidates_from_curve(shifts, defects, so.epsilon)
    almostperiod.write_scan_csv(out / "scan.csv", shifts, defects, cands)
    plotting.emit_plot(out / "scan.csv", out / "scan.svg", kind="scan", title="Almost-period defect")
    summary = {"candidates": [dict(dataclasses.asdict(c), accepted=c.accepted) for c in cands]}
    _write_json(out / "scan.json", summary)
    return summary


RUNNERS = {
    "simulate": run_simulate,
    "check": run_check,
    "attract": run_attract,
    "almost-period": run_almost_period,
}


def _out_dir(args, sc: Scenario) -> Path:
    out = Path(args.out or os.environ.get(OUTPUT_ENV) or sc.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run_stages(sc: Scenario, stages, args) -> int:
    sc.validated()
    out = _out_dir(args, sc)
    for stage in stages:
        if stage == "check":
            result = run_check(sc, out, seed=args.seed)
        else:
            result = RUNNERS[stage](sc, out)
        print(f"[{stage}] -> {out}")
        if not args.quiet:
            print(json.dumps(result, indent=2, default=_json_default))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None,
                        help=f"output directory (default: ${OUTPUT_ENV}, else the scenario's output_dir)")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for the region estimator (default: scenario value, 42)")
    common.add_argument("-q", "--quiet", action="store_true", help="only print output locations (default: off)")

    parser = argparse.ArgumentParser(
        prog="lvpatch",
        description="Two-patch almost-periodic Lotka-Volterra competition laboratory.",
        epilog="Built-in defaults: rk4, h=1e-3, record_stride=10; region seed 42, 16 members, "
               "ic_box (0.1, 5), burn-in 100, horizon 300, margin 5%; decay on [100, 200], tol 1e-8; "
               "attract t_end 300, eps 1e-3; scan window [100, 150], T in [150, 200], step 0.01, "
               "epsilon 0.2.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in STAGES:
        p = sub.add_parser(name, parents=[common],
                           help=f"run the {name} stage on a scenario file")
        p.add_argument("config", help="scenario JSON file")
    p = sub.add_parser("example51", parents=[common],
                       help="run the built-in quasi-periodic example end to end")
    p.add_argument("stage", nargs="?", default="all", choices=("all",) + STAGES,
                   help="stage to run (default: all)")
    p.add_argument("--dump-config", default=None, metavar="PATH",
                   help="write the built-in scenario as JSON and exit (default: off)")
    p = sub.add_parser("plot",
                       help="render a static SVG from exported CSV files")
    p.add_argument("csv", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--kind", default="auto", choices=("auto", "timeseries", "overlay", "scan"),
                   help="plot type; auto infers it from the CSV header (default: auto)")
    p.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plot":
            plotting.emit_plot(args.csv, args.output, kind=args.kind, title=args.title)
            return EXIT_OK
        if args.command == "example51":
            sc = example51_scenario()
            if args.dump_config:
                from .scenario import dump_scenario
                dump_scenario(sc, args.dump_config)
                return EXIT_OK
            stages = STAGES if args.stage == "all" else (args.stage,)
        else:
            sc = load_scenario(args.config)
            stages = (args.command,)
        return _run_stages(sc, stages, args)
    except (ConfigError, plotting.SchemaError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except StepUnderflow as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except CheckFailure as exc:
        print(f"condition check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
