"""Command-line experiment harness: run, sweeps, and validation suites."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import runner, validate
from .config import ConfigError, load_config
from .krotov import lambda_protocol

_FMT = "{:.17g}"


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return _FMT.format(float(value))


def write_csv(path: str, header: list[str], rows) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    os.replace(tmp, path)


def _write_report_json(path: str, report, cfg) -> None:
    payload = {"config": cfg.raw, "report": report.to_dict()}
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def cmd_run(cfg, out_dir: str, emit_plots: bool) -> int:
    report, result, base = runner.run_experiment(cfg)
    os.makedirs(out_dir, exist_ok=True)
    _write_report_json(os.path.join(out_dir, "report.json"), report, cfg)
    write_csv(os.path.join(out_dir, "pulse.csv"),
              ["time", "eps_opt", "eps_osc"],
              zip(cfg.grid.times, result.pulse.values, base.values))
    write_csv(os.path.join(out_dir, "trajectory.csv"),
              ["time", "battery_energy_opt", "battery_ergotropy_opt",
               "battery_energy_osc", "battery_ergotropy_osc"],
              zip(report.times, report.battery_energy_opt,
                  report.battery_ergotropy_opt, report.battery_energy_osc,
                  report.battery_ergotropy_osc))
    write_csv(os.path.join(out_dir, "convergence.csv"),
              ["iteration", "j_value", "fidelity", "pulse_cost"],
              ((r.iteration, r.j_value, r.fidelity, r.pulse_cost)
               for r in result.records))
    if emit_plots:
        from . import plots
        plots.plot_run(out_dir, cfg, report, result, base)
    return 0


def _temperature_point(args):
    cfg, n_bath = args
    return runner.run_temperature_point(cfg, n_bath)


def cmd_sweep_temperature(cfg, out_dir: str, workers: int | None,
                          emit_plots: bool) -> int:
    if cfg.model != "qubit":
        raise ConfigError("sweep-temperature requires the qubit model")
    if not cfg.sweep or cfg.sweep["parameter"] != "n_bath":
        raise ConfigError("sweep-temperature requires sweep.parameter == 'n_bath'")
    values = cfg.sweep["values"]
    jobs = [(cfg, v) for v in values]
    if workers is not None and workers <= 1:
        points = [_temperature_point(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_temperature_point, jobs))
    points.sort(key=lambda p: p["n_bath"])
    os.makedirs(out_dir, exist_ok=True)
    header = ["n_bath", "ergotropy_opt", "ergotropy_osc", "energy_opt",
              "energy_osc", "pulse_cost", "baseline_cost", "iterations"]
    write_csv(os.path.join(out_dir, "sweep.csv"), header,
              ([p[k] for k in header] for p in points))
    if emit_plots:
        from . import plots
        plots.plot_temperature_sweep(out_dir, points)
    return 0


def cmd_sweep_lambda(cfg, out_dir: str, workers: int | None,
                     emit_plots: bool) -> int:
    if not cfg.sweep or cfg.sweep["parameter"] != "lambda":
        raise ConfigError("sweep-lambda requires sweep.parameter == 'lambda'")
    values = cfg.sweep["values"]
    if any(v <= 0 for v in values):
        raise ConfigError("sweep-lambda: all lambda values must be positive")
    jobs = [(cfg, v) for v in values]
    if workers is not None and workers <= 1:
        points = [_lambda_point(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_lambda_point, jobs))
    points.sort(key=lambda p: p["lam"])
    os.makedirs(out_dir, exist_ok=True)
    rows = [(p["lam"], step, j, f, w)
            for p in points for (step, j, f, w) in p["records"]]
    write_csv(os.path.join(out_dir, "pareto.csv"),
              ["lambda", "step", "j_value", "fidelity", "pulse_cost"],
              ((lam, step, j, f, w) for (lam, step, j, f, w) in rows))

    # Two-step protocol recommendation across the swept extremes.
    lam_low, lam_high = min(values), max(values)
    proto = lambda_protocol(lambda: runner.build_model(cfg), cfg.shape,
                            lam_low, lam_high, cfg.stopping)
    recommendation = {
        "lambda_low": lam_low,
        "lambda_high": lam_high,
        "fidelity_benchmark": proto.fidelity_benchmark,
        "stage1_pulse_cost": proto.stage1.records[-1].pulse_cost,
        "stage2_pulse_cost": proto.stage2.records[-1].pulse_cost,
        "stage2_steps": proto.stage2.records[-1].iteration,
        "reached_benchmark": proto.reached_benchmark,
    }
    with open(os.path.join(out_dir, "protocol.json"), "w") as fh:
        json.dump(recommendation, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if emit_plots:
        from . import plots
        plots.plot_pareto(out_dir, points)
    return 0


def _lambda_point(args):
    cfg, lam = args
    return runner.run_lambda_point(cfg, lam)


def cmd_validate(seed: int) -> int:
    results = validate.run_all(seed=seed)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status}  {r.detail}")
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qbcharge",
        description="Optimized charging of open quantum batteries")
    parser.add_argument("command",
                        choices=["run", "sweep-temperature", "sweep-lambda",
                                 "validate"])
    parser.add_argument("--config", help="experiment config file (YAML)")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--emit-plots", action="store_true")
    args = parser.parse_args(argv)

    try:
        if args.command == "validate":
            return cmd_validate(args.seed if args.seed is not None else 1234)
        if not args.config:
            raise ConfigError(f"{args.command} requires --config")
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        out_dir = args.out or cfg.output or "."
        if args.command == "run":
            return cmd_run(cfg, out_dir, args.emit_plots)
        if args.command == "sweep-temperature":
            return cmd_sweep_temperature(cfg, out_dir, args.workers,
                                         args.emit_plots)
        return cmd_sweep_lambda(cfg, out_dir, args.workers, args.emit_plots)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
