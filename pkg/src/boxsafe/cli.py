"""Command-line front end: run scenarios, compare runs, dump scenario data.

    boxsafe simulate --scenario nonlinear2d --smid on --out runs/a
    boxsafe compare runs/a/summary.json runs/b/summary.json
    boxsafe dump-scenario planar-robot

``simulate`` writes ``trajectory.csv`` and ``summary.json`` into the output
directory and prints a metrics summary.  Flags override values from an
optional JSON config file (``--config``), which overrides scenario
defaults.  Exit codes: 0 success, 1 simulation failure, 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .scenarios import SCENARIO_NAMES, get_scenario
from .sim import CONTROLLERS, SimConfig, load_summary, metrics, run, write_run
from .smid import SmidConfig

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxsafe",
        description="Robust CBF/CLF QP control with online set-membership "
                    "identification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a closed-loop simulation")
    sim.add_argument("--scenario", required=True, choices=SCENARIO_NAMES)
    sim.add_argument("--smid", choices=("on", "off"), default=None)
    sim.add_argument("--controller", choices=CONTROLLERS, default=None)
    sim.add_argument("--dt", type=float, default=None)
    sim.add_argument("--T", type=float, default=None, dest="horizon")
    sim.add_argument("--x0", type=float, nargs="+", default=None,
                     help="initial state (space separated)")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--config", default=None, help="JSON config file")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--dump-scenario", action="store_true",
                     help="print the scenario JSON before running")

    cmp_ = sub.add_parser("compare", help="compare two run summaries")
    cmp_.add_argument("run_a", help="first summary.json (or its directory)")
    cmp_.add_argument("run_b", help="second summary.json (or its directory)")
    cmp_.add_argument("--out", default="compare.json", help="comparison output file")

    dump = sub.add_parser("dump-scenario", help="print a scenario description")
    dump.add_argument("name", choices=SCENARIO_NAMES)
    return parser


def _load_config_file(path) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must contain a JSON object")
    return data


def _merge_config(args, file_cfg: dict) -> SimConfig:
    """Precedence: command-line flags > config file > scenario defaults."""
    def pick(flag_value, key, default=None):
        if flag_value is not None:
            return flag_value
        return file_cfg.get(key, default)

    smid_cfg = None
    if "smid" in file_cfg and isinstance(file_cfg["smid"], dict):
        s = file_cfg["smid"]
        smid_cfg = SmidConfig(window=s["window"], epsilon=s["epsilon"],
                              capacity=s.get("capacity", 20),
                              period=s.get("period"))

    smid_flag = {"on": True, "off": False}[args.smid] if args.smid is not None else None
    x0 = pick(args.x0, "x0")
    return SimConfig(
        dt=pick(args.dt, "dt"),
        horizon=pick(args.horizon, "horizon"),
        x0=None if x0 is None else np.asarray(x0, dtype=float),
        controller=pick(args.controller, "controller", "pipeline"),
        smid_enabled=smid_flag if smid_flag is not None
        else bool(file_cfg.get("smid_enabled", False)),
        smid=smid_cfg,
        seed=pick(args.seed, "seed", 0),
    )


def _cmd_simulate(args) -> int:
    scenario = get_scenario(args.scenario)
    file_cfg = {}
    if args.config:
        try:
            file_cfg = _load_config_file(args.config)
        except (OSError, ValueError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
            return 2
    try:
        cfg = _merge_config(args, file_cfg)
        if args.dump_scenario:
            print(json.dumps(scenario.describe(), indent=2, sort_keys=True))
        log = run(scenario, cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    paths = write_run(log, args.out)
    if not log.completed:
        print(f"simulation failed: {log.failure['reason']}", file=sys.stderr)
        print(f"partial log written to {paths['csv']}", file=sys.stderr)
        return 1
    summary = metrics(log)
    print(f"scenario {scenario.name} ({cfg.controller}, smid "
          f"{'on' if cfg.smid_enabled else 'off'}): {len(log.times)} samples")
    for key in ("min_h", "final_state_norm", "final_position_norm", "peak_u_inf",
                "peak_u_inf_first_second", "control_energy", "min_margin_barrier",
                "box_volume_ratio"):
        print(f"  {key:28s} {summary[key]:.6g}")
    print(f"wrote {paths['csv']} and {paths['json']}")
    return 0


def _resolve_summary(path) -> str:
    import pathlib

    p = pathlib.Path(path)
    if p.is_dir():
        p = p / "summary.json"
    return str(p)


def _cmd_compare(args) -> int:
    import pathlib

    paths = [_resolve_summary(args.run_a), _resolve_summary(args.run_b)]
    summaries = []
    for p in paths:
        if not pathlib.Path(p).is_file():
            print(f"error: missing summary file {p}", file=sys.stderr)
            return 2
        summaries.append(load_summary(p))
    ma, mb = summaries[0].get("metrics", {}), summaries[1].get("metrics", {})

    def delta(key):
        if key in ma and key in mb:
            return ma[key] - mb[key]
        return None

    peak_a = ma.get("peak_u_inf_first_second")
    peak_b = mb.get("peak_u_inf_first_second")
    ratio = None
    if peak_a is not None and peak_b not in (None, 0):
        ratio = peak_a / peak_b
    widths_a = ma.get("final_box_widths")
    widths_b = mb.get("final_box_widths")
    width_delta = None
    if widths_a is not None and widths_b is not None and len(widths_a) == len(widths_b):
        width_delta = [wa - wb for wa, wb in zip(widths_a, widths_b)]

    report = {
        "run_a": paths[0],
        "run_b": paths[1],
        "min_h": {"a": ma.get("min_h"), "b": mb.get("min_h"), "delta": delta("min_h")},
        "control_energy": {"a": ma.get("control_energy"),
                           "b": mb.get("control_energy"),
                           "delta": delta("control_energy")},
        "peak_u_inf_first_second": {"a": peak_a, "b": peak_b,
                                    "ratio_a_over_b": ratio},
        "final_box_width_delta": width_delta,
    }
    for key, entry in report.items():
        if isinstance(entry, dict):
            print(f"{key}: {json.dumps(entry, sort_keys=True)}")
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {args.out}")
    return 0


def _cmd_dump(args) -> int:
    scenario = get_scenario(args.name)
    print(json.dumps(scenario.describe(), indent=2, sort_keys=True))
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate":
        return _cmd_simulate(args)
    if args.command == "compare":
        return _cmd_compare(args)
    return _cmd_dump(args)


if __name__ == "__main__":
    sys.exit(main())
