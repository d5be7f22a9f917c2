#!/usr/bin/env python3
"""Stabilize the planar nonlinear benchmark under three controllers.

Runs the robust pipeline with the full uncertainty box, the same pipeline
with online identification shrinking the box, and a baseline that knows the
true parameters.  Prints the trade-off: all three are safe, but without
identification the controller stays far from the safe-set boundary and
spends roughly an order of magnitude more input energy.

Pass an output directory to also write the three run folders (trajectory
CSV + summary JSON) for the plotting frontend.
"""

import sys

import numpy as np

from boxsafe import SimConfig, metrics, run, scenario_nonlinear2d, write_run

scenario = scenario_nonlinear2d()
print(f"scenario: {scenario.name}, x0 = {scenario.x0}, horizon {scenario.horizon} s")
print(f"initial parameter box: {scenario.theta0}")
print(f"true parameters (hidden from the controller): {scenario.theta_true}\n")

configs = {
    "robust (no identification)": SimConfig(smid_enabled=False),
    "robust + identification": SimConfig(smid_enabled=True),
    "exact model baseline": SimConfig(controller="exact"),
}

out_dir = sys.argv[1] if len(sys.argv) > 1 else None
logs = {}
for label, cfg in configs.items():
    log = run(scenario, cfg)
    assert log.completed, log.failure
    logs[label] = log
    if out_dir is not None:
        slug = label.split()[0] if "identification" not in label else (
            "smid_on" if "+" in label else "smid_off")
        write_run(log, f"{out_dir}/{slug}")

print(f"{'controller':32s} {'min h':>8s} {'|x(T)|':>9s} {'peak |u|':>9s} "
      f"{'energy':>9s} {'box vol':>8s}")
for label, log in logs.items():
    m = metrics(log)
    print(f"{label:32s} {m['min_h']:8.3f} {m['final_state_norm']:9.4f} "
          f"{m['peak_u_inf']:9.2f} {m['control_energy']:9.1f} "
          f"{m['box_volume_ratio']:8.3f}")

on = metrics(logs["robust + identification"])
off = metrics(logs["robust (no identification)"])
print(f"\nidentification lets the trajectory approach the boundary "
      f"{off['min_h'] - on['min_h']:.2f} units closer")
print(f"and cuts input energy by a factor of "
      f"{off['control_energy'] / on['control_energy']:.1f}.")

final = logs["robust + identification"].final_box()
print(f"\nfinal parameter box after {on['n_box_updates']} updates: {final}")
print(f"true parameters still inside: {final.contains(scenario.theta_true)}")
