"""Fixed-step closed-loop simulation with optional identification in the loop.

One run advances the true plant with classical RK4 under sampled-and-hold
control: the input is recomputed from the current parameter box once per
step and held constant across it.  When identification is enabled, every
completed integration window appends a record to the history stack and
triggers a box update; the controller sees the refined box from the next
step on, so each update is a controlled switching instant.

Logged quantities are recomputed from states (h, V, worst-case margins via
the corner oracle), never copied from controller internals, so the log
doubles as an independent audit of the controller.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .controller import (
    ControlOutput,
    pipeline_policy,
    rcbf_filter,
    rclf_policy,
    verify_worst_case,
)
from .certificates import build_constraint, rclf_constraint
from .model import UncertainModel
from .paramset import ParameterBox
from .scenarios import Scenario
from .smid import (
    HistoryStack,
    IdentificationConflictError,
    SmidConfig,
    WindowAccumulator,
    update_set,
)

__all__ = ["SimConfig", "TrajectoryLog", "rk4_step", "run", "metrics",
           "write_run", "load_summary"]

CONTROLLERS = ("pipeline", "rcbf", "rclf", "exact")


@dataclass
class SimConfig:
    """Run settings.  Fields left as None fall back to scenario defaults."""

    dt: float | None = None
    horizon: float | None = None
    x0: np.ndarray | None = None
    controller: str = "pipeline"
    smid_enabled: bool = False
    smid: SmidConfig | None = None
    clf_slack: bool = False
    seed: int = 0

    def resolved(self, scenario: Scenario) -> "SimConfig":
        cfg = SimConfig(
            dt=self.dt if self.dt is not None else scenario.dt,
            horizon=self.horizon if self.horizon is not None else scenario.horizon,
            x0=np.asarray(self.x0 if self.x0 is not None else scenario.x0, dtype=float),
            controller=self.controller,
            smid_enabled=self.smid_enabled,
            smid=self.smid if self.smid is not None else scenario.smid,
            clf_slack=self.clf_slack,
            seed=self.seed,
        )
        if cfg.dt <= 0:
            raise ValueError("dt must be positive")
        if cfg.horizon < cfg.dt:
            raise ValueError("horizon must cover at least one step")
        if cfg.controller not in CONTROLLERS:
            raise ValueError(f"controller must be one of {CONTROLLERS}")
        if cfg.x0.size != scenario.model.n:
            raise ValueError("x0 dimension does not match the model")
        if cfg.smid_enabled:
            ratio = cfg.smid.window / cfg.dt
            if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
                raise ValueError("identification window must be an integer "
                                 "multiple of dt")
        return cfg

    def to_dict(self) -> dict:
        return {
            "dt": self.dt,
            "horizon": self.horizon,
            "x0": None if self.x0 is None else np.asarray(self.x0).tolist(),
            "controller": self.controller,
            "smid_enabled": self.smid_enabled,
            "smid": None if self.smid is None else self.smid.to_dict(),
            "clf_slack": self.clf_slack,
            "seed": self.seed,
        }


@dataclass
class TrajectoryLog:
    """Columnar run record.  All arrays share the same leading length."""

    scenario: Scenario
    config: SimConfig
    times: np.ndarray = None
    states: np.ndarray = None
    inputs: np.ndarray = None
    h: np.ndarray = None            # one column per barrier
    psi1: np.ndarray | None = None  # one column per degree-2 barrier
    V: np.ndarray = None
    margin_barrier: np.ndarray = None  # min over barriers, corner oracle
    margin_clf: np.ndarray = None
    filter_active: np.ndarray = None
    box_records: list = field(default_factory=list)  # {"t", "lower", "upper"}
    failure: dict | None = None

    @property
    def completed(self) -> bool:
        return self.failure is None

    def final_box(self) -> ParameterBox:
        rec = self.box_records[-1]
        return ParameterBox(np.asarray(rec["lower"]), np.asarray(rec["upper"]))


def rk4_step(model: UncertainModel, theta, x, u, dt: float) -> np.ndarray:
    """Classical fourth-order Runge-Kutta step with the input held constant."""
    x = np.asarray(x, dtype=float)
    k1 = model.dynamics(x, u, theta)
    k2 = model.dynamics(x + 0.5 * dt * k1, u, theta)
    k3 = model.dynamics(x + 0.5 * dt * k2, u, theta)
    k4 = model.dynamics(x + dt * k3, u, theta)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _controller_step(scenario, cfg, box, x, warm) -> ControlOutput:
    model = scenario.model
    if cfg.controller in ("pipeline", "exact"):
        return pipeline_policy(model, scenario.lyapunov, scenario.barriers, box, x,
                               warm=warm, clf_slack=cfg.clf_slack)
    if cfg.controller == "rclf":
        return rclf_policy(model, scenario.lyapunov, box, x, warm=warm,
                           slack=cfg.clf_slack)
    out = rcbf_filter(model, scenario.barriers, box, x,
                      k_d=np.zeros(model.m), warm=warm)
    return out


def run(scenario: Scenario, config: SimConfig | None = None) -> TrajectoryLog:
    """Simulate the closed loop; returns the trajectory log (possibly truncated
    with a failure record if the controller or the identifier gives up)."""
    cfg = (config or SimConfig()).resolved(scenario)
    model = scenario.model
    theta = scenario.theta_true
    n_steps = int(round(cfg.horizon / cfg.dt))

    box = ParameterBox.singleton(theta) if cfg.controller == "exact" else scenario.theta0
    box_records = [{"t": 0.0, "lower": box.lower.tolist(), "upper": box.upper.tolist()}]

    acc = stack = None
    if cfg.smid_enabled:
        acc = WindowAccumulator(model, cfg.smid.window, cfg.x0)
        stack = HistoryStack(cfg.smid.capacity)

    nb = len(scenario.barriers)
    deg2 = [b for b in scenario.barriers if b.relative_degree == 2]
    times, states, inputs = [], [], []
    h_log, psi_log, v_log = [], [], []
    mb_log, mc_log, fa_log = [], [], []
    warm: dict = {}
    failure = None

    x = cfg.x0.copy()
    u_prev = np.zeros(model.m)

    def log_row(t, x, u, b):
        times.append(t)
        states.append(x.copy())
        inputs.append(np.asarray(u, dtype=float).copy())
        h_log.append([float(bar.h(x)) for bar in scenario.barriers])
        if deg2:
            psi_log.append([bar.psi1(model, x) for bar in deg2])
        v_log.append(float(scenario.lyapunov.V(x)))
        cons = [build_constraint(model, bar, x) for bar in scenario.barriers]
        mb_log.append(min(verify_worst_case(c, b, u) for c in cons))
        mc_log.append(verify_worst_case(rclf_constraint(model, scenario.lyapunov, x), b, u))

    for k in range(n_steps):
        t = k * cfg.dt
        out = _controller_step(scenario, cfg, box, x, warm)
        if not out.optimal:
            failure = {"reason": f"controller failed at t={t:.4f}: {out.message}",
                       "t": t, "step": k}
            break
        u = out.u
        log_row(t, x, u, box)
        fa_log.append(bool(out.filter_active) if out.filter_active is not None else False)

        x_next = rk4_step(model, theta, x, u, cfg.dt)
        if not np.isfinite(x_next).all():
            failure = {"reason": f"state diverged at t={t + cfg.dt:.4f}", "t": t,
                       "step": k}
            break

        if cfg.smid_enabled:
            try:
                entry = acc.accumulate(x_next, u, cfg.dt)
            except FloatingPointError as exc:
                failure = {"reason": str(exc), "t": t, "step": k}
                break
            if entry is not None:
                stack.push(entry)
                try:
                    box = update_set(box, stack, cfg.smid.epsilon)
                except IdentificationConflictError as exc:
                    failure = {"reason": f"identification conflict: {exc}",
                               "t": entry.t, "step": k}
                    break
                box_records.append({"t": entry.t, "lower": box.lower.tolist(),
                                    "upper": box.upper.tolist()})
        x = x_next
        u_prev = u

    if failure is None:
        # Final row is a genuine controller evaluation at x(T) so every
        # logged (state, input) pair satisfies the robust constraints.
        out = _controller_step(scenario, cfg, box, x, warm)
        u_final = out.u if out.optimal else u_prev
        log_row(n_steps * cfg.dt, x, u_final, box)
        fa_log.append(bool(out.filter_active) if out.optimal and
                      out.filter_active is not None else False)

    return TrajectoryLog(
        scenario=scenario,
        config=cfg,
        times=np.asarray(times),
        states=np.asarray(states).reshape(len(times), model.n),
        inputs=np.asarray(inputs).reshape(len(times), model.m),
        h=np.asarray(h_log).reshape(len(times), nb),
        psi1=np.asarray(psi_log).reshape(len(times), len(deg2)) if deg2 else None,
        V=np.asarray(v_log),
        margin_barrier=np.asarray(mb_log),
        margin_clf=np.asarray(mc_log),
        filter_active=np.asarray(fa_log, dtype=bool),
        box_records=box_records,
        failure=failure,
    )


def metrics(log: TrajectoryLog) -> dict:
    """Run summary: safety margin, terminal error, control effort, box size."""
    if log.times.size == 0:
        raise ValueError("empty trajectory log")
    pos = list(log.scenario.position_dims)
    x_end = log.states[-1]
    u_inf = np.abs(log.inputs).max(axis=1)
    first = log.times <= 1.0 + 1e-12
    u_sq = (log.inputs ** 2).sum(axis=1)
    first_box = log.box_records[0]
    last_box = log.box_records[-1]
    widths0 = np.asarray(first_box["upper"]) - np.asarray(first_box["lower"])
    widths1 = np.asarray(last_box["upper"]) - np.asarray(last_box["lower"])
    vol0 = float(np.prod(widths0))
    vol1 = float(np.prod(widths1))
    out = {
        "completed": log.completed,
        "steps": int(log.times.size),
        "min_h": float(log.h.min()),
        "final_state_norm": float(np.linalg.norm(x_end)),
        "final_position_norm": float(np.linalg.norm(x_end[pos])),
        "peak_u_inf": float(u_inf.max()),
        "peak_u_inf_first_second": float(u_inf[first].max()) if first.any() else 0.0,
        "control_energy": float(np.trapezoid(u_sq, log.times)),
        "min_margin_barrier": float(log.margin_barrier.min()),
        "final_box_widths": widths1.tolist(),
        "initial_box_widths": widths0.tolist(),
        "box_volume_ratio": vol1 / vol0 if vol0 > 0 else 1.0,
        "n_box_updates": len(log.box_records) - 1,
    }
    if log.psi1 is not None:
        out["min_psi1"] = float(log.psi1.min())
    inactive = ~log.filter_active
    if inactive.any():
        out["max_margin_clf_inactive"] = float(log.margin_clf[inactive].max())
    return out


# -- file interfaces ----------------------------------------------------------


def _csv_header(log: TrajectoryLog) -> list[str]:
    n, m = log.scenario.model.n, log.scenario.model.m
    cols = ["t"]
    cols += [f"x{i + 1}" for i in range(n)]
    cols += [f"u{i + 1}" for i in range(m)]
    cols += ["h"] if log.h.shape[1] == 1 else [f"h{i + 1}" for i in range(log.h.shape[1])]
    if log.psi1 is not None:
        cols += ["psi1"] if log.psi1.shape[1] == 1 else [
            f"psi1_{i + 1}" for i in range(log.psi1.shape[1])]
    cols += ["V", "margin_barrier", "margin_clf"]
    return cols


def write_run(log: TrajectoryLog, out_dir) -> dict:
    """Write trajectory.csv and summary.json into a directory; returns paths."""
    import pathlib

    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "trajectory.csv"
    json_path = out_dir / "summary.json"

    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_csv_header(log))
        for i in range(log.times.size):
            row = [log.times[i], *log.states[i], *log.inputs[i], *log.h[i]]
            if log.psi1 is not None:
                row += list(log.psi1[i])
            row += [log.V[i], log.margin_barrier[i], log.margin_clf[i]]
            writer.writerow([repr(float(v)) for v in row])

    summary = {
        "scenario": log.scenario.describe(),
        "config": log.config.to_dict(),
        "metrics": metrics(log) if log.times.size else {},
        "box_evolution": log.box_records,
        "failure": log.failure,
    }
    with open(json_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"csv": str(csv_path), "json": str(json_path)}


def load_summary(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
