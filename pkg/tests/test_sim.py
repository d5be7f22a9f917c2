import csv
import json

import numpy as np
import pytest

from boxsafe.model import UncertainModel
from boxsafe.sim import SimConfig, load_summary, metrics, rk4_step, run, write_run
from boxsafe.smid import SmidConfig


def scalar_model(field):
    return UncertainModel(
        n=1, m=1, p=0,
        f=field,
        g=lambda x: np.array([[1.0]]),
        F=lambda x: np.zeros((1, 0)),
        G=lambda x: np.zeros((1, 1)),
    )


class TestRk4:
    def test_zero_field_is_identity(self, planar_robot):
        x = np.array([1.0, 2.0, 0.0, 0.0])
        x2 = rk4_step(planar_robot.model, np.zeros(4), x, np.zeros(2), 0.1)
        np.testing.assert_allclose(x2[:2], x[:2])

    def test_constant_field_exact(self):
        model = scalar_model(lambda x: np.zeros(1))
        x2 = rk4_step(model, np.zeros(1), [0.0], [1.0], 0.01)
        assert x2[0] == pytest.approx(0.01, abs=1e-18)

    def test_linear_decay_matches_series(self):
        model = scalar_model(lambda x: -x)
        x2 = rk4_step(model, np.zeros(1), [1.0], [0.0], 0.1)
        assert x2[0] == pytest.approx(0.9048375, abs=1e-9)


class TestConfig:
    def test_defaults_come_from_scenario(self, nonlinear2d):
        cfg = SimConfig().resolved(nonlinear2d)
        assert cfg.dt == nonlinear2d.dt
        assert cfg.horizon == nonlinear2d.horizon
        np.testing.assert_allclose(cfg.x0, nonlinear2d.x0)

    def test_window_divisibility_enforced(self, nonlinear2d):
        cfg = SimConfig(smid_enabled=True, smid=SmidConfig(window=0.25, epsilon=0.1),
                        dt=0.02)
        with pytest.raises(ValueError):
            cfg.resolved(nonlinear2d)

    def test_bad_controller_rejected(self, nonlinear2d):
        with pytest.raises(ValueError):
            SimConfig(controller="mpc").resolved(nonlinear2d)

    def test_horizon_must_cover_a_step(self, nonlinear2d):
        with pytest.raises(ValueError):
            SimConfig(horizon=0.001, dt=0.01).resolved(nonlinear2d)


class TestRun:
    def test_short_run_logs_are_rectangular(self, nonlinear2d):
        log = run(nonlinear2d, SimConfig(horizon=0.5))
        assert log.completed
        n = log.times.size
        assert n == 51
        for arr in (log.states, log.inputs, log.h, log.V, log.margin_barrier,
                    log.margin_clf, log.filter_active):
            assert len(arr) == n

    def test_identical_until_first_update(self, nonlinear2d):
        """Identification cannot influence the loop before a window completes."""
        off = run(nonlinear2d, SimConfig(horizon=1.0))
        on = run(nonlinear2d, SimConfig(horizon=1.0, smid_enabled=True))
        window = nonlinear2d.smid.window
        k_switch = int(round(window / nonlinear2d.dt))
        np.testing.assert_array_equal(off.states[: k_switch + 1],
                                      on.states[: k_switch + 1])
        assert not np.array_equal(off.states, on.states)

    def test_determinism(self, nonlinear2d):
        a = run(nonlinear2d, SimConfig(horizon=1.5, smid_enabled=True))
        b = run(nonlinear2d, SimConfig(horizon=1.5, smid_enabled=True))
        assert np.array_equal(a.states, b.states)
        assert np.array_equal(a.inputs, b.inputs)
        assert a.box_records == b.box_records

    def test_exact_mode_uses_singleton_box(self, nonlinear2d):
        log = run(nonlinear2d, SimConfig(horizon=0.2, controller="exact"))
        rec = log.box_records[0]
        np.testing.assert_allclose(rec["lower"], rec["upper"])
        np.testing.assert_allclose(rec["lower"], nonlinear2d.theta_true)

    def test_rclf_only_mode_runs(self, nonlinear2d):
        log = run(nonlinear2d, SimConfig(horizon=0.5, controller="rclf"))
        assert log.completed

    def test_rcbf_only_mode_drifts_safely(self, nonlinear2d):
        log = run(nonlinear2d, SimConfig(horizon=1.0, controller="rcbf"))
        assert log.completed
        assert log.h.min() >= -1e-3

    def test_smid_conflict_truncates_with_reason(self, nonlinear2d):
        cfg = SimConfig(horizon=2.0, smid_enabled=True,
                        smid=SmidConfig(window=0.3, epsilon=1e-9))
        log = run(nonlinear2d, cfg)
        assert not log.completed
        assert "identification conflict" in log.failure["reason"]
        assert log.times.size == log.failure["step"] + 1

    def test_lyapunov_decrease_when_filter_inactive(self, nonlinear2d):
        log = run(nonlinear2d, SimConfig(horizon=4.0))
        assert log.completed
        dt = log.config.dt
        vdot = np.diff(log.V) / dt
        gamma = nonlinear2d.lyapunov.gamma
        checked = 0
        for k in range(len(vdot)):
            if log.filter_active[k] or log.filter_active[k + 1]:
                continue
            bound = -gamma(log.V[k]) + 1e-2 * (1 + abs(vdot[k]))
            assert vdot[k] <= bound
            checked += 1
        assert checked > 100

    def test_lyapunov_nonincreasing_across_switches(self, nonlinear2d):
        log = run(nonlinear2d, SimConfig(horizon=4.0, smid_enabled=True))
        assert log.completed
        update_times = [rec["t"] for rec in log.box_records[1:]]
        for t_u in update_times:
            k = int(round(t_u / log.config.dt))
            if k + 1 < log.V.size:
                assert log.V[k + 1] <= log.V[k] + 1e-9


class TestMetrics:
    def test_safe_run_reports_nonnegative_min_h(self, nonlinear2d):
        log = run(nonlinear2d, SimConfig(horizon=1.0))
        m = metrics(log)
        assert m["min_h"] >= 0.0
        assert m["completed"]

    def test_zero_input_run_has_zero_effort(self, nonlinear2d):
        log = run(nonlinear2d, SimConfig(horizon=0.3))
        log.inputs = np.zeros_like(log.inputs)
        m = metrics(log)
        assert m["peak_u_inf"] == 0.0
        assert m["control_energy"] == 0.0

    def test_box_volume_ratio_without_updates_is_one(self, nonlinear2d):
        log = run(nonlinear2d, SimConfig(horizon=0.3))
        assert metrics(log)["box_volume_ratio"] == 1.0


class TestFiles:
    def test_csv_and_json_written(self, nonlinear2d, tmp_path):
        log = run(nonlinear2d, SimConfig(horizon=0.5, smid_enabled=True))
        paths = write_run(log, tmp_path / "r")
        with open(paths["csv"]) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["t", "x1", "x2", "u1", "h", "V", "margin_barrier",
                           "margin_clf"]
        assert len(rows) == log.times.size + 1
        first = [float(v) for v in rows[1]]
        assert first[0] == 0.0
        np.testing.assert_allclose(first[1:3], log.states[0])
        summary = load_summary(paths["json"])
        assert summary["failure"] is None
        assert summary["scenario"]["name"] == "nonlinear2d"
        assert summary["metrics"]["min_h"] == metrics(log)["min_h"]
        assert len(summary["box_evolution"]) == len(log.box_records)

    def test_robot_csv_has_psi1_column(self, planar_robot, tmp_path):
        log = run(planar_robot, SimConfig(horizon=0.2))
        paths = write_run(log, tmp_path / "r")
        with open(paths["csv"]) as fh:
            header = fh.readline().strip().split(",")
        assert header == ["t", "x1", "x2", "x3", "x4", "u1", "u2", "h", "psi1",
                          "V", "margin_barrier", "margin_clf"]

    def test_h_and_v_recomputed_from_states(self, nonlinear2d):
        log = run(nonlinear2d, SimConfig(horizon=0.3))
        barrier = nonlinear2d.barriers[0]
        for i in range(0, log.times.size, 7):
            assert log.h[i, 0] == pytest.approx(barrier.h(log.states[i]), abs=1e-12)
            assert log.V[i] == pytest.approx(nonlinear2d.lyapunov.V(log.states[i]),
                                             abs=1e-12)
