import numpy as np
import pytest

from boxsafe.model import UncertainModel
from boxsafe.scenarios import get_scenario


class TestRegressor:
    def test_nonlinear2d_at_unit_state(self, nonlinear2d):
        phi = nonlinear2d.model.regressor([1.0, 0.0], [0.0])
        np.testing.assert_allclose(phi, [[1, 0, 0, 0], [0, 0, 1, 0]])

    def test_zero_input_zeroes_gain_block(self, planar_robot, rng):
        model = planar_robot.model
        for _ in range(10):
            x = rng.normal(size=model.n)
            phi = model.regressor(x, np.zeros(model.m))
            assert np.all(phi[:, model.p:] == 0.0)

    def test_robot_blocks(self, planar_robot):
        phi = planar_robot.model.regressor([0.0, 0.0, 1.0, 2.0], [1.0, 1.0])
        np.testing.assert_allclose(phi[2:, :2], [[-1.0, 0.0], [0.0, -2.0]])
        np.testing.assert_allclose(phi[2:, 2:], np.eye(2))

    def test_dimension_mismatch(self, nonlinear2d):
        with pytest.raises(ValueError):
            nonlinear2d.model.regressor([1.0], [0.0])
        with pytest.raises(ValueError):
            nonlinear2d.model.regressor([1.0, 0.0], [0.0, 0.0])


class TestDynamics:
    def test_nonlinear2d_truth(self, nonlinear2d):
        xdot = nonlinear2d.model.dynamics([1.0, 0.0], [0.0], [-0.6, -1.0, 1.0, 1.0])
        np.testing.assert_allclose(xdot, [-0.6, 1.0])

    def test_equilibrium(self, nonlinear2d):
        xdot = nonlinear2d.model.dynamics([0.0, 0.0], [0.0], np.zeros(4))
        np.testing.assert_allclose(xdot, 0.0)

    def test_robot_unit_acceleration(self, planar_robot):
        m_hat = 1.7
        theta = np.array([0.0, 0.0, 1.0 / m_hat, 1.0 / m_hat])
        xdot = planar_robot.model.dynamics(np.zeros(4), [m_hat, 0.0], theta)
        np.testing.assert_allclose(xdot, [0.0, 0.0, 1.0, 0.0], atol=1e-14)

    def test_theta_dimension_checked(self, planar_robot):
        with pytest.raises(ValueError):
            planar_robot.model.dynamics(np.zeros(4), np.zeros(2), np.zeros(3))

    def test_affine_in_input(self, nonlinear2d, planar_robot, rng):
        for sc in (nonlinear2d, planar_robot):
            model = sc.model
            for _ in range(25):
                x = rng.normal(size=model.n)
                theta = rng.normal(size=model.d)
                u1 = rng.normal(size=model.m)
                u2 = rng.normal(size=model.m)
                base = model.dynamics(x, np.zeros(model.m), theta)
                lhs = model.dynamics(x, u1 + u2, theta) - base
                rhs = (model.dynamics(x, u1, theta) - base) + (
                    model.dynamics(x, u2, theta) - base)
                np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_affine_in_theta(self, nonlinear2d, planar_robot, rng):
        for sc in (nonlinear2d, planar_robot):
            model = sc.model
            for _ in range(25):
                x = rng.normal(size=model.n)
                u = rng.normal(size=model.m)
                t1 = rng.normal(size=model.d)
                t2 = rng.normal(size=model.d)
                a = rng.random()
                lhs = model.dynamics(x, u, a * t1 + (1 - a) * t2)
                rhs = a * model.dynamics(x, u, t1) + (1 - a) * model.dynamics(x, u, t2)
                np.testing.assert_allclose(lhs, rhs, atol=1e-10)


class TestScenarios:
    def test_nonlinear2d_parameters(self, nonlinear2d):
        np.testing.assert_allclose(nonlinear2d.theta_true, [-0.6, -1.0, 1.0, 1.0])
        np.testing.assert_allclose(nonlinear2d.theta0.lower, [-1.2, -2.0, 0.5, 0.8])
        np.testing.assert_allclose(nonlinear2d.theta0.upper, [-0.2, -0.1, 1.4, 1.2])
        assert (nonlinear2d.model.n, nonlinear2d.model.m, nonlinear2d.model.p) == (2, 1, 3)

    def test_robot_parameters(self, planar_robot):
        np.testing.assert_allclose(planar_robot.theta0.upper, [5.0, 5.0, 2.0, 2.0])
        assert planar_robot.obstacle["center"] == [-2.5, 2.5]
        assert planar_robot.obstacle["radius"] == 1.5
        theta = planar_robot.theta_true
        assert theta[2] == theta[3]  # shared mass in both input channels
        assert (planar_robot.model.n, planar_robot.model.m, planar_robot.model.p) == (4, 2, 2)

    def test_truth_inside_initial_box(self, nonlinear2d, planar_robot):
        for sc in (nonlinear2d, planar_robot):
            assert sc.theta0.contains(sc.theta_true)

    def test_initial_state_strictly_safe(self, nonlinear2d, planar_robot):
        for sc in (nonlinear2d, planar_robot):
            for barrier in sc.barriers:
                assert barrier.h(sc.x0) > 0

    def test_describe_round_trips_through_json(self, planar_robot):
        import json

        desc = json.loads(json.dumps(planar_robot.describe()))
        assert desc["theta0"]["lower"] == [0.0, 0.0, 0.1, 0.1]
        assert desc["obstacle"]["radius"] == 1.5
        assert desc["n"] == 4

    def test_unknown_scenario(self):
        with pytest.raises(KeyError):
            get_scenario("does-not-exist")
