import numpy as np
import pytest

from boxsafe.certificates import (
    BarrierCandidate,
    ClassKappa,
    LyapunovCandidate,
    hocbf_constraint,
    rcbf_constraint,
    rclf_constraint,
)
from boxsafe.model import UncertainModel

from helpers import central_difference, finite_difference_gradient


def theta_free_model():
    """Known dynamics: structure matrices are zero."""
    return UncertainModel(
        n=2, m=1, p=1,
        f=lambda x: np.array([x[1], -x[0]]),
        g=lambda x: np.array([[0.0], [1.0]]),
        F=lambda x: np.zeros((2, 1)),
        G=lambda x: np.zeros((2, 1)),
    )


class TestClassKappa:
    def test_cubic(self):
        alpha = ClassKappa("power", 1.0, 3)
        assert alpha(2.0) == 8.0
        assert alpha.derivative(2.0) == 12.0

    def test_zero(self):
        for kappa in (ClassKappa("power", 2.0, 5), ClassKappa("linear", 0.5)):
            assert kappa(0.0) == 0.0

    def test_linear_half(self):
        gamma = ClassKappa("linear", 0.5)
        assert gamma(0.25) == 0.125

    def test_odd_powers_preserve_sign(self):
        alpha = ClassKappa("power", 1.0, 3)
        assert alpha(-2.0) == -8.0

    def test_strictly_increasing_on_samples(self, rng):
        for kappa in (ClassKappa("power", 0.7, 3), ClassKappa("linear", 2.0)):
            s = np.sort(rng.normal(size=50) * 3)
            vals = [kappa(v) for v in s]
            assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_validation(self):
        with pytest.raises(ValueError):
            ClassKappa("power", 1.0, 2)  # even exponent
        with pytest.raises(ValueError):
            ClassKappa("linear", -1.0)
        with pytest.raises(ValueError):
            ClassKappa("sqrt", 1.0)


class TestBarrierConstraint:
    def test_nonlinear2d_boundary_point(self, nonlinear2d):
        con = rcbf_constraint(nonlinear2d.model, nonlinear2d.barriers[0], [1.0, 0.0])
        assert con.sense == ">="
        assert con.c0 == 0.0
        np.testing.assert_allclose(con.c_u, [0.0])
        np.testing.assert_allclose(con.c_F, [-1.0, 0.0, 0.0])
        np.testing.assert_allclose(con.c_G, [0.0])
        assert con.rhs == 0.0  # boundary: alpha(0) = 0 regardless of alpha

    def test_theta_free_model_reduces_to_nominal(self):
        model = theta_free_model()
        barrier = BarrierCandidate(
            h=lambda x: 4.0 - x @ x,
            grad_h=lambda x: -2.0 * x,
            alpha=ClassKappa("power", 1.0, 3),
        )
        x = np.array([1.0, -0.5])
        con = rcbf_constraint(model, barrier, x)
        assert np.all(con.c_F == 0.0) and np.all(con.c_G == 0.0)
        # remaining terms are the nominal h-derivative condition
        assert con.c0 == pytest.approx(barrier.grad_h(x) @ model.f(x))
        np.testing.assert_allclose(con.c_u, barrier.grad_h(x) @ model.g(x))

    def test_wrong_degree_rejected(self, planar_robot):
        with pytest.raises(ValueError):
            rcbf_constraint(planar_robot.model, planar_robot.barriers[0],
                            planar_robot.x0)


class TestLyapunovConstraint:
    def test_nonlinear2d_example(self, nonlinear2d):
        con = rclf_constraint(nonlinear2d.model, nonlinear2d.lyapunov, [1.0, 0.0])
        assert con.sense == "<="
        np.testing.assert_allclose(con.c_F, [1.0, 0.0, 0.0])
        assert con.rhs == pytest.approx(-0.125)

    def test_origin_is_neutral(self, nonlinear2d):
        con = rclf_constraint(nonlinear2d.model, nonlinear2d.lyapunov, [0.0, 0.0])
        assert con.c0 == 0.0
        assert con.rhs == 0.0

    def test_theta_free_model(self):
        model = theta_free_model()
        lyap = LyapunovCandidate(
            V=lambda x: 0.5 * x @ x,
            grad_V=lambda x: x,
            gamma=ClassKappa("linear", 1.0),
        )
        x = np.array([0.3, -0.7])
        con = rclf_constraint(model, lyap, x)
        assert np.all(con.theta_coefficients([1.0]) == 0.0)
        assert con.c0 == pytest.approx(x @ model.f(x))


class TestSecondOrderConstraint:
    def test_robot_worked_example(self, planar_robot):
        x = np.array([0.0, 0.0, 1.0, 0.0])
        con = hocbf_constraint(planar_robot.model, planar_robot.barriers[0], x)
        np.testing.assert_allclose(con.c_F, [-5.0, 0.0])
        np.testing.assert_allclose(con.c_G, [5.0, -5.0])
        np.testing.assert_allclose(con.c_u, [0.0, 0.0])
        # hdot = 5, h = 10.25, alpha1'(h) = 3 h^2, D.f = 2
        assert con.c0 == pytest.approx(2.0 + 3.0 * 10.25 ** 2 * 5.0)
        psi1 = 5.0 + 10.25 ** 3
        assert con.rhs == pytest.approx(-psi1 ** 3)

    def test_friction_terms_vanish_at_rest(self, planar_robot):
        con = hocbf_constraint(planar_robot.model, planar_robot.barriers[0],
                               [1.0, -2.0, 0.0, 0.0])
        np.testing.assert_allclose(con.c_F, [0.0, 0.0])

    def test_linear_inner_rate_contributes_gain_times_hdot(self, planar_robot):
        base = planar_robot.barriers[0]
        kappa = 2.5
        x = np.array([0.5, 0.5, 1.0, -1.0])
        linear = BarrierCandidate(
            h=base.h, grad_h=base.grad_h, alpha=base.alpha, relative_degree=2,
            alpha1=ClassKappa("linear", kappa), hess_h=base.hess_h,
            grad_hdot=base.grad_hdot,
        )
        cubic_hdot = float(base.grad_h(x) @ planar_robot.model.f(x))
        con = hocbf_constraint(planar_robot.model, linear, x)
        D_f = float(np.asarray(base.grad_hdot(x)) @ planar_robot.model.f(x))
        assert con.c0 == pytest.approx(D_f + kappa * cubic_hdot)

    def test_degree_precondition_enforced(self, nonlinear2d, planar_robot):
        with pytest.raises(ValueError):
            hocbf_constraint(nonlinear2d.model, nonlinear2d.barriers[0],
                             nonlinear2d.x0)
        # a position-level candidate on a model whose G hits the first rows
        bad_model = UncertainModel(
            n=4, m=2, p=2,
            f=lambda x: np.array([x[2], x[3], 0.0, 0.0]),
            g=lambda x: np.zeros((4, 2)),
            F=lambda x: np.zeros((4, 2)),
            G=lambda x: np.vstack([np.eye(2), np.zeros((2, 2))]),
        )
        with pytest.raises(ValueError):
            hocbf_constraint(bad_model, planar_robot.barriers[0],
                             np.array([1.0, 1.0, 0.0, 0.0]))

    def test_robot_gradient_annihilates_input_directions(self, planar_robot, rng):
        model = planar_robot.model
        barrier = planar_robot.barriers[0]
        for _ in range(20):
            x = rng.normal(size=4) * 3
            grad = barrier.grad_h(x)
            assert np.all(grad[2:] == 0.0)
            assert np.abs(grad @ model.g(x)).max() == 0.0
            assert np.abs(grad @ model.F(x)).max() == 0.0
            assert np.abs(grad @ model.G(x)).max() == 0.0


class TestDerivativeConsistency:
    def test_gradients_match_values(self, nonlinear2d, planar_robot, rng):
        for sc in (nonlinear2d, planar_robot):
            for _ in range(20):
                x = rng.normal(size=sc.model.n)
                for barrier in sc.barriers:
                    fd = finite_difference_gradient(barrier.h, x)
                    np.testing.assert_allclose(barrier.grad_h(x), fd,
                                               rtol=1e-5, atol=1e-5)
                fd = finite_difference_gradient(sc.lyapunov.V, x)
                np.testing.assert_allclose(sc.lyapunov.grad_V(x), fd,
                                           rtol=1e-5, atol=1e-5)

    def test_grad_hdot_matches_finite_differences(self, planar_robot, rng):
        model = planar_robot.model
        barrier = planar_robot.barriers[0]
        hdot = lambda y: float(barrier.grad_h(y) @ model.f(y))
        for _ in range(20):
            x = rng.normal(size=4) * 2
            fd = finite_difference_gradient(hdot, x)
            np.testing.assert_allclose(barrier.grad_hdot(x), fd, rtol=1e-6,
                                       atol=1e-6)

    def test_constraint_value_is_certificate_derivative(self, nonlinear2d,
                                                        planar_robot, rng):
        """The reduced-form value must equal the time derivative of h, V, or
        psi1 along the uncertain dynamics, independently of any solver."""
        checks = 0
        for sc in (nonlinear2d, planar_robot):
            model = sc.model
            for _ in range(40):
                x = rng.normal(size=model.n)
                u = rng.normal(size=model.m)
                theta = rng.normal(size=model.d)
                xdot = model.dynamics(x, u, theta)
                for barrier in sc.barriers:
                    if barrier.relative_degree == 1:
                        con = rcbf_constraint(model, barrier, x)
                        fd = central_difference(barrier.h, x, xdot)
                    else:
                        con = hocbf_constraint(model, barrier, x)
                        fd = central_difference(
                            lambda y: barrier.psi1(model, y), x, xdot)
                    value = con.evaluate(u, theta)
                    assert abs(value - fd) <= 1e-4 * (1.0 + abs(value))
                    checks += 1
                con = rclf_constraint(model, sc.lyapunov, x)
                fd = central_difference(sc.lyapunov.V, x, xdot)
                value = con.evaluate(u, theta)
                assert abs(value - fd) <= 1e-4 * (1.0 + abs(value))
                checks += 1
        assert checks == 160
