"""The two benchmark scenarios: a planar nonlinear system and a robot.

Each scenario bundles the uncertain model, the ground-truth parameters,
the initial parameter box, certificates, and simulation defaults.  All
evaluators are closed-form code; there is no symbolic machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certificates import BarrierCandidate, ClassKappa, LyapunovCandidate
from .model import TrueParameters, UncertainModel
from .paramset import ParameterBox
from .smid import SmidConfig

__all__ = ["Scenario", "scenario_nonlinear2d", "scenario_planar_robot", "get_scenario",
           "SCENARIO_NAMES"]


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    model: UncertainModel
    true_params: TrueParameters
    theta0: ParameterBox
    barriers: tuple
    lyapunov: LyapunovCandidate
    x0: np.ndarray
    dt: float
    horizon: float
    smid: SmidConfig
    position_dims: tuple
    obstacle: dict | None = None
    safe_set_boundary: list | None = None  # sampled h = 0 polyline for plots

    @property
    def theta_true(self) -> np.ndarray:
        return self.true_params.theta

    def describe(self) -> dict:
        """JSON-ready scenario description (dimensions, sets, defaults)."""
        barriers = []
        for b in self.barriers:
            info = {"name": b.name, "relative_degree": b.relative_degree,
                    "alpha": b.alpha.to_dict()}
            if b.alpha1 is not None:
                info["alpha1"] = b.alpha1.to_dict()
            barriers.append(info)
        out = {
            "name": self.name,
            "n": self.model.n,
            "m": self.model.m,
            "p": self.model.p,
            "theta_true": self.theta_true.tolist(),
            "theta0": self.theta0.to_dict(),
            "x0": self.x0.tolist(),
            "dt": self.dt,
            "horizon": self.horizon,
            "smid": self.smid.to_dict(),
            "barriers": barriers,
            "lyapunov": {"name": self.lyapunov.name,
                         "gamma": self.lyapunov.gamma.to_dict()},
            "position_dims": list(self.position_dims),
        }
        if self.obstacle is not None:
            out["obstacle"] = dict(self.obstacle)
        if self.safe_set_boundary is not None:
            out["safe_set_boundary"] = [list(p) for p in self.safe_set_boundary]
        return out


def scenario_nonlinear2d() -> Scenario:
    """Planar nonlinear system, all four parameters uncertain.

    True dynamics: x1dot = th1 x1 + th2 x2, x2dot = th3 x1^3 + th4 x2 u.
    Safe set {1 - x1 - x2^2 >= 0}; the goal is to reach the origin without
    leaving it.
    """

    def F(x):
        return np.array([[x[0], x[1], 0.0], [0.0, 0.0, x[0] ** 3]])

    def G(x):
        return np.array([[0.0], [x[1]]])

    model = UncertainModel(
        n=2, m=1, p=3,
        f=lambda x: np.zeros(2),
        g=lambda x: np.zeros((2, 1)),
        F=F, G=G,
        name="nonlinear2d",
    )
    theta = TrueParameters(np.array([-0.6, -1.0, 1.0, 1.0]))
    theta0 = ParameterBox([-1.2, -2.0, 0.5, 0.8], [-0.2, -0.1, 1.4, 1.2])

    barrier = BarrierCandidate(
        h=lambda x: 1.0 - x[0] - x[1] ** 2,
        grad_h=lambda x: np.array([-1.0, -2.0 * x[1]]),
        alpha=ClassKappa("power", 1.0, 3),
        name="halfplane-parabola",
    )
    lyap = LyapunovCandidate(
        V=lambda x: 0.25 * x[0] ** 4 + 0.5 * x[1] ** 2,
        grad_V=lambda x: np.array([x[0] ** 3, x[1]]),
        gamma=ClassKappa("linear", 0.5),
        name="quartic",
    )
    span = np.linspace(-2.2, 2.2, 221)
    boundary = [[float(1.0 - s * s), float(s)] for s in span]
    return Scenario(
        name="nonlinear2d",
        model=model,
        true_params=theta,
        theta0=theta0,
        barriers=(barrier,),
        lyapunov=lyap,
        x0=np.array([-3.0, -1.0]),
        dt=0.01,
        horizon=20.0,
        smid=SmidConfig(window=0.3, epsilon=0.1, capacity=20),
        position_dims=(0, 1),
        safe_set_boundary=boundary,
    )


def scenario_planar_robot() -> Scenario:
    """Planar double integrator with uncertain mass and friction.

    States (x1, x2) position and (x3, x4) velocity; acceleration inputs
    act through the uncertain inverse mass, friction opposes velocity.
    The circular obstacle makes the position barrier relative degree two.
    Truth uses mass 1.2 and friction (1.0, 0.8), interior to the initial
    box so identification has room to shrink it.
    """
    mass, c1, c2 = 1.2, 1.0, 0.8
    x_o, y_o, radius = -2.5, 2.5, 1.5

    def F(x):
        out = np.zeros((4, 2))
        out[2, 0] = -x[2]
        out[3, 1] = -x[3]
        return out

    def G(x):
        out = np.zeros((4, 2))
        out[2, 0] = 1.0
        out[3, 1] = 1.0
        return out

    model = UncertainModel(
        n=4, m=2, p=2,
        f=lambda x: np.array([x[2], x[3], 0.0, 0.0]),
        g=lambda x: np.zeros((4, 2)),
        F=F, G=G,
        name="planar-robot",
    )
    theta = TrueParameters(np.array([c1 / mass, c2 / mass, 1.0 / mass, 1.0 / mass]))
    theta0 = ParameterBox([0.0, 0.0, 0.1, 0.1], [5.0, 5.0, 2.0, 2.0])

    def h(x):
        return (x[0] - x_o) ** 2 + (x[1] - y_o) ** 2 - radius ** 2

    def grad_h(x):
        return np.array([2.0 * (x[0] - x_o), 2.0 * (x[1] - y_o), 0.0, 0.0])

    def hess_h(x):
        return np.diag([2.0, 2.0, 0.0, 0.0])

    def grad_hdot(x):
        # gradient of grad_h . f = 2 (x1 - xo) x3 + 2 (x2 - yo) x4
        return np.array([2.0 * x[2], 2.0 * x[3], 2.0 * (x[0] - x_o), 2.0 * (x[1] - y_o)])

    barrier = BarrierCandidate(
        h=h,
        grad_h=grad_h,
        alpha=ClassKappa("power", 1.0, 3),
        relative_degree=2,
        alpha1=ClassKappa("power", 1.0, 3),
        hess_h=hess_h,
        grad_hdot=grad_hdot,
        name="obstacle-disk",
    )

    def V(x):
        return 0.5 * (x[0] ** 2 + x[1] ** 2) + 0.5 * ((x[2] + x[0]) ** 2 + (x[3] + x[1]) ** 2)

    def grad_V(x):
        return np.array([2.0 * x[0] + x[2], 2.0 * x[1] + x[3], x[0] + x[2], x[1] + x[3]])

    lyap = LyapunovCandidate(V=V, grad_V=grad_V, gamma=ClassKappa("linear", 1.0),
                             name="position-plus-momentum")
    return Scenario(
        name="planar-robot",
        model=model,
        true_params=theta,
        theta0=theta0,
        barriers=(barrier,),
        lyapunov=lyap,
        x0=np.array([-5.0, 4.0, 0.0, 0.0]),
        dt=0.01,
        horizon=15.0,
        smid=SmidConfig(window=0.1, epsilon=1.0, capacity=20),
        position_dims=(0, 1),
        obstacle={"center": [x_o, y_o], "radius": radius},
    )


_SCENARIOS = {
    "nonlinear2d": scenario_nonlinear2d,
    "planar-robot": scenario_planar_robot,
}

SCENARIO_NAMES = tuple(sorted(_SCENARIOS))


def get_scenario(name: str) -> Scenario:
    try:
        factory = _SCENARIOS[name]
    except KeyError:
        raise KeyError(
            f"unknown scenario {name!r}; available: {', '.join(SCENARIO_NAMES)}"
        ) from None
    return factory()
