"""Control-affine dynamics with parameter-affine uncertainty.

The plant is ``xdot = f(x) + g(x) u + F(x) theta_f + G(x) diag(u) theta_g``
with known structure matrices F, G and unknown parameter vectors theta_f
(p drift parameters) and theta_g (one gain per input channel).  Stacking
``theta = (theta_f, theta_g)`` makes the right-hand side affine in theta
through the regressor ``[F(x)  G(x) diag(u)]``, which is what both the
robust controllers and the identification stage consume.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .paramset import ParameterBox

__all__ = ["UncertainModel", "TrueParameters"]


@dataclass(frozen=True, eq=False)
class UncertainModel:
    """Immutable model description; all evaluators must be pure."""

    n: int
    m: int
    p: int
    f: Callable[[np.ndarray], np.ndarray]
    g: Callable[[np.ndarray], np.ndarray]
    F: Callable[[np.ndarray], np.ndarray]
    G: Callable[[np.ndarray], np.ndarray]
    input_box: ParameterBox | None = None
    name: str = ""

    @property
    def d(self) -> int:
        """Total number of uncertain parameters, p + m."""
        return self.p + self.m

    def _check_x(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.n:
            raise ValueError(f"state has dimension {x.size}, model expects {self.n}")
        return x

    def _check_u(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float).ravel()
        if u.size != self.m:
            raise ValueError(f"input has dimension {u.size}, model expects {self.m}")
        return u

    def regressor(self, x, u) -> np.ndarray:
        """n x (p+m) matrix ``[F(x)  G(x) diag(u)]`` multiplying theta."""
        x = self._check_x(x)
        u = self._check_u(u)
        return np.hstack([self.F(x), self.G(x) * u[None, :]])

    def dynamics(self, x, u, theta) -> np.ndarray:
        """State derivative under the given parameters."""
        x = self._check_x(x)
        u = self._check_u(u)
        theta = np.asarray(theta, dtype=float).ravel()
        if theta.size != self.d:
            raise ValueError(f"theta has dimension {theta.size}, model expects {self.d}")
        xdot = self.f(x) + self.g(x) @ u + self.regressor(x, u) @ theta
        return np.asarray(xdot, dtype=float)


@dataclass(frozen=True, eq=False)
class TrueParameters:
    """Ground-truth parameter vector.

    Used only by the simulator's integrator and by identification tests;
    the controllers never see it.
    """

    theta: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float).ravel()
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)
