"""Barrier and Lyapunov certificates and their robust affine constraints.

Every pointwise condition used by the controllers — barrier decrease for
relative degree one, its second-order variant for relative degree two, and
Lyapunov decrease — compiles to the same reduced form over one state:

    c0 + c_u . u + c_F . theta_f + sum_i c_G[i] * u_i * theta_gi  {>=,<=}  rhs

which is affine in the input once the parameter vector is fixed and affine
in the parameters once the input is fixed.  The controller attaches one
dual vector per constraint to absorb the worst case over the parameter box.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import UncertainModel

__all__ = [
    "ClassKappa",
    "BarrierCandidate",
    "LyapunovCandidate",
    "RobustAffineConstraint",
    "rcbf_constraint",
    "rclf_constraint",
    "hocbf_constraint",
]

_DEGREE2_TOL = 1e-12


@dataclass(frozen=True)
class ClassKappa:
    """Extended class-K function: linear ``gain*s`` or odd power ``gain*s**k``."""

    kind: str = "linear"
    gain: float = 1.0
    exponent: int = 1

    def __post_init__(self):
        if self.kind not in ("linear", "power"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.gain <= 0:
            raise ValueError("gain must be positive")
        if self.kind == "power":
            if self.exponent < 1 or self.exponent % 2 == 0:
                raise ValueError("power kind needs a positive odd exponent")

    def __call__(self, s: float) -> float:
        if self.kind == "linear":
            return self.gain * s
        return self.gain * s ** self.exponent

    def derivative(self, s: float) -> float:
        if self.kind == "linear":
            return self.gain
        return self.gain * self.exponent * s ** (self.exponent - 1)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "gain": self.gain, "exponent": self.exponent}


@dataclass(frozen=True, eq=False)
class BarrierCandidate:
    """Safe-set function h with its gradient and class-K rate.

    The safe set is {h >= 0}.  For relative degree two the candidate also
    carries the inner rate ``alpha1``, the Hessian of h, and the gradient
    of ``grad_h . f`` (supplied analytically by the scenario, where f is
    known), which the second-order constraint builder consumes.
    """

    h: Callable[[np.ndarray], float]
    grad_h: Callable[[np.ndarray], np.ndarray]
    alpha: ClassKappa
    relative_degree: int = 1
    alpha1: ClassKappa | None = None
    hess_h: Callable[[np.ndarray], np.ndarray] | None = None
    grad_hdot: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = "h"

    def __post_init__(self):
        if self.relative_degree not in (1, 2):
            raise ValueError("relative degree must be 1 or 2")
        if self.relative_degree == 2 and (self.alpha1 is None or self.grad_hdot is None):
            raise ValueError("degree-2 barrier needs alpha1 and grad_hdot")

    def psi1(self, model: UncertainModel, x) -> float:
        """First extended barrier: hdot + alpha1(h), defined for degree 2."""
        x = np.asarray(x, dtype=float).ravel()
        hdot = float(self.grad_h(x) @ model.f(x))
        return hdot + self.alpha1(float(self.h(x)))


@dataclass(frozen=True, eq=False)
class LyapunovCandidate:
    """Positive definite V with gradient and class-K decrease rate."""

    V: Callable[[np.ndarray], float]
    grad_V: Callable[[np.ndarray], np.ndarray]
    gamma: ClassKappa
    name: str = "V"


@dataclass(frozen=True, eq=False)
class RobustAffineConstraint:
    """One robust pointwise condition in reduced form (see module docstring).

    ``sense`` is ">=" for barrier conditions (worst case is the minimum
    over the parameter box) and "<=" for Lyapunov conditions (worst case is
    the maximum).
    """

    sense: str
    c0: float
    c_u: np.ndarray
    c_F: np.ndarray
    c_G: np.ndarray
    rhs: float
    label: str = ""

    def __post_init__(self):
        if self.sense not in (">=", "<="):
            raise ValueError(f"sense must be '>=' or '<=', got {self.sense!r}")
        object.__setattr__(self, "c_u", np.asarray(self.c_u, dtype=float).ravel())
        object.__setattr__(self, "c_F", np.asarray(self.c_F, dtype=float).ravel())
        object.__setattr__(self, "c_G", np.asarray(self.c_G, dtype=float).ravel())

    @property
    def m(self) -> int:
        return self.c_u.size

    @property
    def d(self) -> int:
        return self.c_F.size + self.c_G.size

    def theta_coefficients(self, u) -> np.ndarray:
        """Coefficient vector of theta for a fixed input: (c_F, c_G * u)."""
        u = np.asarray(u, dtype=float).ravel()
        return np.concatenate([self.c_F, self.c_G * u])

    def evaluate(self, u, theta) -> float:
        """Left-hand side value at a concrete input and parameter vector."""
        u = np.asarray(u, dtype=float).ravel()
        theta = np.asarray(theta, dtype=float).ravel()
        return float(self.c0 + self.c_u @ u + self.theta_coefficients(u) @ theta)


def rcbf_constraint(model: UncertainModel, barrier: BarrierCandidate, x) -> RobustAffineConstraint:
    """Barrier decrease condition for a relative-degree-one candidate:
    hdot(x, u, theta) >= -alpha(h(x)), compiled to reduced form."""
    if barrier.relative_degree != 1:
        raise ValueError("barrier has relative degree != 1; use hocbf_constraint")
    x = np.asarray(x, dtype=float).ravel()
    grad = np.asarray(barrier.grad_h(x), dtype=float).ravel()
    return RobustAffineConstraint(
        sense=">=",
        c0=float(grad @ model.f(x)),
        c_u=grad @ model.g(x),
        c_F=grad @ model.F(x),
        c_G=grad @ model.G(x),
        rhs=-barrier.alpha(float(barrier.h(x))),
        label=f"rcbf:{barrier.name}",
    )


def rclf_constraint(model: UncertainModel, lyap: LyapunovCandidate, x) -> RobustAffineConstraint:
    """Lyapunov decrease condition Vdot(x, u, theta) <= -gamma(V(x))."""
    x = np.asarray(x, dtype=float).ravel()
    grad = np.asarray(lyap.grad_V(x), dtype=float).ravel()
    return RobustAffineConstraint(
        sense="<=",
        c0=float(grad @ model.f(x)),
        c_u=grad @ model.g(x),
        c_F=grad @ model.F(x),
        c_G=grad @ model.G(x),
        rhs=-lyap.gamma(float(lyap.V(x))),
        label=f"rclf:{lyap.name}",
    )


def hocbf_constraint(model: UncertainModel, barrier: BarrierCandidate, x) -> RobustAffineConstraint:
    """Second-order barrier condition for relative degree two.

    With psi1 = hdot + alpha1(h) (input- and parameter-free because grad_h
    annihilates g, F and G), the enforced condition is
    psi1dot(x, u, theta) >= -alpha(psi1(x)).  Differentiating psi1 along
    the dynamics gives coefficients through D(x) = grad of (grad_h . f).
    """
    if barrier.relative_degree != 2:
        raise ValueError("barrier has relative degree != 2; use rcbf_constraint")
    x = np.asarray(x, dtype=float).ravel()
    grad = np.asarray(barrier.grad_h(x), dtype=float).ravel()
    for mat, tag in ((model.g(x), "g"), (model.F(x), "F"), (model.G(x), "G")):
        lead = np.abs(grad @ np.asarray(mat, dtype=float)).max(initial=0.0)
        if lead > _DEGREE2_TOL:
            raise ValueError(
                f"grad_h . {tag} = {lead:.3e} != 0 at x: candidate is not "
                "relative degree two for this model"
            )
    hval = float(barrier.h(x))
    hdot = float(grad @ model.f(x))
    D = np.asarray(barrier.grad_hdot(x), dtype=float).ravel()
    a1p = barrier.alpha1.derivative(hval)
    psi1 = hdot + barrier.alpha1(hval)
    return RobustAffineConstraint(
        sense=">=",
        c0=float(D @ model.f(x)) + a1p * hdot,
        c_u=D @ model.g(x),
        c_F=D @ model.F(x),
        c_G=D @ model.G(x),
        rhs=-barrier.alpha(psi1),
        label=f"hocbf:{barrier.name}",
    )


def build_constraint(model: UncertainModel, barrier: BarrierCandidate, x) -> RobustAffineConstraint:
    """Dispatch on the barrier's relative degree."""
    if barrier.relative_degree == 1:
        return rcbf_constraint(model, barrier, x)
    return hocbf_constraint(model, barrier, x)
