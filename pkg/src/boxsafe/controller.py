"""Robust QP controllers built from the duality reformulation.

The worst case of each robust affine constraint over the parameter box is
an inner linear program; replacing it with its dual turns the bilinear
(input, parameter) condition into constraints that are jointly affine in
the input and one dual vector per condition:

    barrier (>=):  c0 + c_u.u + b'mu  >= rhs,   A'mu  = (c_F, c_G*u),  mu  <= 0
    Lyapunov (<=): c0 + c_u.u + b'lam <= rhs,   A'lam = (c_F, c_G*u),  lam >= 0

so a single convex QP over (u, duals) yields inputs that satisfy the
original worst-case condition.  The dual vector prices the box faces; at
the optimum it selects the worst-case corner.

Public entry points: :func:`rcbf_filter` (safety filter around a nominal
input), :func:`rclf_policy` (minimum-norm stabilizer), and
:func:`pipeline_policy` (stabilizer filtered through the safety QP, the
default closed-loop controller).  :func:`verify_worst_case` recomputes
robust margins through the closed-form corner oracle, independently of
any QP output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .certificates import (
    BarrierCandidate,
    LyapunovCandidate,
    RobustAffineConstraint,
    build_constraint,
    rclf_constraint,
)
from .model import UncertainModel
from .paramset import ParameterBox, box_worst_case, to_halfspace
from .qp import OPTIMAL, QPResult, QuadraticProgram, solve_qp

__all__ = [
    "ControlOutput",
    "rcbf_filter",
    "rclf_policy",
    "pipeline_policy",
    "verify_worst_case",
]

DUAL_RIDGE = 1e-8
SLACK_WEIGHT = 1e6
MARGIN_TOL = 1e-6


@dataclass
class ControlOutput:
    """Controller result at one state.

    ``duals`` holds the decision-variable dual vector of each robust
    constraint (mu <= 0 for barrier rows, lam >= 0 for Lyapunov rows);
    ``margins`` the corner-oracle worst-case margins (value minus rhs) at
    the returned input, one per constraint, in constraint order.
    """

    u: np.ndarray | None
    status: str
    constraints: list[RobustAffineConstraint] = field(default_factory=list)
    duals: list[np.ndarray] = field(default_factory=list)
    margins: list[float] = field(default_factory=list)
    nominal_u: np.ndarray | None = None
    clf_margin: float | None = None
    filter_active: bool | None = None
    slack: float = 0.0
    qp: QPResult | None = None
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def verify_worst_case(constraint: RobustAffineConstraint, box: ParameterBox, u) -> float:
    """Robust margin of a constraint at a fixed input, via the corner oracle.

    Returns worst-case value minus rhs: satisfaction means >= 0 for ">="
    constraints and <= 0 for "<=" constraints.  Never touches QP duals.
    """
    u = np.asarray(u, dtype=float).ravel()
    direction = "min" if constraint.sense == ">=" else "max"
    value, _ = box_worst_case(constraint.theta_coefficients(u), box, direction)
    return float(constraint.c0 + constraint.c_u @ u + value - constraint.rhs)


def corner_duals(constraint: RobustAffineConstraint, u) -> np.ndarray:
    """Dual vector attaining the worst-case corner for the canonical
    halfspace form [+I; -I] of a box.  Feasible for the QP equality and
    sign constraints at the given input."""
    c = constraint.theta_coefficients(u)
    if constraint.sense == ">=":
        plus = np.where(c < 0, c, 0.0)
        minus = np.where(c >= 0, -c, 0.0)
    else:
        plus = np.maximum(c, 0.0)
        minus = np.maximum(-c, 0.0)
    return np.concatenate([plus, minus])


def _assemble(constraints, box, m, center, input_box, slack):
    """Build the QP over z = (u, dual blocks..., [slack])."""
    hs = to_halfspace(box)
    A, b = hs.A, hs.b
    n_rows, d = A.shape
    nb = len(constraints)
    n_z = m + nb * n_rows + (1 if slack else 0)

    H = np.zeros((n_z, n_z))
    H[:m, :m] = np.eye(m)
    q = np.zeros(n_z)
    q[:m] = -center
    for k in range(nb):
        base = m + k * n_rows
        H[base : base + n_rows, base : base + n_rows] = DUAL_RIDGE * np.eye(n_rows)
    if slack:
        H[-1, -1] = 2.0 * SLACK_WEIGHT

    # Equality rows: A' dual = (c_F, c_G * u), d rows per constraint.
    a_eq = np.zeros((nb * d, n_z))
    b_eq = np.zeros(nb * d)
    for k, con in enumerate(constraints):
        base = m + k * n_rows
        p = con.c_F.size
        for j in range(d):
            row = k * d + j
            a_eq[row, base : base + n_rows] = A[:, j]
            if j < p:
                b_eq[row] = con.c_F[j]
            else:
                a_eq[row, j - p] = -con.c_G[j - p]

    # Robust inequality rows, one per constraint, in constraint order.
    a_ub = np.zeros((nb, n_z))
    b_ub = np.zeros(nb)
    for k, con in enumerate(constraints):
        base = m + k * n_rows
        if con.sense == ">=":
            a_ub[k, :m] = -con.c_u
            a_ub[k, base : base + n_rows] = -b
            b_ub[k] = con.c0 - con.rhs
        else:
            a_ub[k, :m] = con.c_u
            a_ub[k, base : base + n_rows] = b
            b_ub[k] = con.rhs - con.c0
            if slack:
                a_ub[k, -1] = -1.0

    lower = np.full(n_z, -np.inf)
    upper = np.full(n_z, np.inf)
    if input_box is not None:
        lower[:m] = input_box.lower
        upper[:m] = input_box.upper
    for k, con in enumerate(constraints):
        base = m + k * n_rows
        if con.sense == ">=":
            upper[base : base + n_rows] = 0.0
        else:
            lower[base : base + n_rows] = 0.0
    if slack:
        lower[-1] = 0.0

    return QuadraticProgram(H=H, q=q, a_ub=a_ub, b_ub=b_ub, a_eq=a_eq, b_eq=b_eq,
                            lower=lower, upper=upper), n_rows


def _start_point(constraints, n_rows, m, u0, input_box, slack):
    if input_box is not None and not input_box.contains(u0):
        return None
    parts = [u0]
    for con in constraints:
        duals = corner_duals(con, u0)
        if duals.size != n_rows:
            return None
        parts.append(duals)
    if slack:
        parts.append(np.zeros(1))
    return np.concatenate(parts)


def _solve(constraints, box, m, center, input_box, warm, key, slack=False):
    qp, n_rows = _assemble(constraints, box, m, center, input_box, slack)

    start = None
    warm_active = None
    if warm is not None and key in warm:
        u_prev, warm_active = warm[key]
        start = _start_point(constraints, n_rows, m, u_prev, input_box, slack)
    if start is None:
        start = _start_point(constraints, n_rows, m, center, input_box, slack)

    res = solve_qp(qp, start=start, warm_active=warm_active)
    if warm is not None and res.optimal:
        warm[key] = (res.z[:m].copy(), res.active_set)

    if not res.optimal:
        margins = [verify_worst_case(con, box, center) for con in constraints]
        worst = int(np.argmin(margins)) if margins else -1
        label = constraints[worst].label if worst >= 0 else "?"
        return ControlOutput(
            u=None, status=res.status, constraints=list(constraints),
            qp=res,
            message=f"{res.status}: most violated constraint {label} "
                    f"(margin {margins[worst]:.3e} at nominal input)" if worst >= 0
                    else res.status,
        )

    u = res.z[:m].copy()
    duals = [res.z[m + k * n_rows : m + (k + 1) * n_rows].copy()
             for k in range(len(constraints))]
    margins = [verify_worst_case(con, box, u) for con in constraints]
    slack_val = float(res.z[-1]) if slack else 0.0
    return ControlOutput(
        u=u, status=res.status, constraints=list(constraints), duals=duals,
        margins=margins, slack=slack_val, qp=res,
    )


def rcbf_filter(model: UncertainModel, barriers, box: ParameterBox, x, k_d,
                input_box=None, warm=None, key="rcbf") -> ControlOutput:
    """Minimally modify a nominal input so every barrier condition holds for
    the worst-case parameters in the box."""
    if isinstance(barriers, BarrierCandidate):
        barriers = (barriers,)
    k_d = np.asarray(k_d, dtype=float).ravel()
    if input_box is None:
        input_box = model.input_box
    constraints = [build_constraint(model, b, x) for b in barriers]
    out = _solve(constraints, box, model.m, k_d, input_box, warm, key)
    out.nominal_u = k_d
    if out.u is not None:
        out.filter_active = bool(np.max(np.abs(out.u - k_d), initial=0.0) > 1e-8)
    return out


def rclf_policy(model: UncertainModel, lyap: LyapunovCandidate, box: ParameterBox, x,
                input_box=None, warm=None, key="rclf", slack=False) -> ControlOutput:
    """Minimum-norm input achieving the worst-case Lyapunov decrease.

    ``slack=True`` relaxes the decrease condition with a heavily penalized
    slack variable; off by default so infeasibility is reported, not hidden.
    """
    if input_box is None:
        input_box = model.input_box
    constraints = [rclf_constraint(model, lyap, x)]
    out = _solve(constraints, box, model.m, np.zeros(model.m), input_box, warm, key,
                 slack=slack)
    if out.u is not None:
        out.clf_margin = out.margins[0]
    return out


def pipeline_policy(model: UncertainModel, lyap: LyapunovCandidate, barriers,
                    box: ParameterBox, x, input_box=None, warm=None,
                    clf_slack=False) -> ControlOutput:
    """Stabilizing policy filtered through the safety QP.

    The Lyapunov QP provides the nominal input; the barrier QP then makes
    the smallest correction that keeps the worst-case barrier conditions
    satisfied.  Safety is hard, stability best-effort through the nominal.
    """
    nominal = rclf_policy(model, lyap, box, x, input_box=input_box, warm=warm,
                          slack=clf_slack)
    if not nominal.optimal:
        nominal.message = f"stabilizing stage failed: {nominal.message}"
        return nominal
    out = rcbf_filter(model, barriers, box, x, nominal.u, input_box=input_box,
                      warm=warm)
    if out.u is not None:
        out.clf_margin = verify_worst_case(nominal.constraints[0], box, out.u)
    return out
