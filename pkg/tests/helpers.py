"""Independent oracles shared by the test modules.

Everything here deliberately avoids the code paths it checks: worst cases
come from vertex enumeration or grids, derivatives from central
differences, and reference LP solutions from scipy.
"""

import itertools

import numpy as np

from boxsafe.paramset import ParameterBox
from boxsafe.qp import QuadraticProgram, solve_qp


def central_difference(fun, x, direction, h=1e-6):
    """Directional derivative of a scalar function by central differences."""
    x = np.asarray(x, dtype=float)
    direction = np.asarray(direction, dtype=float)
    return (fun(x + h * direction) - fun(x - h * direction)) / (2.0 * h)


def finite_difference_gradient(fun, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = 1.0
        grad[i] = central_difference(fun, x, e, h)
    return grad


def box_vertices(box: ParameterBox):
    return [np.asarray(v, dtype=float)
            for v in itertools.product(*zip(box.lower, box.upper))]


def worst_case_by_enumeration(c, box: ParameterBox, direction="min"):
    """Exact worst case of a linear objective by checking every vertex."""
    c = np.asarray(c, dtype=float)
    values = [float(c @ v) for v in box_vertices(box)]
    return min(values) if direction == "min" else max(values)


def vertex_constraint_qp(constraint, box: ParameterBox, k_d):
    """Safety QP with one explicit constraint per box vertex (no duals).

    Serves as the combinatorial reference for the dual reformulation: both
    must return the same input.
    """
    k_d = np.asarray(k_d, dtype=float).ravel()
    m = constraint.c_u.size
    p = constraint.c_F.size
    rows, rhs = [], []
    for theta in box_vertices(box):
        coef = constraint.c_u + constraint.c_G * theta[p:]
        if constraint.sense == ">=":
            rows.append(-coef)
            rhs.append(constraint.c0 + constraint.c_F @ theta[:p] - constraint.rhs)
        else:
            rows.append(coef)
            rhs.append(constraint.rhs - constraint.c0 - constraint.c_F @ theta[:p])
    return solve_qp(QuadraticProgram(H=np.eye(m), q=-k_d,
                                     a_ub=np.asarray(rows), b_ub=np.asarray(rhs)))


def grid_band_bounding_box(entries, prior: ParameterBox, epsilon, resolution=400):
    """Brute-force feasible box: grid the prior box, keep points satisfying
    every band |dx - F - G - S theta| <= epsilon, return their bounding box.

    Only for 2-dimensional parameter spaces.  Returns (lower, upper, cell)
    or None when no grid point is feasible.
    """
    assert prior.d == 2
    axes = [np.linspace(prior.lower[i], prior.upper[i], resolution) for i in range(2)]
    t1, t2 = np.meshgrid(axes[0], axes[1], indexing="ij")
    pts = np.stack([t1.ravel(), t2.ravel()], axis=1)
    mask = np.ones(pts.shape[0], dtype=bool)
    for entry in entries:
        center = entry.dx - entry.F - entry.G
        resid = center[None, :] - pts @ entry.S.T
        mask &= np.all(np.abs(resid) <= epsilon, axis=1)
    if not mask.any():
        return None
    feas = pts[mask]
    cell = np.array([axes[0][1] - axes[0][0], axes[1][1] - axes[1][0]])
    return feas.min(axis=0), feas.max(axis=0), cell


def random_box(rng, d, center_scale=1.0, width_scale=2.0):
    lo = rng.normal(size=d) * center_scale
    return ParameterBox(lo, lo + rng.random(d) * width_scale)


def shrink_box(rng, box: ParameterBox):
    """Random box nested inside the given one."""
    a = rng.random(box.d) * 0.4
    b = rng.random(box.d) * 0.4
    return ParameterBox(box.lower + a * box.widths, box.upper - b * box.widths)
