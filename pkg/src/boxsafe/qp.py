"""Dense convex quadratic programming by a primal active-set method.

Built for the controller QPs in this package: a handful of variables, a
few dozen rows, solved thousands of times per simulation with slowly
changing data.  The method accepts an optional feasible starting point and
a previous active set, which typically cuts the work to a few KKT solves
per call; without a usable start it falls back to a phase-1 LP.

Problem form::

    min  1/2 z' H z + q . z
    subject to  A_ub z <= b_ub,  A_eq z = b_eq,  lower <= z <= upper

H must be symmetric positive definite (the callers add a small ridge to
blocks the cost does not touch).  Bounds are folded into inequality rows
internally; the reported active set indexes the folded rows.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .lp import (
    INFEASIBLE,
    ITERATION_LIMIT,
    NUMERICAL_FAILURE,
    OPTIMAL,
    LinearProgram,
    solve_lp,
)

__all__ = ["QuadraticProgram", "QPResult", "solve_qp"]

ACTIVE_TOL = 1e-8
STEP_TOL = 1e-9
MULT_TOL = 1e-9


def _kkt_solve(K: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve the (symmetric, possibly ill-scaled) KKT system.

    Symmetric row/column equilibration plus one step of iterative
    refinement keeps the solution accurate even when the Hessian mixes
    unit, ridge-sized, and penalty-sized diagonal blocks.
    """
    scale = np.abs(K).max(axis=1)
    scale = 1.0 / np.sqrt(np.maximum(scale, 1e-12))
    Ks = K * scale[:, None] * scale[None, :]
    y = scale * np.linalg.solve(Ks, scale * rhs)
    r = rhs - K @ y
    y += scale * np.linalg.solve(Ks, scale * r)
    return y


@dataclass
class QuadraticProgram:
    """Dense convex QP data.  Missing blocks may be None."""

    H: np.ndarray
    q: np.ndarray
    a_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        self.H = np.asarray(self.H, dtype=float)
        self.q = np.asarray(self.q, dtype=float).ravel()
        n = self.q.size
        if self.H.shape != (n, n):
            raise ValueError(f"H has shape {self.H.shape}, expected ({n}, {n})")
        if not np.allclose(self.H, self.H.T, atol=1e-12):
            raise ValueError("H must be symmetric")
        self.a_ub, self.b_ub = _block(self.a_ub, self.b_ub, n)
        self.a_eq, self.b_eq = _block(self.a_eq, self.b_eq, n)
        self.lower = _bound(self.lower, n, -np.inf)
        self.upper = _bound(self.upper, n, np.inf)

    @property
    def n(self) -> int:
        return self.q.size

    def objective(self, z: np.ndarray) -> float:
        return float(0.5 * z @ self.H @ z + self.q @ z)


@dataclass
class QPResult:
    status: str
    z: np.ndarray | None = None
    objective: float = np.nan
    max_violation: float = np.nan
    iterations: int = 0
    active_set: tuple = ()
    ineq_duals: np.ndarray | None = None  # over folded inequality rows, >= 0
    eq_duals: np.ndarray | None = None
    worst_row: int = -1
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _block(A, b, n):
    if A is None or (hasattr(A, "__len__") and len(A) == 0):
        return np.zeros((0, n)), np.zeros(0)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    if A.shape != (b.size, n):
        raise ValueError(f"block shapes inconsistent: A {A.shape}, b {b.shape}")
    return A, b


def _bound(v, n, default):
    if v is None:
        return np.full(n, default)
    v = np.asarray(v, dtype=float).ravel()
    if v.size != n:
        raise ValueError(f"bound vector has size {v.size}, expected {n}")
    return v.copy()


def _folded_rows(qp: QuadraticProgram):
    """Inequality rows with bounds appended as +-identity rows."""
    n = qp.n
    blocks_A = [qp.a_ub]
    blocks_b = [qp.b_ub]
    fin_up = np.flatnonzero(np.isfinite(qp.upper))
    if fin_up.size:
        rows = np.zeros((fin_up.size, n))
        rows[np.arange(fin_up.size), fin_up] = 1.0
        blocks_A.append(rows)
        blocks_b.append(qp.upper[fin_up])
    fin_lo = np.flatnonzero(np.isfinite(qp.lower))
    if fin_lo.size:
        rows = np.zeros((fin_lo.size, n))
        rows[np.arange(fin_lo.size), fin_lo] = -1.0
        blocks_A.append(rows)
        blocks_b.append(-qp.lower[fin_lo])
    return np.vstack(blocks_A), np.concatenate(blocks_b)


def _feasible_point(qp: QuadraticProgram):
    lp = LinearProgram(
        c=np.zeros(qp.n),
        a_ub=qp.a_ub if qp.b_ub.size else None,
        b_ub=qp.b_ub if qp.b_ub.size else None,
        a_eq=qp.a_eq if qp.b_eq.size else None,
        b_eq=qp.b_eq if qp.b_eq.size else None,
        lower=qp.lower,
        upper=qp.upper,
    )
    return solve_lp(lp)


def _violation(G, g, E, e, z):
    worst = 0.0
    if g.size:
        worst = max(worst, float(np.max(G @ z - g, initial=0.0)))
    if e.size:
        worst = max(worst, float(np.max(np.abs(E @ z - e), initial=0.0)))
    return worst


def solve_qp(
    qp: QuadraticProgram,
    start: np.ndarray | None = None,
    warm_active=None,
    max_iter: int = 300,
) -> QPResult:
    """Minimize the QP.  ``start`` is used when it is feasible; ``warm_active``
    seeds the working set with folded-row indices from a previous solve."""
    n = qp.n
    if np.any(qp.lower > qp.upper):
        return QPResult(INFEASIBLE, message="inconsistent variable bounds")
    G, g = _folded_rows(qp)
    E, e = qp.a_eq, qp.b_eq

    z = None
    if start is not None:
        start = np.asarray(start, dtype=float).ravel()
        if start.size == n and _violation(G, g, E, e, start) <= 1e-9:
            z = start.copy()
    if z is None:
        lp_res = _feasible_point(qp)
        if lp_res.status == INFEASIBLE:
            return QPResult(INFEASIBLE, message="constraints are inconsistent")
        if not lp_res.optimal:
            return QPResult(NUMERICAL_FAILURE,
                            message=f"feasibility phase: {lp_res.status}")
        z = lp_res.z.copy()

    me = e.size
    resid = g - G @ z
    active = np.flatnonzero(resid <= ACTIVE_TOL)
    ordered = []
    if warm_active:
        warm = [i for i in warm_active if 0 <= i < g.size]
        in_active = set(active.tolist())
        ordered += [i for i in warm if i in in_active]
        ordered += [i for i in active.tolist() if i not in set(ordered)]
    else:
        ordered = active.tolist()

    # Working set: independent subset of the active rows (given the equalities).
    W: list[int] = []
    stack = E.copy() if me else np.zeros((0, n))
    rank = np.linalg.matrix_rank(stack) if me else 0
    for i in ordered:
        if rank >= n:
            break
        trial = np.vstack([stack, G[i : i + 1]])
        r = np.linalg.matrix_rank(trial)
        if r > rank:
            bisect.insort(W, i)
            stack = trial
            rank = r

    in_W = np.zeros(g.size, dtype=bool)
    in_W[W] = True

    iterations = 0
    while iterations < max_iter:
        iterations += 1
        # Solve for the minimizer over the current working set directly, so a
        # full step lands exactly on it and re-imposes the active rows.
        A_act = np.vstack([E, G[W]]) if (me or W) else np.zeros((0, n))
        k = A_act.shape[0]
        K = np.zeros((n + k, n + k))
        K[:n, :n] = qp.H
        if k:
            K[:n, n:] = A_act.T
            K[n:, :n] = A_act
        b_act = np.concatenate([e, g[W]]) if k else np.zeros(0)
        rhs = np.concatenate([-qp.q, b_act])
        try:
            sol = _kkt_solve(K, rhs)
        except np.linalg.LinAlgError:
            return QPResult(NUMERICAL_FAILURE, z=z, iterations=iterations,
                            message="singular KKT system")
        w = sol[:n]
        mults = sol[n:]
        p = w - z

        full_step = np.max(np.abs(p), initial=0.0) <= STEP_TOL * (
            1.0 + float(np.abs(z).max(initial=0.0))
        )
        if not full_step:
            Gp = G @ p
            resid = g - G @ z
            blocker = -1
            best = 1.0
            moving = np.flatnonzero(~in_W & (Gp > 1e-12))
            if moving.size:
                steps = np.maximum(resid[moving], 0.0) / Gp[moving]
                # Scan blocking rows by (step, index); skip rows that are
                # linearly dependent on the working set, which only block
                # through roundoff and would make the KKT system singular.
                order = np.lexsort((moving, steps))
                for pos in order:
                    if steps[pos] >= 1.0 - 1e-14:
                        break
                    row = int(moving[pos])
                    trial = np.vstack([A_act, G[row : row + 1]])
                    if np.linalg.matrix_rank(trial) > k:
                        blocker = row
                        best = float(steps[pos])
                        break
            if blocker >= 0:
                z = z + max(0.0, min(1.0, best)) * p
                bisect.insort(W, blocker)
                in_W[blocker] = True
                continue
            full_step = True

        if full_step:
            z = w
            lam_W = mults[me:]
            tol = MULT_TOL * (1.0 + float(np.abs(mults).max(initial=0.0)))
            if lam_W.size == 0 or float(lam_W.min()) >= -tol:
                ineq_duals = np.zeros(g.size)
                if W:
                    ineq_duals[W] = np.maximum(lam_W, 0.0)
                return QPResult(
                    OPTIMAL,
                    z=z,
                    objective=qp.objective(z),
                    max_violation=_violation(G, g, E, e, z),
                    iterations=iterations,
                    active_set=tuple(W),
                    ineq_duals=ineq_duals,
                    eq_duals=mults[:me].copy() if me else np.zeros(0),
                )
            drop_pos = int(np.argmin(lam_W))  # W sorted => first min has smallest row
            dropped = W.pop(drop_pos)
            in_W[dropped] = False

    return QPResult(ITERATION_LIMIT, z=z, iterations=iterations,
                    message="active-set iteration limit")
