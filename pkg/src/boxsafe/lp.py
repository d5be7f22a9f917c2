"""Dense linear programming by bounded-variable primal simplex.

Sized for the small problems this package generates (tens of variables, a
few hundred rows): worst-case corner duals, band-constrained parameter
estimation, and feasibility phases for the QP controllers.  The solver is
deterministic — Bland's smallest-index rule for entering variables and
smallest-variable-index tie-breaking in the ratio test — so identical
inputs always produce identical solutions.

Problem form::

    min / max   c . z
    subject to  A_ub z <= b_ub
                A_eq z  = b_eq
                lower <= z <= upper      (entries may be +-inf)

Implementation notes.  Inequality rows get unit slack variables after row
equilibration; rows whose initial residual cannot be covered by a slack
receive a phase-1 artificial.  The basis inverse is maintained by
product-form (eta) updates and rebuilt from scratch periodically.  Fully
free variables are kept nonbasic at zero and may enter moving in either
direction.  A numerically singular basis is reported as
``numerical_failure`` rather than as a wrong optimum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LinearProgram",
    "SolveResult",
    "solve_lp",
    "OPTIMAL",
    "INFEASIBLE",
    "UNBOUNDED",
    "ITERATION_LIMIT",
    "NUMERICAL_FAILURE",
]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"
NUMERICAL_FAILURE = "numerical_failure"

FEAS_TOL = 1e-7
OPT_TOL = 1e-9
PIVOT_TOL = 1e-10
RATIO_TIE = 1e-12
REFACTOR_EVERY = 64

# variable states
_AT_LOWER = 0
_AT_UPPER = 1
_FREE = 2
_BASIC = 3
_FIXED = 4


@dataclass
class LinearProgram:
    """Dense LP data.  Missing blocks may be None; bounds default to free."""

    c: np.ndarray
    sense: str = "min"
    a_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        self.a_ub, self.b_ub = _check_block(self.a_ub, self.b_ub, n, "ub")
        self.a_eq, self.b_eq = _check_block(self.a_eq, self.b_eq, n, "eq")
        self.lower = _check_bound(self.lower, n, -np.inf)
        self.upper = _check_bound(self.upper, n, np.inf)
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")
        if not np.isfinite(self.c).all():
            raise ValueError("objective coefficients must be finite")

    @property
    def n(self) -> int:
        return self.c.size


@dataclass
class SolveResult:
    """Solver outcome.  ``z`` and ``objective`` are meaningful when optimal."""

    status: str
    z: np.ndarray | None = None
    objective: float = np.nan
    max_violation: float = np.nan
    iterations: int = 0
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _check_block(A, b, n, tag):
    if A is None or (hasattr(A, "__len__") and len(A) == 0):
        return np.zeros((0, n)), np.zeros(0)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    if A.shape != (b.size, n):
        raise ValueError(f"{tag} block shapes inconsistent: A {A.shape}, b {b.shape}, n={n}")
    if not (np.isfinite(A).all() and np.isfinite(b).all()):
        raise ValueError(f"{tag} block must be finite")
    return A, b


def _check_bound(v, n, default):
    if v is None:
        return np.full(n, default)
    v = np.asarray(v, dtype=float).ravel()
    if v.size != n:
        raise ValueError(f"bound vector has size {v.size}, expected {n}")
    return v.copy()


class _SingularBasis(Exception):
    pass


class _Simplex:
    """Workspace for one bounded-variable simplex solve (single use)."""

    def __init__(self, lp: LinearProgram):
        n = lp.n
        n_ub = lp.b_ub.size
        n_eq = lp.b_eq.size
        m = n_ub + n_eq

        # Row equilibration before slacks are appended keeps slack columns
        # exactly unit and makes pivot tolerances meaningful across scales.
        a_ub, b_ub = lp.a_ub, lp.b_ub
        a_eq, b_eq = lp.a_eq, lp.b_eq
        if n_ub:
            s = np.maximum(np.abs(a_ub).max(axis=1, initial=0.0), 1e-12)
            a_ub = a_ub / s[:, None]
            b_ub = b_ub / s
        if n_eq:
            s = np.maximum(np.abs(a_eq).max(axis=1, initial=0.0), 1e-12)
            a_eq = a_eq / s[:, None]
            b_eq = b_eq / s

        A = np.zeros((m, n + n_ub))
        if n_ub:
            A[:n_ub, :n] = a_ub
            A[:n_ub, n : n + n_ub] = np.eye(n_ub)
        if n_eq:
            A[n_ub:, :n] = a_eq
        self.b = np.concatenate([b_ub, b_eq])

        self.n_struct = n
        self.n_ub = n_ub
        self.m = m
        self.A = A
        self.lo = np.concatenate([lp.lower, np.zeros(n_ub)])
        self.hi = np.concatenate([lp.upper, np.full(n_ub, np.inf)])

        ncols = n + n_ub
        self.state = np.empty(ncols, dtype=np.int8)
        self.x = np.zeros(ncols)
        for j in range(ncols):
            if self.lo[j] == self.hi[j]:
                self.state[j] = _FIXED
                self.x[j] = self.lo[j]
            elif np.isfinite(self.lo[j]):
                self.state[j] = _AT_LOWER
                self.x[j] = self.lo[j]
            elif np.isfinite(self.hi[j]):
                self.state[j] = _AT_UPPER
                self.x[j] = self.hi[j]
            else:
                self.state[j] = _FREE
                self.x[j] = 0.0

        self.basis = np.zeros(m, dtype=int)
        self.n_art = 0
        self.pivots_since_refactor = 0
        self.iterations = 0

    # -- setup --------------------------------------------------------------

    def install_initial_basis(self):
        """Slack covers a row when its residual is nonnegative; otherwise the
        row gets a phase-1 artificial carrying the residual."""
        r = self.b - self.A @ self.x
        art_rows = []
        basis = np.full(self.m, -1, dtype=int)
        for i in range(self.m):
            if i < self.n_ub and r[i] >= 0.0:
                slack = self.n_struct + i
                self.x[slack] = r[i]
                self.state[slack] = _BASIC
                basis[i] = slack
            else:
                art_rows.append(i)

        self.n_art = len(art_rows)
        if self.n_art:
            first_art = self.A.shape[1]
            ext = np.zeros((self.m, self.n_art))
            for k, i in enumerate(art_rows):
                ext[i, k] = 1.0 if r[i] >= 0 else -1.0
            self.A = np.hstack([self.A, ext])
            self.lo = np.concatenate([self.lo, np.zeros(self.n_art)])
            self.hi = np.concatenate([self.hi, np.full(self.n_art, np.inf)])
            art_values = np.abs(r[art_rows])
            self.x = np.concatenate([self.x, art_values])
            self.state = np.concatenate(
                [self.state, np.full(self.n_art, _BASIC, dtype=np.int8)]
            )
            for k, i in enumerate(art_rows):
                basis[i] = first_art + k
        self.basis = basis
        self._refactor()
        self._recompute_basics()

    def _refactor(self):
        try:
            self.B_inv = np.linalg.inv(self.A[:, self.basis])
        except np.linalg.LinAlgError:
            raise _SingularBasis from None
        self.pivots_since_refactor = 0

    def _recompute_basics(self):
        xn = self.x.copy()
        xn[self.basis] = 0.0
        self.x[self.basis] = self.B_inv @ (self.b - self.A @ xn)

    # -- core iteration ------------------------------------------------------

    def optimize(self, cvec, max_iter):
        """Minimize cvec over the current basis; returns a status string."""
        while self.iterations < max_iter:
            self.iterations += 1
            if self.pivots_since_refactor >= REFACTOR_EVERY:
                self._refactor()
                self._recompute_basics()

            y = cvec[self.basis] @ self.B_inv
            reduced = cvec - y @ self.A

            eligible = (
                ((self.state == _AT_LOWER) & (reduced < -OPT_TOL))
                | ((self.state == _AT_UPPER) & (reduced > OPT_TOL))
                | ((self.state == _FREE) & (np.abs(reduced) > OPT_TOL))
            )
            if not eligible.any():
                return OPTIMAL
            entering = int(np.argmax(eligible))  # Bland: smallest index
            if self.state[entering] == _AT_UPPER:
                direction = -1.0
            elif self.state[entering] == _AT_LOWER:
                direction = 1.0
            else:
                direction = 1.0 if reduced[entering] < 0 else -1.0

            alpha = self.B_inv @ self.A[:, entering]
            step = direction * alpha
            xb = self.x[self.basis]
            lo_b = self.lo[self.basis]
            hi_b = self.hi[self.basis]

            ratios = np.full(self.m, np.inf)
            dec = (step > PIVOT_TOL) & np.isfinite(lo_b)
            if dec.any():
                ratios[dec] = (xb[dec] - lo_b[dec]) / step[dec]
            inc = (step < -PIVOT_TOL) & np.isfinite(hi_b)
            if inc.any():
                ratios[inc] = (hi_b[inc] - xb[inc]) / (-step[inc])
            np.maximum(ratios, 0.0, out=ratios)

            t_block = float(ratios.min(initial=np.inf))
            t_flip = np.inf
            if np.isfinite(self.lo[entering]) and np.isfinite(self.hi[entering]):
                t_flip = self.hi[entering] - self.lo[entering]

            if not np.isfinite(t_block) and not np.isfinite(t_flip):
                return UNBOUNDED

            if t_flip < t_block - RATIO_TIE:
                self.x[self.basis] = xb - t_flip * step
                self.x[entering] += direction * t_flip
                self.state[entering] = _AT_UPPER if direction > 0 else _AT_LOWER
                self.pivots_since_refactor += 1
                continue

            ties = np.flatnonzero(ratios <= t_block + RATIO_TIE)
            blocker = int(ties[np.argmin(self.basis[ties])])  # Bland tie-break
            leaving = int(self.basis[blocker])
            leave_side = _AT_LOWER if dec[blocker] else _AT_UPPER

            self.x[self.basis] = xb - t_block * step
            self.x[entering] += direction * t_block
            self.x[leaving] = self.lo[leaving] if leave_side == _AT_LOWER else self.hi[leaving]
            self.state[leaving] = (
                _FIXED if self.lo[leaving] == self.hi[leaving] else leave_side
            )
            self.state[entering] = _BASIC
            self.basis[blocker] = entering
            self._eta_update(alpha, blocker)
        return ITERATION_LIMIT

    def _eta_update(self, alpha, pos):
        piv = alpha[pos]
        if abs(piv) < PIVOT_TOL:
            raise _SingularBasis
        row = self.B_inv[pos] / piv
        correction = np.outer(alpha, row)
        correction[pos] = self.B_inv[pos] - row
        self.B_inv -= correction
        self.B_inv[pos] = row
        self.pivots_since_refactor += 1

    # -- between phases --------------------------------------------------------

    def drive_out_artificials(self):
        """Pin artificials at zero; pivot basic ones out where a real column
        can replace them (rows with no such column are redundant)."""
        first_art = self.A.shape[1] - self.n_art
        self.lo[first_art:] = 0.0
        self.hi[first_art:] = 0.0
        for j in range(first_art, self.A.shape[1]):
            if self.state[j] != _BASIC:
                self.state[j] = _FIXED
                self.x[j] = 0.0
        for pos in range(self.m):
            j = int(self.basis[pos])
            if j < first_art:
                continue
            row = self.B_inv[pos] @ self.A[:, :first_art]
            replaceable = (self.state[:first_art] != _BASIC) & (
                self.state[:first_art] != _FIXED
            ) & (np.abs(row) > 1e-9)
            if not replaceable.any():
                continue  # redundant row; artificial stays basic pinned at 0
            col = int(np.argmax(replaceable))
            alpha = self.B_inv @ self.A[:, col]
            self.x[j] = 0.0
            self.state[j] = _FIXED
            self.state[col] = _BASIC
            self.basis[pos] = col
            self._eta_update(alpha, pos)
        self._recompute_basics()


def solve_lp(lp: LinearProgram, max_iter: int | None = None) -> SolveResult:
    """Solve a dense LP.  See module docstring for the accepted form."""
    n = lp.n
    sign = 1.0 if lp.sense == "min" else -1.0
    if max_iter is None:
        max_iter = 200 + 40 * (n + lp.b_ub.size + lp.b_eq.size)

    ws = _Simplex(lp)
    try:
        ws.install_initial_basis()
        if ws.n_art:
            ncols = ws.A.shape[1]
            c1 = np.zeros(ncols)
            c1[ncols - ws.n_art :] = 1.0
            status = ws.optimize(c1, max_iter)
            if status == ITERATION_LIMIT:
                return SolveResult(ITERATION_LIMIT, iterations=ws.iterations,
                                   message="phase-1 iteration limit")
            if status == UNBOUNDED:
                return SolveResult(NUMERICAL_FAILURE, iterations=ws.iterations,
                                   message="phase-1 reported unbounded")
            infeas = float(ws.x[ncols - ws.n_art :].sum())
            if infeas > FEAS_TOL * (1.0 + float(np.abs(ws.b).max(initial=0.0))):
                return SolveResult(INFEASIBLE, iterations=ws.iterations,
                                   message=f"phase-1 residual {infeas:.3e}")
            ws.drive_out_artificials()
        c2 = np.zeros(ws.A.shape[1])
        c2[:n] = sign * lp.c
        status = ws.optimize(c2, max_iter)
    except _SingularBasis:
        return SolveResult(NUMERICAL_FAILURE, iterations=ws.iterations,
                           message="numerically singular basis")

    if status == UNBOUNDED:
        return SolveResult(UNBOUNDED, iterations=ws.iterations)
    if status == ITERATION_LIMIT:
        return SolveResult(ITERATION_LIMIT, iterations=ws.iterations)

    z = ws.x[:n].copy()
    violation = _max_violation(lp, z)
    if violation > FEAS_TOL:
        return SolveResult(NUMERICAL_FAILURE, z=z, max_violation=violation,
                           iterations=ws.iterations,
                           message=f"solution violates constraints by {violation:.3e}")
    return SolveResult(OPTIMAL, z=z, objective=float(lp.c @ z),
                       max_violation=violation, iterations=ws.iterations)


def _max_violation(lp: LinearProgram, z: np.ndarray) -> float:
    worst = 0.0
    if lp.b_ub.size:
        worst = max(worst, float(np.max(lp.a_ub @ z - lp.b_ub, initial=0.0)))
    if lp.b_eq.size:
        worst = max(worst, float(np.max(np.abs(lp.a_eq @ z - lp.b_eq), initial=0.0)))
    worst = max(worst, float(np.max(lp.lower - z, initial=0.0)))
    worst = max(worst, float(np.max(z - lp.upper, initial=0.0)))
    return worst
