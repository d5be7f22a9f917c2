"""Integral set-membership identification of the parameter box.

Instead of differentiating measured states, the identifier integrates the
known parts of the dynamics over fixed windows of length ``window``:

    x(t) - x(t - window) = int f + int g u + (int regressor) theta

Each completed window yields a record (dx, F, G, S); a bounded FIFO stack
of the most recent records defines band constraints
``|dx - F - G - S theta| <= eps`` that every admissible parameter vector
must satisfy.  Tightened per-coordinate bounds come from one pair of LPs
per coordinate, and the previous box enters as variable bounds so the
refined box is nested by construction.  ``eps`` absorbs quadrature error
of the window integrals (and would absorb noise, were any modeled).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .lp import INFEASIBLE, LinearProgram, solve_lp
from .model import UncertainModel
from .paramset import ParameterBox

__all__ = [
    "SmidConfig",
    "WindowAccumulator",
    "HistoryEntry",
    "HistoryStack",
    "IdentificationConflictError",
    "update_set",
    "schedule",
]

_ZERO_ROW_TOL = 1e-12


class IdentificationConflictError(RuntimeError):
    """No parameter vector satisfies the recorded bands within eps.

    Raised instead of returning an empty set; usually means eps is smaller
    than the realized integration error.
    """


@dataclass(frozen=True)
class SmidConfig:
    """Identification settings: window length, band precision, stack size."""

    window: float
    epsilon: float
    capacity: int = 20
    period: float | None = None  # defaults to one update per window

    def __post_init__(self):
        if self.window <= 0:
            raise ValueError("window must be positive")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.capacity < 1:
            raise ValueError("capacity must be at least 1")
        if self.period is None:
            object.__setattr__(self, "period", self.window)

    def to_dict(self) -> dict:
        return {
            "window": self.window,
            "epsilon": self.epsilon,
            "capacity": self.capacity,
            "period": self.period,
        }


@dataclass(frozen=True, eq=False)
class HistoryEntry:
    """Windowed integral record: dx = F + G + S theta up to quadrature error."""

    dx: np.ndarray
    F: np.ndarray
    G: np.ndarray
    S: np.ndarray
    t: float

    def __post_init__(self):
        for name in ("dx", "F", "G", "S"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if not np.isfinite(arr).all():
                raise ValueError(f"non-finite {name} in history entry at t={self.t}")
            object.__setattr__(self, name, arr)

    def band_residual(self, theta) -> np.ndarray:
        return self.dx - self.F - self.G - self.S @ np.asarray(theta, dtype=float)


class HistoryStack:
    """FIFO buffer of the most recent window records (moving window)."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        self.capacity = capacity
        self._entries: deque[HistoryEntry] = deque(maxlen=capacity)

    def push(self, entry: HistoryEntry):
        self._entries.append(entry)

    @property
    def entries(self) -> list[HistoryEntry]:
        return list(self._entries)

    def __len__(self):
        return len(self._entries)


class WindowAccumulator:
    """Trapezoidal accumulator for one integration window at a time.

    Feed one sample per simulator step: the state at the end of the step
    and the input held during it.  When the accumulated steps span the
    window, a :class:`HistoryEntry` is emitted and the accumulator resets
    with the current state as the next window's start.
    """

    def __init__(self, model: UncertainModel, window: float, x0, t0: float = 0.0):
        self.model = model
        self.window = float(window)
        self.x_start = np.asarray(x0, dtype=float).copy()
        self.x_prev = self.x_start.copy()
        self.t = float(t0)
        self.steps_per_window = None
        self._dt = None
        self._steps = 0
        self._reset_integrals()

    def _reset_integrals(self):
        n, d = self.model.n, self.model.d
        self.F_hat = np.zeros(n)
        self.G_hat = np.zeros(n)
        self.S_hat = np.zeros((n, d))

    def accumulate(self, x_new, u, dt: float) -> HistoryEntry | None:
        """Advance the window integrals over one held-input step."""
        if dt <= 0:
            raise ValueError("dt must be positive")
        if self.steps_per_window is None:
            spw = round(self.window / dt)
            if spw < 1 or abs(spw * dt - self.window) > 1e-9 * max(1.0, self.window):
                raise ValueError(
                    f"step {dt} does not divide the window {self.window}"
                )
            self.steps_per_window = spw
            self._dt = dt
        elif abs(dt - self._dt) > 1e-12:
            raise ValueError("step size changed within a window")

        x_new = np.asarray(x_new, dtype=float).ravel()
        u = np.asarray(u, dtype=float).ravel()
        if not (np.isfinite(x_new).all() and np.isfinite(u).all()):
            raise FloatingPointError(f"non-finite sample at t={self.t + dt}")

        model = self.model
        half = 0.5 * dt
        self.F_hat += half * (model.f(self.x_prev) + model.f(x_new))
        self.G_hat += half * (model.g(self.x_prev) @ u + model.g(x_new) @ u)
        self.S_hat += half * (model.regressor(self.x_prev, u) + model.regressor(x_new, u))

        self.x_prev = x_new.copy()
        self.t += dt
        self._steps += 1
        if self._steps < self.steps_per_window:
            return None

        entry = HistoryEntry(
            dx=x_new - self.x_start,
            F=self.F_hat.copy(),
            G=self.G_hat.copy(),
            S=self.S_hat.copy(),
            t=self.t,
        )
        self.x_start = x_new.copy()
        self._steps = 0
        self._reset_integrals()
        return entry


def schedule(t: float, config: SmidConfig, step: float | None = None) -> bool:
    """True exactly when an update is due: t = k * period, k >= 1."""
    if t <= 0:
        return False
    period = config.period
    tol = 0.5 * step if step is not None else 1e-9 * max(1.0, abs(t))
    k = round(t / period)
    return k >= 1 and abs(t - k * period) <= tol


def update_set(prev: ParameterBox, stack: HistoryStack, epsilon: float) -> ParameterBox:
    """Refine the parameter box against the band constraints of a stack.

    Solves a min and a max LP per coordinate.  Rows whose regressor block
    integrated to zero carry no parameter information and are checked
    directly instead of entering the LPs.  The result is clamped into the
    previous box, so nesting is exact.
    """
    entries = stack.entries
    if not entries:
        raise ValueError("history stack is empty")
    d = prev.d

    rows = []
    rhs = []
    for entry in entries:
        if entry.S.shape[1] != d:
            raise ValueError("entry dimension does not match the box")
        center = entry.dx - entry.F - entry.G
        for r in range(entry.S.shape[0]):
            s_row = entry.S[r]
            if np.abs(s_row).max(initial=0.0) <= _ZERO_ROW_TOL:
                if abs(center[r]) > epsilon + 1e-9:
                    raise IdentificationConflictError(
                        f"record at t={entry.t} row {r}: residual "
                        f"{center[r]:.3e} exceeds eps={epsilon} with no "
                        "parameter dependence"
                    )
                continue
            rows.append(s_row)
            rows.append(-s_row)
            rhs.append(center[r] + epsilon)
            rhs.append(-(center[r] - epsilon))

    if not rows:
        return prev

    a_ub = np.asarray(rows)
    b_ub = np.asarray(rhs)
    lower = prev.lower.copy()
    upper = prev.upper.copy()
    new_lower = np.empty(d)
    new_upper = np.empty(d)
    for i in range(d):
        c = np.zeros(d)
        c[i] = 1.0
        for sense, target in (("min", new_lower), ("max", new_upper)):
            res = solve_lp(
                LinearProgram(c=c, sense=sense, a_ub=a_ub, b_ub=b_ub,
                              lower=lower, upper=upper)
            )
            if res.status == INFEASIBLE:
                times = ", ".join(f"{e.t:.3f}" for e in entries)
                raise IdentificationConflictError(
                    f"band constraints inconsistent with eps={epsilon} "
                    f"(records at t = {times}); eps is too small for the "
                    "realized integration error"
                )
            if not res.optimal:
                raise RuntimeError(f"bound LP failed: {res.status} ({res.message})")
            target[i] = res.objective

    # Exact nesting: numerical slack from the LPs must not leak outside.
    new_lower = np.clip(new_lower, lower, upper)
    new_upper = np.clip(new_upper, lower, upper)
    new_upper = np.maximum(new_upper, new_lower)
    return ParameterBox(new_lower, new_upper)
