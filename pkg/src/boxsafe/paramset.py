"""Axis-aligned parameter boxes and worst cases of linear objectives over them.

Uncertain model parameters live in a hyperrectangle.  Every box has an
equivalent halfspace description ``A theta <= b`` consumed by the QP
controllers, and a closed-form corner rule gives the exact worst case of a
linear functional over the box in a single pass.  That corner rule is the
reference oracle against which all solver-based robust computations in this
package are checked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ParameterBox", "HalfspaceForm", "to_halfspace", "box_worst_case"]


@dataclass(frozen=True, eq=False)
class ParameterBox:
    """Closed hyperrectangle ``[lower_1, upper_1] x ... x [lower_d, upper_d]``.

    Degenerate (singleton) intervals are allowed.  Instances are immutable
    and safe to share across concurrent simulations.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.array(self.lower, dtype=float).ravel()
        upper = np.array(self.upper, dtype=float).ravel()
        if lower.size < 1:
            raise ValueError("parameter box needs at least one dimension")
        if lower.shape != upper.shape:
            raise ValueError(f"bound shapes differ: {lower.shape} vs {upper.shape}")
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise ValueError("box bounds must be finite")
        if np.any(lower > upper):
            bad = int(np.argmax(lower > upper))
            raise ValueError(f"lower[{bad}]={lower[bad]} exceeds upper[{bad}]={upper[bad]}")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def d(self) -> int:
        return self.lower.size

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def volume(self) -> float:
        return float(np.prod(self.widths))

    def contains(self, theta, atol: float = 0.0) -> bool:
        """Closed-interval membership test, componentwise."""
        theta = np.asarray(theta, dtype=float).ravel()
        if theta.size != self.d:
            raise ValueError(f"theta has dimension {theta.size}, box has {self.d}")
        return bool(np.all(theta >= self.lower - atol) and np.all(theta <= self.upper + atol))

    def contains_box(self, other: "ParameterBox", atol: float = 0.0) -> bool:
        return bool(
            np.all(other.lower >= self.lower - atol) and np.all(other.upper <= self.upper + atol)
        )

    def sample(self, rng: np.random.Generator, size: int = 1) -> np.ndarray:
        """Uniform samples from the box, shape (size, d)."""
        u = rng.random((size, self.d))
        return self.lower + u * self.widths

    def to_dict(self) -> dict:
        return {"lower": self.lower.tolist(), "upper": self.upper.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "ParameterBox":
        return cls(np.asarray(data["lower"]), np.asarray(data["upper"]))

    @classmethod
    def singleton(cls, theta) -> "ParameterBox":
        theta = np.asarray(theta, dtype=float)
        return cls(theta, theta)

    def __repr__(self):
        ivals = " x ".join(f"[{lo:g}, {hi:g}]" for lo, hi in zip(self.lower, self.upper))
        return f"ParameterBox({ivals})"


@dataclass(frozen=True, eq=False)
class HalfspaceForm:
    """Halfspace description ``{theta | A theta <= b}`` of a parameter box.

    Canonical row order: the first d rows are +I with b = upper, the next d
    rows are -I with b = -lower.  The fixed ordering keeps dual-variable
    indices reproducible across runs.
    """

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float).ravel()
        if A.ndim != 2 or A.shape[0] != b.size:
            raise ValueError(f"inconsistent halfspace shapes: A {A.shape}, b {b.shape}")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def d(self) -> int:
        return self.A.shape[1]


def to_halfspace(box: ParameterBox) -> HalfspaceForm:
    """Canonical halfspace form of a box: rows [+I; -I], b = [upper; -lower]."""
    eye = np.eye(box.d)
    A = np.vstack([eye, -eye])
    b = np.concatenate([box.upper, -box.lower])
    return HalfspaceForm(A, b)


def box_worst_case(c, box: ParameterBox, direction: str = "min"):
    """Exact optimum of ``c . theta`` over a box, with the attaining vertex.

    The optimum of a linear functional over a hyperrectangle separates by
    coordinate: minimization picks lower[i] where c[i] > 0 and upper[i]
    where c[i] < 0 (mirrored for maximization).  Zero coefficients resolve
    the vertex to lower[i] so the returned point is deterministic.

    Returns (value, argpoint).
    """
    c = np.asarray(c, dtype=float).ravel()
    if c.size != box.d:
        raise ValueError(f"objective has dimension {c.size}, box has {box.d}")
    if direction == "min":
        arg = np.where(c > 0, box.lower, np.where(c < 0, box.upper, box.lower))
    elif direction == "max":
        arg = np.where(c > 0, box.upper, np.where(c < 0, box.lower, box.lower))
    else:
        raise ValueError(f"direction must be 'min' or 'max', got {direction!r}")
    return float(c @ arg), arg
