"""Robust CBF/CLF quadratic-program control under box parameter uncertainty,
with online set-membership identification that shrinks the uncertainty while
preserving the safety and stability certificates.

Layout: :mod:`~boxsafe.paramset` (boxes, halfspaces, corner oracle),
:mod:`~boxsafe.model` (uncertain dynamics), :mod:`~boxsafe.certificates`
(barriers, Lyapunov functions, robust constraints), :mod:`~boxsafe.lp` /
:mod:`~boxsafe.qp` (dense solvers), :mod:`~boxsafe.controller` (robust QP
policies), :mod:`~boxsafe.smid` (identification), :mod:`~boxsafe.sim`
(closed-loop simulation), :mod:`~boxsafe.scenarios` (benchmarks),
:mod:`~boxsafe.cli` (command line).
"""

from .certificates import (
    BarrierCandidate,
    ClassKappa,
    LyapunovCandidate,
    RobustAffineConstraint,
    hocbf_constraint,
    rcbf_constraint,
    rclf_constraint,
)
from .controller import ControlOutput, pipeline_policy, rcbf_filter, rclf_policy, verify_worst_case
from .lp import LinearProgram, SolveResult, solve_lp
from .model import TrueParameters, UncertainModel
from .paramset import HalfspaceForm, ParameterBox, box_worst_case, to_halfspace
from .qp import QPResult, QuadraticProgram, solve_qp
from .scenarios import Scenario, get_scenario, scenario_nonlinear2d, scenario_planar_robot
from .sim import SimConfig, TrajectoryLog, metrics, rk4_step, run, write_run
from .smid import (
    HistoryEntry,
    HistoryStack,
    IdentificationConflictError,
    SmidConfig,
    WindowAccumulator,
    schedule,
    update_set,
)

__version__ = "0.1.0"

__all__ = [
    "BarrierCandidate",
    "ClassKappa",
    "ControlOutput",
    "HalfspaceForm",
    "HistoryEntry",
    "HistoryStack",
    "IdentificationConflictError",
    "LinearProgram",
    "LyapunovCandidate",
    "ParameterBox",
    "QPResult",
    "QuadraticProgram",
    "RobustAffineConstraint",
    "Scenario",
    "SimConfig",
    "SmidConfig",
    "SolveResult",
    "TrajectoryLog",
    "TrueParameters",
    "UncertainModel",
    "WindowAccumulator",
    "box_worst_case",
    "get_scenario",
    "hocbf_constraint",
    "metrics",
    "pipeline_policy",
    "rcbf_constraint",
    "rcbf_filter",
    "rclf_constraint",
    "rclf_policy",
    "rk4_step",
    "run",
    "scenario_nonlinear2d",
    "scenario_planar_robot",
    "schedule",
    "solve_lp",
    "solve_qp",
    "to_halfspace",
    "update_set",
    "verify_worst_case",
    "write_run",
]
