"""Roster constraint modeling, solver backends, and benchmarking."""

from .constraints import (
    GcInstance,
    GcKind,
    GcParameterError,
    Violation,
    ViolationReport,
    eval_all,
    eval_gc,
    frac,
    worked_days,
)
from .exact_solver import SearchBudget, brute_force, dfs_feasible
from .generators import (
    ProblemASpec,
    ProblemBSpec,
    build_problem_a,
    build_problem_b,
)
from .instance_io import (
    dump_constraints,
    dump_instance,
    dump_schedule,
    load_constraints,
    load_instance,
    load_schedule,
)
from .milp_backend import LpModel, emit_lp, parse_solution, run_milp, solve_milp
from .model import (
    OverlapAllowance,
    Person,
    RosterInstance,
    Schedule,
    Shift,
    absolute_interval,
    centi,
    enumerate_overlap_pairs,
    hours,
    qualified_personnel,
    shifts_overlap,
    validate_instance,
    validate_schedule,
)
from .smt_backend import (
    EncodingContractError,
    ModelParseError,
    SmtScript,
    emit_smtlib,
    parse_model,
    run_smt,
    solve_smt,
)
from .solve import (
    Backend,
    SolveOutcome,
    SolverConfig,
    Verdict,
    default_milp_config,
    default_smt_config,
)

__version__ = "0.1.0"

__all__ = [
    "Backend",
    "EncodingContractError",
    "GcInstance",
    "GcKind",
    "GcParameterError",
    "LpModel",
    "ModelParseError",
    "OverlapAllowance",
    "Person",
    "ProblemASpec",
    "ProblemBSpec",
    "RosterInstance",
    "Schedule",
    "SearchBudget",
    "Shift",
    "SmtScript",
    "SolveOutcome",
    "SolverConfig",
    "Verdict",
    "Violation",
    "ViolationReport",
    "absolute_interval",
    "brute_force",
    "build_problem_a",
    "build_problem_b",
    "centi",
    "default_milp_config",
    "default_smt_config",
    "dfs_feasible",
    "dump_constraints",
    "dump_instance",
    "dump_schedule",
    "emit_lp",
    "emit_smtlib",
    "enumerate_overlap_pairs",
    "eval_all",
    "eval_gc",
    "frac",
    "hours",
    "load_constraints",
    "load_instance",
    "load_schedule",
    "parse_model",
    "parse_solution",
    "qualified_personnel",
    "run_milp",
    "run_smt",
    "shifts_overlap",
    "solve_milp",
    "solve_smt",
    "validate_instance",
    "validate_schedule",
    "worked_days",
]
