"""Solver invocation plumbing: verdicts, outcomes, configs, subprocess runs.

Both backends write a problem file to a workdir, spawn an external solver
from a command template and measure wall time around the whole subprocess.
Command templates come from environment variables when set, otherwise from
a well-known CLI found on PATH, otherwise from the bundled fallback solvers
shipped with this package.
"""

from __future__ import annotations

import math
import os
import shlex
import shutil
import subprocess
import sys
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

from .model import Schedule

SMT_CMD_ENV = "SMT_SOLVER_CMD"
MILP_CMD_ENV = "MILP_SOLVER_CMD"


class Verdict(Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"
    TIMEOUT = "timeout"
    SOLVER_ERROR = "solver_error"

    @property
    def definite(self) -> bool:
        return self in (Verdict.FEASIBLE, Verdict.INFEASIBLE)


class Backend(Enum):
    SMT = "smt"
    MILP = "milp"
    NATIVE = "native"


@dataclass(frozen=True)
class SolveOutcome:
    verdict: Verdict
    backend: Backend
    wall_time: float
    schedule: Optional[Schedule] = None
    raw_log: str = ""

    def __post_init__(self):
        if (self.schedule is not None) != (self.verdict == Verdict.FEASIBLE):
            raise ValueError("schedule must be present exactly when verdict is feasible")


@dataclass(frozen=True)
class SolverConfig:
    """Command template plus limits. Template tokens may contain {file},
    {timeout} (integer seconds, at least 1) and {solution} placeholders."""

    command: tuple
    timeout: float = 60.0
    workdir: Path = field(default_factory=lambda: Path(".rosterkit"))

    def __post_init__(self):
        object.__setattr__(self, "command", tuple(self.command))
        object.__setattr__(self, "workdir", Path(self.workdir))
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")

    def render(self, **subs) -> list:
        return [tok.format(**subs) for tok in self.command]


def _bundled(module: str, *extra) -> tuple:
    return (sys.executable, "-m", module, *extra)


def default_smt_command() -> tuple:
    env = os.environ.get(SMT_CMD_ENV)
    if env:
        return tuple(shlex.split(env))
    if shutil.which("z3"):
        return ("z3", "-T:{timeout}", "{file}")
    return _bundled("rosterkit.shims.smt_cli", "--timeout", "{timeout}", "{file}")


def default_milp_command() -> tuple:
    env = os.environ.get(MILP_CMD_ENV)
    if env:
        return tuple(shlex.split(env))
    if shutil.which("gurobi_cl"):
        return ("gurobi_cl", "TimeLimit={timeout}", "ResultFile={solution}", "{file}")
    return _bundled(
        "rosterkit.shims.milp_cli", "--timeout", "{timeout}", "--solution", "{solution}", "{file}"
    )


def default_smt_config(timeout: float = 60.0, workdir=None) -> SolverConfig:
    return SolverConfig(
        command=default_smt_command(),
        timeout=timeout,
        workdir=workdir if workdir is not None else Path(".rosterkit"),
    )


def default_milp_config(timeout: float = 60.0, workdir=None) -> SolverConfig:
    return SolverConfig(
        command=default_milp_command(),
        timeout=timeout,
        workdir=workdir if workdir is not None else Path(".rosterkit"),
    )


@dataclass
class ProcessResult:
    stdout: str
    stderr: str
    returncode: int
    wall_time: float
    timed_out: bool


def run_command(argv, timeout: float, cwd=None) -> ProcessResult:
    """Run one solver subprocess; wall clock covers spawn to exit.

    The solver is told its own limit via the command template; the kill here
    enforces the limit for solvers that ignore it.
    """
    hard_limit = timeout
    start = time.perf_counter()
    try:
        proc = subprocess.run(
            list(argv),
            capture_output=True,
            text=True,
            timeout=hard_limit,
            cwd=cwd,
        )
        elapsed = time.perf_counter() - start
        return ProcessResult(proc.stdout, proc.stderr, proc.returncode, elapsed, False)
    except subprocess.TimeoutExpired as exc:
        elapsed = time.perf_counter() - start
        out = exc.stdout or b""
        err = exc.stderr or b""
        if isinstance(out, bytes):
            out = out.decode(errors="replace")
        if isinstance(err, bytes):
            err = err.decode(errors="replace")
        return ProcessResult(out, err, -1, elapsed, True)
    except FileNotFoundError as exc:
        elapsed = time.perf_counter() - start
        return ProcessResult("", f"command not found: {exc}", 127, elapsed, False)


def timeout_arg(timeout: float) -> str:
    """Integer-seconds form of a timeout for command templates."""
    return str(max(1, math.ceil(timeout)))
