"""SMT-LIB2 compilation of rostering instances and external SMT solving.

One Boolean per (shift, person) pair. Counting uses explicit sums of
if-then-else 0/1 conversions (define-fun b2i) over linear integer
arithmetic; workload constraints are stated over centihour integers so the
script never needs reals. Emission is deterministic: identical inputs give
byte-identical scripts.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from pathlib import Path

from .constraints import GcInstance, GcKind
from .model import RosterInstance, Schedule, enumerate_overlap_pairs, qualified_personnel
from .solve import (
    Backend,
    ProcessResult,
    SolveOutcome,
    SolverConfig,
    Verdict,
    run_command,
    timeout_arg,
)


class ModelParseError(ValueError):
    """Solver model text could not be read."""


class EncodingContractError(ValueError):
    """A solver model breaks an invariant the encoding must guarantee."""


@dataclass(frozen=True)
class SmtScript:
    text: str
    var_index: dict  # (shift_id, person_id) -> symbol name


# ---- Expression builders ----

def _conj(terms) -> str:
    terms = list(terms)
    if not terms:
        return "true"
    if len(terms) == 1:
        return terms[0]
    return "(and " + " ".join(terms) + ")"


def _disj(terms) -> str:
    terms = list(terms)
    if not terms:
        return "false"
    if len(terms) == 1:
        return terms[0]
    return "(or " + " ".join(terms) + ")"


def _isum(terms) -> str:
    terms = list(terms)
    if not terms:
        return "0"
    if len(terms) == 1:
        return terms[0]
    return "(+ " + " ".join(terms) + ")"


def _int(value: int) -> str:
    return str(value) if value >= 0 else f"(- {-value})"


def _b2i(term: str) -> str:
    return f"(b2i {term})"


def _scaled(coeff: int, term: str) -> str:
    if coeff == 1:
        return term
    return f"(* {coeff} {term})"


def _var(sid: int, pid: int) -> str:
    return f"x_{sid}_{pid}"


# ---- Per-kind emitters ----
# Each returns a list of script lines for one constraint; `pfx` makes every
# defined symbol unique per constraint instance.

def _emit_gc1(pfx, gc, instance, lines):
    terms = []
    for sid in sorted(gc.shifts):
        unassigned = _conj([f"(not {_var(sid, j)})" for j in sorted(gc.staff)])
        terms.append(_b2i(unassigned))
    lines.append(f"(define-fun {pfx}count () Int {_isum(terms)})")
    lines.append(f"(assert (>= {pfx}count {gc.x}))")
    lines.append(f"(assert (<= {pfx}count {gc.y}))")


def _emit_gc2(pfx, gc, instance, lines):
    terms = []
    for sid in sorted(gc.shifts):
        shift = instance.shift_by_id[sid]
        unqualified = sorted(gc.staff - qualified_personnel(shift, instance))
        if unqualified:
            terms.append(_b2i(_disj([_var(sid, j) for j in unqualified])))
    lines.append(f"(define-fun {pfx}count () Int {_isum(terms)})")
    lines.append(f"(assert (>= {pfx}count {gc.x}))")
    lines.append(f"(assert (<= {pfx}count {gc.y}))")


def _emit_gc3(pfx, gc, instance, lines):
    pairs = sorted(enumerate_overlap_pairs(instance))
    terms = []
    for j in sorted(gc.staff):
        for (a, b) in pairs:
            if j not in instance.allowed_for(a, b):
                terms.append(_b2i(f"(and {_var(a, j)} {_var(b, j)})"))
    lines.append(f"(define-fun {pfx}count () Int {_isum(terms)})")
    lines.append(f"(assert (>= {pfx}count {gc.x}))")
    lines.append(f"(assert (<= {pfx}count {gc.y}))")


def _workload_sum(person_id, shift_ids, instance) -> str:
    terms = []
    for sid in sorted(shift_ids):
        w = instance.shift_by_id[sid].workload_centi
        if w:
            terms.append(_scaled(w, _b2i(_var(sid, person_id))))
    return _isum(terms)


def _emit_gc4(pfx, gc, instance, lines):
    all_ids = [s.id for s in instance.shifts]
    pu, qu = gc.u.numerator, gc.u.denominator
    pv, qv = gc.v.numerator, gc.v.denominator
    for j in sorted(gc.staff):
        lines.append(f"(define-fun {pfx}all_{j} () Int {_workload_sum(j, all_ids, instance)})")
        lines.append(f"(define-fun {pfx}sub_{j} () Int {_workload_sum(j, gc.shifts, instance)})")
        low = f"(<= {_scaled(pu, f'{pfx}all_{j}')} {_scaled(qu, f'{pfx}sub_{j}')})"
        high = f"(<= {_scaled(qv, f'{pfx}sub_{j}')} {_scaled(pv, f'{pfx}all_{j}')})"
        lines.append(f"(assert (=> (> {pfx}all_{j} 0) (and {low} {high})))")


def _emit_gc5(pfx, gc, instance, lines):
    trigger = _disj(
        [_var(sid, j) for sid in sorted(gc.shifts1) for j in sorted(gc.staff)]
    )
    counted = _isum(
        [_b2i(_var(sid, j)) for sid in sorted(gc.shifts2) for j in sorted(gc.staff2)]
    )
    lines.append(f"(define-fun {pfx}trig () Bool {trigger})")
    lines.append(f"(define-fun {pfx}count () Int {counted})")
    lines.append(
        f"(assert (=> {pfx}trig (and (>= {pfx}count {gc.x}) (<= {pfx}count {gc.y}))))"
    )


def _emit_worked_defs(pfx, gc, instance, lines):
    """Boolean worked(j, d) abbreviations over gc.shifts; returns name maker."""
    by_day: dict = {}
    for sid in sorted(gc.shifts):
        by_day.setdefault(instance.shift_by_id[sid].start_day, []).append(sid)

    def w(j, d):
        return f"{pfx}w_{j}_{d}"

    for j in sorted(gc.staff):
        for d in range(1, instance.horizon_days + 1):
            body = _disj([_var(sid, j) for sid in by_day.get(d, [])])
            lines.append(f"(define-fun {w(j, d)} () Bool {body})")
    return w


def _emit_gc6(pfx, gc, instance, lines):
    horizon = instance.horizon_days
    w = _emit_worked_defs(pfx, gc, instance, lines)
    for j in sorted(gc.staff):
        # upper bound: every window of y+1 days has a free day
        for d in range(1, horizon - gc.y + 1):
            window = [f"(not {w(j, t)})" for t in range(d, d + gc.y + 1)]
            lines.append(f"(assert {_disj(window)})")
        # lower bound: an interior run start must extend x days or hit the edge
        if gc.x >= 2:
            for d in range(2, horizon + 1):
                forced = [w(j, t) for t in range(d + 1, min(d + gc.x - 1, horizon) + 1)]
                if not forced:
                    continue  # run starting here reaches the horizon edge
                start = f"(and {w(j, d)} (not {w(j, d - 1)}))"
                lines.append(f"(assert (=> {start} {_conj(forced)}))")


def _emit_gc7(pfx, gc, instance, lines):
    horizon = instance.horizon_days
    day_of = {s.id: s.start_day for s in instance.shifts}
    w = _emit_worked_defs(pfx, gc, instance, lines)
    for j in sorted(gc.staff):
        for d in range(1, horizon + 1):
            for length in range(max(1, gc.x), gc.y + 1):
                last = d + length - 1
                if last > horizon:
                    break
                excluded = []
                for sid in sorted(gc.shifts1):
                    if d - gc.n <= day_of[sid] <= d - 1:
                        excluded.append(f"(not {_var(sid, j)})")
                for sid in sorted(gc.shifts2):
                    if last + 1 <= day_of[sid] <= last + gc.m:
                        excluded.append(f"(not {_var(sid, j)})")
                if not excluded:
                    continue
                conj = []
                if d > 1:
                    conj.append(f"(not {w(j, d - 1)})")
                conj.extend(w(j, t) for t in range(d, last + 1))
                if last < horizon:
                    conj.append(f"(not {w(j, last + 1)})")
                run = f"{pfx}run_{j}_{d}_{length}"
                lines.append(f"(define-fun {run} () Bool {_conj(conj)})")
                lines.append(f"(assert (=> {run} {_conj(excluded)}))")


def _emit_gc8(pfx, gc, instance, lines):
    horizon = instance.horizon_days
    shifts = [instance.shift_by_id[sid] for sid in sorted(gc.shifts)]
    types = sorted({s.shift_type for s in shifts})
    type_tag = {t: f"t{k}" for k, t in enumerate(types)}
    by_day_type: dict = {}
    by_day: dict = {}
    for s in shifts:
        by_day_type.setdefault((s.start_day, s.shift_type), []).append(s.id)
        by_day.setdefault(s.start_day, []).append(s.id)

    def a(j, d, t):
        return f"{pfx}a_{j}_{d}_{type_tag[t]}"

    def wany(j, d):
        return f"{pfx}any_{j}_{d}"

    for j in sorted(gc.staff):
        for d in range(1, horizon + 1):
            for t in types:
                ids = by_day_type.get((d, t))
                if ids:
                    lines.append(
                        f"(define-fun {a(j, d, t)} () Bool {_disj([_var(i, j) for i in ids])})"
                    )
            if d < horizon:
                body = _disj([_var(i, j) for i in by_day.get(d, [])])
                lines.append(f"(define-fun {wany(j, d)} () Bool {body})")
        for d in range(2, horizon + 1):
            for t in types:
                if (d, t) not in by_day_type:
                    continue
                carry = []
                if (d - 1, t) in by_day_type:
                    carry.append(a(j, d - 1, t))
                carry.append(f"(not {wany(j, d - 1)})")
                lines.append(f"(assert (=> {a(j, d, t)} {_disj(carry)}))")


def _emit_gc9(pfx, gc, instance, lines):
    total_shift = sum(instance.shift_by_id[sid].workload_centi for sid in gc.shifts)
    total_desired = sum(instance.person_by_id[j].desired_centi for j in gc.staff)
    if total_desired == 0:
        return  # no staff in scope
    pv, qv = gc.v.numerator, gc.v.denominator
    scale = qv * total_desired
    for j in sorted(gc.staff):
        desired = instance.person_by_id[j].desired_centi
        low = (qv - pv) * total_shift * desired
        high = (qv + pv) * total_shift * desired
        lines.append(f"(define-fun {pfx}sub_{j} () Int {_workload_sum(j, gc.shifts, instance)})")
        lines.append(f"(assert (<= {_int(low)} {_scaled(scale, f'{pfx}sub_{j}')}))")
        lines.append(f"(assert (<= {_scaled(scale, f'{pfx}sub_{j}')} {_int(high)}))")


_EMITTERS = {
    GcKind.GC1: _emit_gc1,
    GcKind.GC2: _emit_gc2,
    GcKind.GC3: _emit_gc3,
    GcKind.GC4: _emit_gc4,
    GcKind.GC5: _emit_gc5,
    GcKind.GC6: _emit_gc6,
    GcKind.GC7: _emit_gc7,
    GcKind.GC8: _emit_gc8,
    GcKind.GC9: _emit_gc9,
}


def emit_smtlib(instance: RosterInstance, constraints) -> SmtScript:
    """Compile instance plus constraint list to a complete SMT-LIB2 script."""
    var_index = {}
    lines = [
        "(set-option :produce-models true)",
        "(set-logic QF_LIA)",
        "(define-fun b2i ((b Bool)) Int (ite b 1 0))",
    ]
    for s in instance.shifts:
        for p in instance.personnel:
            name = _var(s.id, p.id)
            var_index[(s.id, p.id)] = name
            lines.append(f"(declare-const {name} Bool)")
    # one person per shift
    for s in instance.shifts:
        terms = [_b2i(_var(s.id, p.id)) for p in instance.personnel]
        if terms:
            lines.append(f"(assert (<= {_isum(terms)} 1))")
    for idx, gc in enumerate(constraints, start=1):
        emitter = _EMITTERS.get(gc.kind)
        if emitter is None:
            raise ValueError(f"unsupported constraint kind: {gc.kind}")
        lines.append(f"; c{idx} {gc.kind.value}" + (f" {gc.label}" if gc.label else ""))
        emitter(f"c{idx}_", gc, instance, lines)
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return SmtScript(text="\n".join(lines) + "\n", var_index=var_index)


# ---- Model parsing ----

_MODEL_RE = re.compile(
    r"\(\s*define-fun\s+([A-Za-z0-9_]+)\s*\(\s*\)\s*Bool\s+(true|false)\s*\)"
)


def parse_model(raw_model: str, var_index: dict) -> Schedule:
    """Read a get-model answer into a Schedule.

    Symbols absent from the model default to false. A model assigning two
    persons to one shift is an encoder bug and raises loudly.
    """
    values = {name: text == "true" for name, text in _MODEL_RE.findall(raw_model)}
    if not values and ("define-fun" in raw_model or "error" in raw_model.lower()):
        raise ModelParseError(f"no boolean assignments found in model: {raw_model[:200]!r}")
    assignment = {}
    for (sid, pid), name in sorted(var_index.items()):
        if values.get(name, False):
            if sid in assignment:
                raise EncodingContractError(
                    f"model assigns both person {assignment[sid]} and {pid} to shift {sid}"
                )
            assignment[sid] = pid
    return Schedule(assignment)


# ---- Solver invocation ----

def script_path(script: SmtScript, workdir: Path) -> Path:
    digest = hashlib.sha256(script.text.encode()).hexdigest()[:16]
    return Path(workdir) / f"roster_{digest}.smt2"


def _status_line(stdout: str):
    for line in stdout.splitlines():
        word = line.strip()
        if word in ("sat", "unsat", "unknown", "timeout"):
            return word
    return None


def run_smt(script: SmtScript, config: SolverConfig) -> SolveOutcome:
    """Invoke the configured SMT solver on the script; map its answer."""
    workdir = Path(config.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    path = script_path(script, workdir)
    path.write_text(script.text)
    argv = config.render(file=str(path), timeout=timeout_arg(config.timeout))
    result = run_command(argv, config.timeout)
    return _outcome_from(result, script, config)


def _outcome_from(result: ProcessResult, script: SmtScript, config: SolverConfig) -> SolveOutcome:
    log = result.stdout + ("\n" + result.stderr if result.stderr else "")
    if result.timed_out:
        return SolveOutcome(Verdict.TIMEOUT, Backend.SMT, result.wall_time, raw_log=log)
    status = _status_line(result.stdout)
    if status == "sat":
        try:
            schedule = parse_model(result.stdout, script.var_index)
        except ModelParseError:
            return SolveOutcome(Verdict.SOLVER_ERROR, Backend.SMT, result.wall_time, raw_log=log)
        return SolveOutcome(Verdict.FEASIBLE, Backend.SMT, result.wall_time, schedule, log)
    if status == "unsat":
        return SolveOutcome(Verdict.INFEASIBLE, Backend.SMT, result.wall_time, raw_log=log)
    if status == "unknown":
        return SolveOutcome(Verdict.UNKNOWN, Backend.SMT, result.wall_time, raw_log=log)
    if status == "timeout":
        return SolveOutcome(Verdict.TIMEOUT, Backend.SMT, result.wall_time, raw_log=log)
    return SolveOutcome(Verdict.SOLVER_ERROR, Backend.SMT, result.wall_time, raw_log=log)


def solve_smt(instance: RosterInstance, constraints, config: SolverConfig) -> SolveOutcome:
    return run_smt(emit_smtlib(instance, constraints), config)
