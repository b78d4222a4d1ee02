"""LP-file compilation of rostering instances and external MILP solving.

All assignment and auxiliary variables are binary; workload coefficients
are centihour integers, so every row has integer coefficients. Feasibility
is posed as minimization of the constant 0. Emission is deterministic.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

from .constraints import GcKind
from .model import RosterInstance, Schedule, enumerate_overlap_pairs, qualified_personnel
from .smt_backend import EncodingContractError
from .solve import (
    Backend,
    SolveOutcome,
    SolverConfig,
    Verdict,
    run_command,
    timeout_arg,
)

INTEGRALITY_TOL = 0.001


@dataclass(frozen=True)
class LpModel:
    text: str
    var_index: dict  # (shift_id, person_id) -> binary variable name
    aux_index: dict  # (constraint_tag, key) -> auxiliary binary variable name


def _var(sid: int, pid: int) -> str:
    return f"x_{sid}_{pid}"


class _Builder:
    """Accumulates binary variables and rows, then renders LP text."""

    def __init__(self):
        self.binaries = []
        self.rows = []  # (name, [(coef, var)], sense, rhs)

    def declare(self, name: str) -> str:
        self.binaries.append(name)
        return name

    def row(self, name, terms, sense, rhs):
        merged = {}
        for coef, var in terms:
            merged[var] = merged.get(var, 0) + coef
        terms = [(c, v) for v, c in merged.items() if c != 0]
        if not terms:
            # constant row: keep it only when it is violated, pinned to a
            # zero-coefficient variable so the file stays well formed
            holds = {"<=": 0 <= rhs, ">=": 0 >= rhs, "=": rhs == 0}[sense]
            if holds:
                return
            terms = [(0, self.binaries[0])]
        self.rows.append((name, terms, sense, rhs))

    def render(self) -> str:
        if not self.binaries:
            raise ValueError("cannot emit an LP model with no variables")
        out = ["Minimize", f" obj: 0 {self.binaries[0]}", "Subject To"]
        for name, terms, sense, rhs in self.rows:
            out.append(f" {name}: {_render_terms(terms)} {sense} {rhs}")
        out.append("Bounds")
        out.append("Binary")
        for var in self.binaries:
            out.append(f" {var}")
        out.append("End")
        return "\n".join(out) + "\n"


def _render_terms(terms) -> str:
    parts = []
    for idx, (coef, var) in enumerate(terms):
        mag = abs(coef)
        body = var if mag == 1 else f"{mag} {var}"
        if idx == 0:
            parts.append(body if coef >= 0 else f"- {body}")
        else:
            parts.append(("+ " if coef >= 0 else "- ") + body)
    return " ".join(parts)


def _count_bounds(b, tag, aux_vars, x, y):
    """x <= sum of auxiliaries <= y."""
    terms = [(1, z) for z in aux_vars]
    b.row(f"{tag}_cnt_lo", list(terms), ">=", x)
    b.row(f"{tag}_cnt_hi", list(terms), "<=", y)


# ---- Per-kind emitters ----

def _emit_gc1(b, tag, gc, instance, aux):
    big_m = max(1, len(gc.staff))
    zs = []
    for sid in sorted(gc.shifts):
        z = aux(f"z_{sid}")
        zs.append(z)
        cover = [(1, _var(sid, j)) for j in sorted(gc.staff)]
        b.row(f"{tag}_cov_lo_{sid}", cover + [(1, z)], ">=", 1)
        b.row(f"{tag}_cov_hi_{sid}", cover + [(big_m, z)], "<=", big_m)
    _count_bounds(b, tag, zs, gc.x, gc.y)


def _emit_gc2(b, tag, gc, instance, aux):
    big_m = max(1, len(gc.staff))
    zs = []
    for sid in sorted(gc.shifts):
        shift = instance.shift_by_id[sid]
        unqualified = sorted(gc.staff - qualified_personnel(shift, instance))
        z = aux(f"z_{sid}")
        zs.append(z)
        hits = [(1, _var(sid, j)) for j in unqualified]
        b.row(f"{tag}_unq_lo_{sid}", hits + [(-1, z)], ">=", 0)
        b.row(f"{tag}_unq_hi_{sid}", hits + [(-big_m, z)], "<=", 0)
    _count_bounds(b, tag, zs, gc.x, gc.y)


def _emit_gc3(b, tag, gc, instance, aux):
    pairs = sorted(enumerate_overlap_pairs(instance))
    zs = []
    for j in sorted(gc.staff):
        for (p, q) in pairs:
            if j in instance.allowed_for(p, q):
                continue
            z = aux(f"z_{j}_{p}_{q}")
            zs.append(z)
            both = [(1, _var(p, j)), (1, _var(q, j))]
            b.row(f"{tag}_pair_lo_{j}_{p}_{q}", both + [(-2, z)], ">=", 0)
            b.row(f"{tag}_pair_hi_{j}_{p}_{q}", both + [(-1, z)], "<=", 1)
    _count_bounds(b, tag, zs, gc.x, gc.y)


def _workload_terms(person_id, shift_ids, instance, scale=1):
    terms = []
    for sid in sorted(shift_ids):
        w = instance.shift_by_id[sid].workload_centi
        if w:
            terms.append((scale * w, _var(sid, person_id)))
    return terms


def _emit_gc4(b, tag, gc, instance, aux):
    all_ids = [s.id for s in instance.shifts]
    big_m = max(1, sum(s.workload_centi for s in instance.shifts))
    pu, qu = gc.u.numerator, gc.u.denominator
    pv, qv = gc.v.numerator, gc.v.denominator
    for j in sorted(gc.staff):
        ind = aux(f"b_{j}")
        w_all = _workload_terms(j, all_ids, instance)
        b.row(f"{tag}_ind_hi_{j}", w_all + [(-big_m, ind)], "<=", 0)
        b.row(f"{tag}_ind_lo_{j}", w_all + [(-1, ind)], ">=", 0)
        # u * W_all - M(1-b) <= W_sub, denominators cleared by qu
        low = _workload_terms(j, all_ids, instance, scale=pu)
        low += _workload_terms(j, gc.shifts, instance, scale=-qu)
        b.row(f"{tag}_frac_lo_{j}", low + [(pu * big_m, ind)], "<=", pu * big_m)
        # W_sub <= v * W_all + M(1-b), denominators cleared by qv
        high = _workload_terms(j, gc.shifts, instance, scale=qv)
        high += _workload_terms(j, all_ids, instance, scale=-pv)
        b.row(f"{tag}_frac_hi_{j}", high + [(qv * big_m, ind)], "<=", qv * big_m)


def _emit_gc5(b, tag, gc, instance, aux):
    trigger = [(1, _var(sid, j)) for sid in sorted(gc.shifts1) for j in sorted(gc.staff)]
    counted = [(1, _var(sid, j)) for sid in sorted(gc.shifts2) for j in sorted(gc.staff2)]
    m1 = max(1, len(trigger))
    m2 = max(1, len(counted))
    g = aux("g")
    b.row(f"{tag}_trig_hi", trigger + [(-m1, g)], "<=", 0)
    b.row(f"{tag}_trig_lo", trigger + [(-1, g)], ">=", 0)
    b.row(f"{tag}_resp_lo", counted + [(-gc.x, g)], ">=", 0)
    b.row(f"{tag}_resp_hi", counted + [(m2, g)], "<=", gc.y + m2)


def _emit_worked_vars(b, tag, gc, instance, aux):
    """Two-sided linked worked-day indicators w(j, d) over gc.shifts."""
    by_day: dict = {}
    for sid in sorted(gc.shifts):
        by_day.setdefault(instance.shift_by_id[sid].start_day, []).append(sid)

    names = {}
    for j in sorted(gc.staff):
        for d in range(1, instance.horizon_days + 1):
            w = aux(f"w_{j}_{d}")
            names[(j, d)] = w
            ids = by_day.get(d, [])
            for sid in ids:
                b.row(f"{tag}_wlink_{j}_{d}_{sid}", [(1, w), (-1, _var(sid, j))], ">=", 0)
            b.row(
                f"{tag}_wub_{j}_{d}",
                [(1, w)] + [(-1, _var(sid, j)) for sid in ids],
                "<=",
                0,
            )
    return names


def _emit_gc6(b, tag, gc, instance, aux):
    horizon = instance.horizon_days
    w = _emit_worked_vars(b, tag, gc, instance, aux)
    for j in sorted(gc.staff):
        for d in range(1, horizon - gc.y + 1):
            window = [(1, w[(j, t)]) for t in range(d, d + gc.y + 1)]
            b.row(f"{tag}_win_{j}_{d}", window, "<=", gc.y)
        if gc.x >= 2:
            for d in range(2, horizon + 1):
                forced = [w[(j, t)] for t in range(d + 1, min(d + gc.x - 1, horizon) + 1)]
                if not forced:
                    continue  # a run starting here reaches the horizon edge
                s = aux(f"s_{j}_{d}")
                b.row(
                    f"{tag}_start_{j}_{d}",
                    [(1, s), (-1, w[(j, d)]), (1, w[(j, d - 1)])],
                    ">=",
                    0,
                )
                for t, wt in enumerate(forced, start=1):
                    b.row(f"{tag}_ext_{j}_{d}_{t}", [(1, wt), (-1, s)], ">=", 0)


def _emit_gc7(b, tag, gc, instance, aux):
    horizon = instance.horizon_days
    day_of = {s.id: s.start_day for s in instance.shifts}
    w = _emit_worked_vars(b, tag, gc, instance, aux)
    for j in sorted(gc.staff):
        for d in range(1, horizon + 1):
            for length in range(max(1, gc.x), gc.y + 1):
                last = d + length - 1
                if last > horizon:
                    break
                before = [sid for sid in sorted(gc.shifts1)
                          if d - gc.n <= day_of[sid] <= d - 1]
                after = [sid for sid in sorted(gc.shifts2)
                         if last + 1 <= day_of[sid] <= last + gc.m]
                if not before and not after:
                    continue
                r = aux(f"r_{j}_{d}_{length}")
                run_days = [w[(j, t)] for t in range(d, last + 1)]
                lower = [(1, r)] + [(-1, wt) for wt in run_days]
                if d > 1:
                    lower.append((1, w[(j, d - 1)]))
                if last < horizon:
                    lower.append((1, w[(j, last + 1)]))
                b.row(f"{tag}_run_lo_{j}_{d}_{length}", lower, ">=", 1 - length)
                for t, wt in enumerate(run_days, start=1):
                    b.row(f"{tag}_run_day_{j}_{d}_{length}_{t}", [(1, wt), (-1, r)], ">=", 0)
                if d > 1:
                    b.row(
                        f"{tag}_run_pre_{j}_{d}_{length}",
                        [(1, r), (1, w[(j, d - 1)])],
                        "<=",
                        1,
                    )
                if last < horizon:
                    b.row(
                        f"{tag}_run_post_{j}_{d}_{length}",
                        [(1, r), (1, w[(j, last + 1)])],
                        "<=",
                        1,
                    )
                for sid in before:
                    b.row(f"{tag}_excl_b_{j}_{d}_{length}_{sid}",
                          [(1, _var(sid, j)), (1, r)], "<=", 1)
                for sid in after:
                    b.row(f"{tag}_excl_a_{j}_{d}_{length}_{sid}",
                          [(1, _var(sid, j)), (1, r)], "<=", 1)


def _emit_gc8(b, tag, gc, instance, aux):
    horizon = instance.horizon_days
    shifts = [instance.shift_by_id[sid] for sid in sorted(gc.shifts)]
    types = sorted({s.shift_type for s in shifts})
    type_tag = {t: f"t{k}" for k, t in enumerate(types)}
    by_day_type: dict = {}
    by_day: dict = {}
    for s in shifts:
        by_day_type.setdefault((s.start_day, s.shift_type), []).append(s.id)
        by_day.setdefault(s.start_day, []).append(s.id)
    for j in sorted(gc.staff):
        a_names = {}
        any_names = {}
        for d in range(1, horizon + 1):
            for t in types:
                ids = by_day_type.get((d, t))
                if not ids:
                    continue
                a = aux(f"a_{j}_{d}_{type_tag[t]}")
                a_names[(d, t)] = a
                for sid in ids:
                    b.row(f"{tag}_alink_{j}_{d}_{type_tag[t]}_{sid}",
                          [(1, a), (-1, _var(sid, j))], ">=", 0)
                b.row(f"{tag}_aub_{j}_{d}_{type_tag[t]}",
                      [(1, a)] + [(-1, _var(sid, j)) for sid in ids], "<=", 0)
            if d < horizon:
                ids = by_day.get(d, [])
                wany = aux(f"any_{j}_{d}")
                any_names[d] = wany
                for sid in ids:
                    b.row(f"{tag}_anylink_{j}_{d}_{sid}",
                          [(1, wany), (-1, _var(sid, j))], ">=", 0)
                b.row(f"{tag}_anyub_{j}_{d}",
                      [(1, wany)] + [(-1, _var(sid, j)) for sid in ids], "<=", 0)
        for d in range(2, horizon + 1):
            for t in types:
                if (d, t) not in a_names:
                    continue
                terms = [(1, a_names[(d, t)]), (1, any_names[d - 1])]
                if (d - 1, t) in a_names:
                    terms.append((-1, a_names[(d - 1, t)]))
                b.row(f"{tag}_same_{j}_{d}_{type_tag[t]}", terms, "<=", 1)


def _emit_gc9(b, tag, gc, instance, aux):
    total_shift = sum(instance.shift_by_id[sid].workload_centi for sid in gc.shifts)
    total_desired = sum(instance.person_by_id[j].desired_centi for j in gc.staff)
    if total_desired == 0:
        return
    pv, qv = gc.v.numerator, gc.v.denominator
    scale = qv * total_desired
    for j in sorted(gc.staff):
        desired = instance.person_by_id[j].desired_centi
        low = (qv - pv) * total_shift * desired
        high = (qv + pv) * total_shift * desired
        terms = _workload_terms(j, gc.shifts, instance, scale=scale)
        lo_terms, lo_rhs = _gcd_normalize(terms, low)
        hi_terms, hi_rhs = _gcd_normalize(terms, high)
        b.row(f"{tag}_wl_lo_{j}", lo_terms, ">=", lo_rhs)
        b.row(f"{tag}_wl_hi_{j}", hi_terms, "<=", hi_rhs)


def _gcd_normalize(terms, rhs):
    values = [abs(c) for c, _ in terms] + [abs(rhs)]
    g = 0
    for v in values:
        g = math.gcd(g, v)
    if g <= 1:
        return list(terms), rhs
    return [(c // g, v) for c, v in terms], rhs // g


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


def emit_lp(instance: RosterInstance, constraints) -> LpModel:
    """Compile instance plus constraint list to a CPLEX-style LP document."""
    b = _Builder()
    var_index = {}
    for s in instance.shifts:
        for p in instance.personnel:
            var_index[(s.id, p.id)] = b.declare(_var(s.id, p.id))
    aux_index = {}
    for s in instance.shifts:
        terms = [(1, _var(s.id, p.id)) for p in instance.personnel]
        if terms:
            b.row(f"one_{s.id}", terms, "<=", 1)
    for idx, gc in enumerate(constraints, start=1):
        emitter = _EMITTERS.get(gc.kind)
        if emitter is None:
            raise ValueError(f"unsupported constraint kind: {gc.kind}")
        tag = f"c{idx}"

        def aux(key, _tag=tag):
            name = b.declare(f"{_tag}_{key}")
            aux_index[(_tag, key)] = name
            return name

        emitter(b, tag, gc, instance, aux)
    return LpModel(text=b.render(), var_index=var_index, aux_index=aux_index)


# ---- Solution parsing ----

def parse_solution(raw: str, var_index: dict) -> Schedule:
    """Read a `var value` solution file into a Schedule.

    Values must be integral within 0.001; anything else is a contract
    violation. Variables absent from the file count as 0.
    """
    values = {}
    for line in raw.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            continue
        name, text = parts
        try:
            value = float(text)
        except ValueError:
            continue
        values[name] = value
    assignment = {}
    for (sid, pid), name in sorted(var_index.items()):
        value = values.get(name, 0.0)
        if abs(value) <= INTEGRALITY_TOL:
            continue
        if abs(value - 1.0) <= INTEGRALITY_TOL:
            if sid in assignment:
                raise EncodingContractError(
                    f"solution assigns both person {assignment[sid]} and {pid} to shift {sid}"
                )
            assignment[sid] = pid
            continue
        raise EncodingContractError(
            f"binary variable {name} has non-integral value {value}"
        )
    return Schedule(assignment)


# ---- Solver invocation ----

def model_path(model: LpModel, workdir: Path) -> Path:
    digest = hashlib.sha256(model.text.encode()).hexdigest()[:16]
    return Path(workdir) / f"roster_{digest}.lp"


def run_milp(model: LpModel, config: SolverConfig) -> SolveOutcome:
    """Invoke the configured MILP solver; verdict from its output keywords."""
    workdir = Path(config.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    lp_path = model_path(model, workdir)
    lp_path.write_text(model.text)
    sol_path = lp_path.with_suffix(".sol")
    if sol_path.exists():
        sol_path.unlink()
    argv = config.render(
        file=str(lp_path), timeout=timeout_arg(config.timeout), solution=str(sol_path)
    )
    result = run_command(argv, config.timeout)
    log = result.stdout + ("\n" + result.stderr if result.stderr else "")
    if result.timed_out:
        return SolveOutcome(Verdict.TIMEOUT, Backend.MILP, result.wall_time, raw_log=log)
    lowered = result.stdout.lower()
    # "infeasible" first: it contains "feasible" as a substring
    if "infeasible" in lowered:
        return SolveOutcome(Verdict.INFEASIBLE, Backend.MILP, result.wall_time, raw_log=log)
    solved = "optimal" in lowered or "feasible" in lowered or "solution found" in lowered
    if solved or ("time limit" in lowered and sol_path.exists()):
        if not sol_path.exists():
            return SolveOutcome(Verdict.SOLVER_ERROR, Backend.MILP, result.wall_time, raw_log=log)
        try:
            schedule = parse_solution(sol_path.read_text(), model.var_index)
        except EncodingContractError:
            return SolveOutcome(Verdict.SOLVER_ERROR, Backend.MILP, result.wall_time, raw_log=log)
        return SolveOutcome(Verdict.FEASIBLE, Backend.MILP, result.wall_time, schedule, log)
    if "time limit" in lowered:
        return SolveOutcome(Verdict.TIMEOUT, Backend.MILP, result.wall_time, raw_log=log)
    return SolveOutcome(Verdict.SOLVER_ERROR, Backend.MILP, result.wall_time, raw_log=log)


def solve_milp(instance: RosterInstance, constraints, config: SolverConfig) -> SolveOutcome:
    return run_milp(emit_lp(instance, constraints), config)
