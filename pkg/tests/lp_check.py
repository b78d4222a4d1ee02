"""Row-level audit of emitted LP files against a concrete roster.

Parses the `Subject To` section back out of an LpModel, derives the
intended 0/1 value of every assignment and auxiliary variable from a
schedule, and reports which rows the valuation breaks. A schedule that
satisfies every constraint must satisfy every row; a schedule that
breaks some constraint must break at least one row.
"""

from __future__ import annotations

from rosterkit.constraints import GcKind
from rosterkit.model import qualified_personnel

SENSES = ("<=", ">=", "=")


def parse_rows(text):
    """[(name, [(coef, var), ...], sense, rhs)] from the Subject To block."""
    lines = text.splitlines()
    start = lines.index("Subject To") + 1
    stop = lines.index("Bounds")
    rows = []
    for line in lines[start:stop]:
        name, body = line.split(":", 1)
        tokens = body.split()
        sense = tokens[-2]
        assert sense in SENSES, line
        rhs = int(tokens[-1])
        terms = []
        sign, coef = 1, None
        for tok in tokens[:-2]:
            if tok == "+":
                sign = 1
            elif tok == "-":
                sign = -1
            elif tok.lstrip("-").isdigit():
                coef = int(tok)
            else:
                terms.append((sign * (1 if coef is None else coef), tok))
                sign, coef = 1, None
        rows.append((name.strip(), terms, sense, rhs))
    return rows


def _worked(schedule, instance, shift_ids, j, d):
    for sid in shift_ids:
        if instance.shift_by_id[sid].start_day == d and schedule.get(sid) == j:
            return 1
    return 0


def _aux_value(kind, gc, instance, assigned, key):
    """Intended 0/1 value of one auxiliary variable."""
    parts = key.split("_")
    head = parts[0]
    if head == "z" and kind in (GcKind.GC1, GcKind.GC2):
        sid = int(parts[1])
        holder = assigned.get(sid)
        if kind is GcKind.GC1:
            return 0 if holder in gc.staff else 1
        if holder is None or holder not in gc.staff:
            return 0
        shift = instance.shift_by_id[sid]
        return 0 if holder in qualified_personnel(shift, instance) else 1
    if head == "z":  # GC3 pair indicator
        j, p, q = (int(t) for t in parts[1:])
        return 1 if assigned.get(p) == j and assigned.get(q) == j else 0
    if head == "b":  # GC4: person has any positive workload at all
        j = int(parts[1])
        total = sum(
            s.workload_centi for s in instance.shifts if assigned.get(s.id) == j
        )
        return 1 if total > 0 else 0
    if head == "g":  # GC5 trigger
        return 1 if any(assigned.get(sid) in gc.staff for sid in gc.shifts1) else 0
    if head == "w":
        j, d = int(parts[1]), int(parts[2])
        return _worked(assigned, instance, gc.shifts, j, d)
    if head == "s":  # GC6 run start on day d >= 2
        j, d = int(parts[1]), int(parts[2])
        here = _worked(assigned, instance, gc.shifts, j, d)
        prev = _worked(assigned, instance, gc.shifts, j, d - 1)
        return 1 if here and not prev else 0
    if head == "r":  # GC7 maximal run of exactly this span
        j, d, length = int(parts[1]), int(parts[2]), int(parts[3])
        last = d + length - 1
        if any(
            not _worked(assigned, instance, gc.shifts, j, t)
            for t in range(d, last + 1)
        ):
            return 0
        if d > 1 and _worked(assigned, instance, gc.shifts, j, d - 1):
            return 0
        if last < instance.horizon_days and _worked(
            assigned, instance, gc.shifts, j, last + 1
        ):
            return 0
        return 1
    if head == "a":  # GC8 same-type-on-day indicator
        j, d = int(parts[1]), int(parts[2])
        k = int(parts[3][1:])
        types = sorted({instance.shift_by_id[sid].shift_type for sid in gc.shifts})
        stype = types[k]
        for sid in gc.shifts:
            shift = instance.shift_by_id[sid]
            if (
                shift.start_day == d
                and shift.shift_type == stype
                and assigned.get(sid) == j
            ):
                return 1
        return 0
    if head == "any":  # GC8 works-anything-on-day indicator
        j, d = int(parts[1]), int(parts[2])
        return _worked(assigned, instance, gc.shifts, j, d)
    raise AssertionError(f"unrecognized auxiliary key {key!r}")


def intended_valuation(model, instance, constraints, schedule):
    """name -> 0/1 for every binary, derived from the schedule alone."""
    assigned = dict(schedule.assignment)
    values = {}
    for (sid, pid), name in model.var_index.items():
        values[name] = 1 if assigned.get(sid) == pid else 0
    for (tag, key), name in model.aux_index.items():
        idx = int(tag[1:])
        gc = constraints[idx - 1]
        values[name] = _aux_value(gc.kind, gc, instance, assigned, key)
    return values


def violated_rows(model, instance, constraints, schedule):
    """Names of rows the intended valuation breaks (empty = all hold)."""
    values = intended_valuation(model, instance, constraints, schedule)
    bad = []
    for name, terms, sense, rhs in parse_rows(model.text):
        lhs = sum(coef * values[var] for coef, var in terms)
        ok = {"<=": lhs <= rhs, ">=": lhs >= rhs, "=": lhs == rhs}[sense]
        if not ok:
            bad.append(name)
    return bad
