"""Builders for the two benchmark rostering problems.

Problem A scales with a shift count and a staff count by cycling fixed
shift and staff templates. Problem B is a fixed hospital roster replicated
over a requested number of days; the numeric parameters its rule list
leaves open are pinned in data/problem_b_params.json.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .constraints import GcInstance, GcKind, frac
from .model import (
    OverlapAllowance,
    Person,
    RosterInstance,
    Shift,
    shifts_overlap,
)


@dataclass(frozen=True)
class ProblemASpec:
    num_shifts: int
    num_staff: int

    def __post_init__(self):
        if self.num_shifts < 1 or self.num_staff < 1:
            raise ValueError("problem A needs at least one shift and one person")


@dataclass(frozen=True)
class ProblemBSpec:
    num_days: int

    def __post_init__(self):
        if self.num_days < 1:
            raise ValueError("problem B needs at least one day")


# ---- Problem A templates ----
# six daily shifts: type, start minute, duration, centihour workload, quals
_A_SHIFT_ROWS = (
    ("D1", 6 * 60, 540, 900, ("N", "A")),
    ("D2", 6 * 60, 540, 900, ("N",)),
    ("E1", 14 * 60, 540, 900, ("N",)),
    ("E2", 14 * 60, 540, 900, ("N",)),
    ("N1", 22 * 60, 540, 900, ("N",)),
    ("N2", 22 * 60, 540, 900, ("N",)),
)
# four staff profiles: qualifications, desired centihour workload
_A_STAFF_ROWS = (
    (("N", "A"), 10000),
    (("N",), 10000),
    (("N",), 10000),
    (("N",), 5000),
)

_A_DAY_TYPES = ("D1", "D2")
_A_NIGHT_TYPES = ("N1", "N2")


def build_problem_a(spec, num_staff=None):
    """Instance plus its eleven-rule constraint list.

    Accepts a ProblemASpec or plain (num_shifts, num_staff) integers.
    Shift k takes template row (k-1) mod 6 on day ceil(k/6); staff cycle
    through the four profiles. No overlap allowances exist.
    """
    if not isinstance(spec, ProblemASpec):
        spec = ProblemASpec(int(spec), int(num_staff))
    horizon = (spec.num_shifts + 5) // 6
    shifts = []
    for k in range(1, spec.num_shifts + 1):
        stype, start, dur, load, quals = _A_SHIFT_ROWS[(k - 1) % 6]
        shifts.append(Shift(
            id=k, shift_type=stype, start_day=(k - 1) // 6 + 1,
            start_time=start, duration=dur, workload_centi=load,
            required_qualifications=frozenset(quals),
        ))
    personnel = []
    for j in range(1, spec.num_staff + 1):
        quals, desired = _A_STAFF_ROWS[(j - 1) % 4]
        personnel.append(Person(id=j, desired_centi=desired,
                                qualifications=frozenset(quals)))
    instance = RosterInstance(
        horizon_days=horizon,
        personnel=tuple(personnel),
        shifts=tuple(shifts),
        allowed_overlap=(),
    )
    return instance, _problem_a_constraints(instance)


def _problem_a_constraints(instance):
    staff = frozenset(p.id for p in instance.personnel)
    all_ids = frozenset(s.id for s in instance.shifts)
    horizon = instance.horizon_days
    vac_days = frozenset(s.id for s in instance.shifts if s.start_day in (3, 4, 5))
    first_two = frozenset(s.id for s in instance.shifts if s.start_day <= 2)
    day_types = frozenset(s.id for s in instance.shifts if s.shift_type in _A_DAY_TYPES)

    out = [
        # 1: every shift covered
        GcInstance(GcKind.GC1, staff=staff, shifts=all_ids, x=0, y=0, label="A1"),
        # 2: person 1 takes nothing on days 3-5 (vacation)
        GcInstance(GcKind.GC1, staff=frozenset({1}), shifts=vac_days,
                   x=len(vac_days), y=len(vac_days), label="A2"),
        # 3: only qualified assignments
        GcInstance(GcKind.GC2, staff=staff, shifts=all_ids, x=0, y=0, label="A3"),
        # 4: no double-booking on overlapping shifts
        GcInstance(GcKind.GC3, staff=staff, x=0, y=0, label="A4"),
        # 5: at least half of person 1's work is on D1/D2 shifts
        GcInstance(GcKind.GC4, staff=frozenset({1}), shifts=day_types,
                   u=Fraction(1, 2), v=Fraction(1), label="A5"),
        # 6: person 1 working the first two days bars persons 4 and 7 then
        GcInstance(GcKind.GC5, staff=frozenset({1}), shifts1=first_two,
                   staff2=frozenset({4, 7}) & staff, shifts2=first_two,
                   x=0, y=0, label="A6"),
    ]
    # 7: nobody takes both a day shift and a night shift on the same day
    for j in sorted(staff):
        for d in range(1, horizon + 1):
            day_ids = instance.shifts_by_day.get(d, ())
            s1 = frozenset(s.id for s in day_ids if s.shift_type in _A_DAY_TYPES)
            s2 = frozenset(s.id for s in day_ids if s.shift_type in _A_NIGHT_TYPES)
            out.append(GcInstance(GcKind.GC5, staff=frozenset({j}), shifts1=s1,
                                  staff2=frozenset({j}), shifts2=s2,
                                  x=0, y=0, label=f"A7_p{j}_d{d}"))
    out += [
        # 8: at most six working days in a row
        GcInstance(GcKind.GC6, staff=staff, shifts=all_ids, x=0, y=6, label="A8"),
        # 9: 4-6 day runs need three free days on both sides
        GcInstance(GcKind.GC7, staff=staff, shifts=all_ids, shifts1=all_ids,
                   shifts2=all_ids, x=4, y=6, n=3, m=3, label="A9"),
        # 10: consecutive working days keep the same shift type
        GcInstance(GcKind.GC8, staff=staff, shifts=all_ids, label="A10"),
        # 11: workloads within 30% of the expected share
        GcInstance(GcKind.GC9, staff=staff, shifts=all_ids,
                   v=Fraction(3, 10), label="A11"),
    ]
    return out


# ---- Problem B templates ----
# the 19 daily shifts: type, start minute, duration, centihour workload, quals
_B_SHIFT_TEMPLATE = tuple(
    [("NurseD", 6 * 60, 540, 900, ("N",))] * 5
    + [("NurseE", 14 * 60, 540, 900, ("N",))] * 4
    + [("NurseN", 22 * 60, 540, 700, ("N",))] * 2
    + [("DoctorD", 6 * 60, 600, 1000, ("D",))] * 2
    + [("DoctorE", 12 * 60, 600, 1000, ("D",))]
    + [("DoctorN", 19 * 60, 540, 700, ("D",))]
    + [("DoctorS1", 5 * 60, 540, 900, ("D", "S1"))]
    + [("DoctorS2", 5 * 60, 540, 900, ("D", "S2"))]
    + [("CNurseD", 6 * 60, 600, 1000, ("CN",))]
    + [("CNurseE", 16 * 60, 480, 800, ("CN",))]
)
# every second day, starting on day 1
_B_ADMIN_ROW = ("Admin", 8 * 60, 300, 500, ("A",))

# staff roster: id range, desired centihour workload, qualifications
_B_STAFF_ROWS = (
    (1, 3, 10000, ("N", "CN")),
    (4, 4, 10000, ("N", "A")),
    (5, 14, 10000, ("N",)),
    (15, 15, 7500, ("N",)),
    (16, 17, 5000, ("N",)),
    (18, 18, 10000, ("D", "S1", "S2")),
    (19, 20, 10000, ("D", "S1")),
    (21, 22, 10000, ("D", "S2")),
    (23, 23, 7500, ("D", "S2")),
    (24, 26, 10000, ("D",)),
    (27, 27, 5000, ("D",)),
    (28, 28, 10000, ("A",)),
)

# shift-type pairs whose overlap qualified staff may hold simultaneously
_B_ALLOWED_TYPE_PAIRS = frozenset({
    frozenset({"NurseD", "CNurseD"}),
    frozenset({"NurseE", "CNurseE"}),
    frozenset({"DoctorD", "DoctorS1"}),
    frozenset({"DoctorD", "DoctorS2"}),
    frozenset({"CNurseD", "Admin"}),
})

_B_STAFF_NOTE = ("staff table lists 28 members though the accompanying "
                 "description says 29; the 28 tabulated entries are generated")


def _load_b_params() -> dict:
    text = resources.files("rosterkit").joinpath("data/problem_b_params.json").read_text()
    return json.loads(text)


def build_problem_b(spec):
    """Fixed hospital roster over the requested number of days.

    19 shifts per day plus an Admin shift on every odd day; 28 staff;
    overlap allowances derived from the five permitted type pairs for all
    personnel qualified for both shifts. Accepts ProblemBSpec or an int.
    """
    if not isinstance(spec, ProblemBSpec):
        spec = ProblemBSpec(int(spec))
    shifts = []
    next_id = 1
    for d in range(1, spec.num_days + 1):
        rows = list(_B_SHIFT_TEMPLATE)
        if d % 2 == 1:
            rows.append(_B_ADMIN_ROW)
        for stype, start, dur, load, quals in rows:
            shifts.append(Shift(
                id=next_id, shift_type=stype, start_day=d, start_time=start,
                duration=dur, workload_centi=load,
                required_qualifications=frozenset(quals),
            ))
            next_id += 1
    personnel = []
    for lo, hi, desired, quals in _B_STAFF_ROWS:
        for j in range(lo, hi + 1):
            personnel.append(Person(id=j, desired_centi=desired,
                                    qualifications=frozenset(quals)))
    allowances = []
    for i, a in enumerate(shifts):
        for b in shifts[i + 1:]:
            if frozenset({a.shift_type, b.shift_type}) not in _B_ALLOWED_TYPE_PAIRS:
                continue
            if not shifts_overlap(a, b):
                continue
            need = a.required_qualifications | b.required_qualifications
            both = frozenset(p.id for p in personnel if need <= p.qualifications)
            allowances.append(OverlapAllowance(a.id, b.id, both))
    instance = RosterInstance(
        horizon_days=spec.num_days,
        personnel=tuple(personnel),
        shifts=tuple(shifts),
        allowed_overlap=tuple(allowances),
        metadata={"staff_note": _B_STAFF_NOTE},
    )
    return instance, _problem_b_constraints(instance, _load_b_params())


def _problem_b_constraints(instance, params):
    staff = frozenset(p.id for p in instance.personnel)
    all_ids = frozenset(s.id for s in instance.shifts)
    horizon = instance.horizon_days
    by_type: dict = {}
    for s in instance.shifts:
        by_type.setdefault(s.shift_type, set()).add(s.id)

    def of_types(names):
        out = set()
        for name in names:
            out |= by_type.get(name, set())
        return frozenset(out)

    out = []
    for row in params["rows"]:
        kind = GcKind(row["kind"])
        label = f"B{row['row']}"
        if kind in (GcKind.GC1, GcKind.GC2):
            out.append(GcInstance(kind, staff=staff, shifts=all_ids,
                                  x=row["x"], y=row["y"], label=label))
        elif kind is GcKind.GC3:
            out.append(GcInstance(kind, staff=staff, x=row["x"], y=row["y"],
                                  label=label))
        elif kind is GcKind.GC4:
            out.append(GcInstance(kind, staff=frozenset(row["staff"]),
                                  shifts=of_types(row["shift_types"]),
                                  u=frac(row["u"]), v=frac(row["v"]), label=label))
        elif kind is GcKind.GC5:
            trigger = set(row["trigger_types"])
            response = set(row["response_types"])
            offsets = row["response_days"]
            for j in sorted(staff):
                for d in range(1, horizon + 1):
                    day_ids = instance.shifts_by_day.get(d, ())
                    s1 = frozenset(s.id for s in day_ids if s.shift_type in trigger)
                    if not s1:
                        continue
                    span = [d + off for off in offsets if 1 <= d + off <= horizon]
                    s2 = frozenset(
                        s.id for t in span for s in instance.shifts_by_day.get(t, ())
                        if s.shift_type in response
                    )
                    out.append(GcInstance(kind, staff=frozenset({j}), shifts1=s1,
                                          staff2=frozenset({j}), shifts2=s2,
                                          x=row["x"], y=row["y"],
                                          label=f"{label}_p{j}_d{d}"))
        elif kind is GcKind.GC6:
            subset = of_types(row["shift_types"]) if "shift_types" in row else all_ids
            out.append(GcInstance(kind, staff=staff, shifts=subset,
                                  x=row["x"], y=row["y"], label=label))
        elif kind is GcKind.GC7:
            out.append(GcInstance(kind, staff=staff, shifts=all_ids,
                                  shifts1=all_ids, shifts2=all_ids,
                                  x=row["x"], y=row["y"], n=row["n"], m=row["m"],
                                  label=label))
        elif kind is GcKind.GC8:
            subset = all_ids - of_types(row.get("exclude_types", ()))
            out.append(GcInstance(kind, staff=staff, shifts=subset, label=label))
        elif kind is GcKind.GC9:
            group = frozenset(p.id for p in instance.personnel
                              if row["staff_qualification"] in p.qualifications)
            out.append(GcInstance(kind, staff=group,
                                  shifts=of_types(row["shift_types"]),
                                  v=frac(row["v"]), label=label))
        else:
            raise ValueError(f"unhandled row kind {row['kind']}")
    return out
