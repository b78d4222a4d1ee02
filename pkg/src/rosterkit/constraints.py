"""Parameterized generic rostering constraints GC1-GC9 and their evaluator.

The evaluator is the semantic ground truth for every backend: it checks a
Schedule directly against the constraint definitions using exact rational
arithmetic (centihour integers and Fractions), with no tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from enum import Enum
from fractions import Fraction
from typing import Optional

from .model import (
    RosterInstance,
    Schedule,
    enumerate_overlap_pairs,
    qualified_personnel,
)


class GcKind(Enum):
    GC1 = "GC1"
    GC2 = "GC2"
    GC3 = "GC3"
    GC4 = "GC4"
    GC5 = "GC5"
    GC6 = "GC6"
    GC7 = "GC7"
    GC8 = "GC8"
    GC9 = "GC9"


class GcParameterError(ValueError):
    """A GcInstance is missing a field its kind requires, or holds a bad value."""


def frac(value) -> Fraction:
    """Exact Fraction from int, float, str, Decimal or Fraction.

    Floats go through their decimal literal (0.3 becomes 3/10, not the
    binary float), since all source data are short decimals.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)  # accepts "0.3" and "3/10" alike
        except (ValueError, ZeroDivisionError):
            raise GcParameterError(f"not a rational parameter: {value!r}") from None
    try:
        return Fraction(Decimal(str(value)))
    except (InvalidOperation, ValueError):
        raise GcParameterError(f"not a rational parameter: {value!r}") from None


# fields each kind must carry (sets may be empty but not absent)
_REQUIRED = {
    GcKind.GC1: ("staff", "shifts", "x", "y"),
    GcKind.GC2: ("staff", "shifts", "x", "y"),
    GcKind.GC3: ("staff", "x", "y"),
    GcKind.GC4: ("staff", "shifts", "u", "v"),
    GcKind.GC5: ("staff", "staff2", "shifts1", "shifts2", "x", "y"),
    GcKind.GC6: ("staff", "shifts", "x", "y"),
    GcKind.GC7: ("staff", "shifts", "shifts1", "shifts2", "x", "y", "n", "m"),
    GcKind.GC8: ("staff", "shifts"),
    GcKind.GC9: ("staff", "shifts", "v"),
}


@dataclass(frozen=True)
class GcInstance:
    """One instantiated generic constraint.

    staff/shifts sets are ids; x, y, n, m are naturals; u, v are rationals.
    Note that x > y is allowed and simply denotes an empty (unsatisfiable)
    count interval.
    """

    kind: GcKind
    staff: Optional[frozenset] = None
    staff2: Optional[frozenset] = None
    shifts: Optional[frozenset] = None
    shifts1: Optional[frozenset] = None
    shifts2: Optional[frozenset] = None
    x: Optional[int] = None
    y: Optional[int] = None
    u: Optional[Fraction] = None
    v: Optional[Fraction] = None
    n: Optional[int] = None
    m: Optional[int] = None
    label: str = ""

    def __post_init__(self):
        for name in ("staff", "staff2", "shifts", "shifts1", "shifts2"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, frozenset(val))
        for name in ("u", "v"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, frac(val))
        for name in _REQUIRED[self.kind]:
            if getattr(self, name) is None:
                raise GcParameterError(f"{self.kind.value} requires field '{name}'")
        for name in ("x", "y", "n", "m"):
            val = getattr(self, name)
            if val is not None and (not isinstance(val, int) or val < 0):
                raise GcParameterError(f"{self.kind.value}: {name} must be a natural, got {val!r}")
        if self.u is not None and self.v is not None and self.u > self.v:
            raise GcParameterError(f"{self.kind.value}: u={self.u} > v={self.v}")


@dataclass(frozen=True)
class Violation:
    """Evaluation result for one constraint (or the exclusivity rule)."""

    label: str
    kind: str
    satisfied: bool
    measure: int
    bounds: tuple
    witnesses: tuple = ()


@dataclass(frozen=True)
class ViolationReport:
    entries: tuple = ()

    @property
    def satisfied(self) -> bool:
        return all(e.satisfied for e in self.entries)

    def entry(self, label: str) -> Violation:
        for e in self.entries:
            if e.label == label:
                return e
        raise KeyError(label)

    def violated(self) -> list:
        return [e for e in self.entries if not e.satisfied]


# ---- Helpers ----

def worked_days(person_id: int, shift_set, schedule: Schedule, instance: RosterInstance) -> set:
    """Start days of shifts in shift_set that the schedule gives this person."""
    days = set()
    for sid in shift_set:
        if schedule.person_for(sid) == person_id:
            days.add(instance.shift_by_id[sid].start_day)
    return days


def _maximal_runs(days: set) -> list:
    """Maximal runs of consecutive days, as (first_day, last_day) pairs."""
    runs = []
    for d in sorted(days):
        if runs and d == runs[-1][1] + 1:
            runs[-1] = (runs[-1][0], d)
        else:
            runs.append((d, d))
    return runs


def _assigned_workload_centi(person_id: int, shift_ids, schedule: Schedule,
                             instance: RosterInstance) -> int:
    total = 0
    for sid in shift_ids:
        if schedule.person_for(sid) == person_id:
            total += instance.shift_by_id[sid].workload_centi
    return total


# ---- Per-kind evaluation ----

def _eval_gc1(gc, instance, schedule):
    witnesses = []
    for sid in sorted(gc.shifts):
        assigned = schedule.person_for(sid)
        if assigned is None or assigned not in gc.staff:
            witnesses.append((None, sid))
    measure = len(witnesses)
    return gc.x <= measure <= gc.y, measure, witnesses


def _eval_gc2(gc, instance, schedule):
    witnesses = []
    for sid in sorted(gc.shifts):
        assigned = schedule.person_for(sid)
        if assigned is None or assigned not in gc.staff:
            continue
        shift = instance.shift_by_id[sid]
        if assigned not in qualified_personnel(shift, instance):
            witnesses.append((assigned, sid))
    measure = len(witnesses)
    return gc.x <= measure <= gc.y, measure, witnesses


def _eval_gc3(gc, instance, schedule):
    witnesses = []
    pairs = sorted(enumerate_overlap_pairs(instance))
    for j in sorted(gc.staff):
        for (a, b) in pairs:
            if schedule.person_for(a) == j and schedule.person_for(b) == j:
                if j not in instance.allowed_for(a, b):
                    witnesses.append((j, (a, b)))
    measure = len(witnesses)
    return gc.x <= measure <= gc.y, measure, witnesses


def _eval_gc4(gc, instance, schedule):
    all_ids = [s.id for s in instance.shifts]
    witnesses = []
    for j in sorted(gc.staff):
        w_all = _assigned_workload_centi(j, all_ids, schedule, instance)
        if w_all == 0:
            continue  # vacuous: no assigned workload at all
        w_sub = _assigned_workload_centi(j, gc.shifts, schedule, instance)
        if not (gc.u * w_all <= w_sub and w_sub <= gc.v * w_all):
            witnesses.append((j, None))
    measure = len(witnesses)
    return measure == 0, measure, witnesses


def _eval_gc5(gc, instance, schedule):
    triggered = any(
        schedule.person_for(sid) == j
        for j in gc.staff
        for sid in gc.shifts1
    )
    if not triggered:
        return True, 0, []
    witnesses = [
        (j, sid)
        for j in sorted(gc.staff2)
        for sid in sorted(gc.shifts2)
        if schedule.person_for(sid) == j
    ]
    measure = len(witnesses)
    return gc.x <= measure <= gc.y, measure, witnesses


def _eval_gc6(gc, instance, schedule):
    horizon = instance.horizon_days
    witnesses = []
    for j in sorted(gc.staff):
        days = worked_days(j, gc.shifts, schedule, instance)
        for (first, last) in _maximal_runs(days):
            length = last - first + 1
            if length > gc.y:
                witnesses.append((j, first))
                continue
            # runs truncated by the horizon edge are exempt from the lower bound
            if first == 1 or last == horizon:
                continue
            if length < gc.x:
                witnesses.append((j, first))
    measure = len(witnesses)
    return measure == 0, measure, witnesses


def _eval_gc7(gc, instance, schedule):
    horizon = instance.horizon_days
    witnesses = []
    for j in sorted(gc.staff):
        days = worked_days(j, gc.shifts, schedule, instance)
        for (first, last) in _maximal_runs(days):
            length = last - first + 1
            if not gc.x <= length <= gc.y:
                continue
            before = set(range(max(1, first - gc.n), first))
            after = set(range(last + 1, min(horizon, last + gc.m) + 1))
            for sid in sorted(gc.shifts1):
                if schedule.person_for(sid) == j and \
                        instance.shift_by_id[sid].start_day in before:
                    witnesses.append((j, sid))
            for sid in sorted(gc.shifts2):
                if schedule.person_for(sid) == j and \
                        instance.shift_by_id[sid].start_day in after:
                    witnesses.append((j, sid))
    measure = len(witnesses)
    return measure == 0, measure, witnesses


def _eval_gc8(gc, instance, schedule):
    witnesses = []
    for j in sorted(gc.staff):
        mine = [instance.shift_by_id[sid] for sid in sorted(gc.shifts)
                if schedule.person_for(sid) == j]
        days_worked = {s.start_day for s in mine}
        types_by_day: dict = {}
        for s in mine:
            types_by_day.setdefault(s.start_day, set()).add(s.shift_type)
        for s in mine:
            d = s.start_day
            if d <= 1 or (d - 1) not in days_worked:
                continue  # day before is free, or no previous day exists
            if s.shift_type not in types_by_day.get(d - 1, set()):
                witnesses.append((j, s.id))
    measure = len(witnesses)
    return measure == 0, measure, witnesses


def _eval_gc9(gc, instance, schedule):
    total_shift = sum(instance.shift_by_id[sid].workload_centi for sid in gc.shifts)
    total_desired = sum(instance.person_by_id[j].desired_centi for j in gc.staff)
    if total_desired == 0:
        return True, 0, []  # no staff in scope, nothing to bound
    expected = Fraction(total_shift, total_desired)
    lo = (1 - gc.v) * expected
    hi = (1 + gc.v) * expected
    witnesses = []
    for j in sorted(gc.staff):
        w_sub = _assigned_workload_centi(j, gc.shifts, schedule, instance)
        ratio = Fraction(w_sub, instance.person_by_id[j].desired_centi)
        if not (lo <= ratio <= hi):
            witnesses.append((j, None))
    measure = len(witnesses)
    return measure == 0, measure, witnesses


_EVAL = {
    GcKind.GC1: _eval_gc1,
    GcKind.GC2: _eval_gc2,
    GcKind.GC3: _eval_gc3,
    GcKind.GC4: _eval_gc4,
    GcKind.GC5: _eval_gc5,
    GcKind.GC6: _eval_gc6,
    GcKind.GC7: _eval_gc7,
    GcKind.GC8: _eval_gc8,
    GcKind.GC9: _eval_gc9,
}

# kinds whose measure is a bounded count; the rest count violating checks
COUNTING_KINDS = {GcKind.GC1, GcKind.GC2, GcKind.GC3, GcKind.GC5}


def eval_gc(gc: GcInstance, instance: RosterInstance, schedule: Schedule):
    """Evaluate one constraint; returns (satisfied, measure, witnesses).

    For counting kinds (GC1/GC2/GC3/GC5) the measure is the counted quantity
    and witnesses are all contributing items. For per-person kinds the
    measure is the number of failed checks and witnesses list only failures.
    """
    satisfied, measure, witnesses = _EVAL[gc.kind](gc, instance, schedule)
    return satisfied, measure, tuple(witnesses)


def eval_all(constraints, instance: RosterInstance, schedule: Schedule) -> ViolationReport:
    """Evaluate a constraint list plus the implicit shift-exclusivity rule."""
    entries = []
    bad_refs = [
        (pid, sid) for sid, pid in schedule.items()
        if sid not in instance.shift_by_id or pid not in instance.person_by_id
    ]
    entries.append(Violation(
        label="exclusivity",
        kind="builtin",
        satisfied=not bad_refs,
        measure=len(bad_refs),
        bounds=(0, 0),
        witnesses=tuple(bad_refs),
    ))
    for idx, gc in enumerate(constraints, start=1):
        satisfied, measure, witnesses = eval_gc(gc, instance, schedule)
        if gc.kind in COUNTING_KINDS:
            bounds = (gc.x, gc.y)
        else:
            bounds = (0, 0)
        entries.append(Violation(
            label=gc.label or f"c{idx}",
            kind=gc.kind.value,
            satisfied=satisfied,
            measure=measure,
            bounds=bounds,
            witnesses=witnesses,
        ))
    return ViolationReport(entries=tuple(entries))
