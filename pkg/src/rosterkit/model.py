"""Rostering domain objects: persons, shifts, instances, schedules.

Workloads are stored as integer hundredths of an hour (centihours) so that
all arithmetic downstream stays exact. Time is integer minutes since 00:00
of day 1; shift intervals are half-open, so shifts that abut do not overlap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from functools import cached_property
from typing import Iterable, Mapping, Optional

MINUTES_PER_DAY = 1440
CENTI = 100  # workload scale: 1 hour = 100 centihours


def centi(hours) -> int:
    """Convert a workload in hours (int, float, str or Decimal) to centihours.

    Raises ValueError if the value needs more than 2 decimal places.
    """
    if isinstance(hours, bool):
        raise ValueError("workload must be numeric, not bool")
    if isinstance(hours, int):
        return hours * CENTI
    try:
        d = Decimal(str(hours))
    except InvalidOperation:
        raise ValueError(f"not a decimal workload: {hours!r}") from None
    scaled = d * CENTI
    if scaled != scaled.to_integral_value():
        raise ValueError(f"workload {hours!r} is not representable in centihours")
    return int(scaled)


def hours(centi_value: int) -> float:
    """Centihours back to hours, for display and serialization."""
    return centi_value / CENTI


@dataclass(frozen=True)
class Person:
    """One staff member. desired_centi is the desired workload in centihours."""

    id: int
    desired_centi: int
    qualifications: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "qualifications", frozenset(self.qualifications))
        if self.desired_centi <= 0:
            raise ValueError(f"person {self.id}: desired workload must be > 0")


@dataclass(frozen=True)
class Shift:
    """One shift. start_time is minutes of day [0, 1440); duration in minutes."""

    id: int
    shift_type: str
    start_day: int
    start_time: int
    duration: int
    workload_centi: int = 0
    required_qualifications: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(
            self, "required_qualifications", frozenset(self.required_qualifications)
        )
        if not 0 <= self.start_time < MINUTES_PER_DAY:
            raise ValueError(f"shift {self.id}: start_time {self.start_time} out of range")
        if self.duration <= 0:
            raise ValueError(f"shift {self.id}: duration must be > 0")
        if self.workload_centi < 0:
            raise ValueError(f"shift {self.id}: workload must be >= 0")


@dataclass(frozen=True)
class OverlapAllowance:
    """Staff allowed to hold both shifts of one overlapping pair."""

    shift_a: int
    shift_b: int
    persons: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "persons", frozenset(self.persons))
        if self.shift_a == self.shift_b:
            raise ValueError(f"overlap pair ({self.shift_a}, {self.shift_b}) is degenerate")
        # canonical order so each unordered pair has one spelling
        if self.shift_a > self.shift_b:
            a, b = self.shift_b, self.shift_a
            object.__setattr__(self, "shift_a", a)
            object.__setattr__(self, "shift_b", b)

    @property
    def pair(self) -> tuple:
        return (self.shift_a, self.shift_b)


@dataclass(frozen=True)
class RosterInstance:
    """Full input to a solve: horizon, staff, shifts, overlap allowances."""

    horizon_days: int
    personnel: tuple
    shifts: tuple
    allowed_overlap: tuple = ()
    metadata: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "personnel", tuple(self.personnel))
        object.__setattr__(self, "shifts", tuple(self.shifts))
        object.__setattr__(self, "allowed_overlap", tuple(self.allowed_overlap))
        object.__setattr__(self, "metadata", dict(self.metadata))

    @cached_property
    def person_by_id(self) -> dict:
        return {p.id: p for p in self.personnel}

    @cached_property
    def shift_by_id(self) -> dict:
        return {s.id: s for s in self.shifts}

    @cached_property
    def allowed_by_pair(self) -> dict:
        return {a.pair: a.persons for a in self.allowed_overlap}

    def allowed_for(self, shift_a: int, shift_b: int) -> frozenset:
        """Persons allowed to hold both shifts of an overlapping pair."""
        key = (shift_a, shift_b) if shift_a < shift_b else (shift_b, shift_a)
        return self.allowed_by_pair.get(key, frozenset())

    @cached_property
    def shifts_by_day(self) -> dict:
        by_day: dict = {}
        for s in self.shifts:
            by_day.setdefault(s.start_day, []).append(s)
        return by_day


@dataclass(frozen=True)
class Schedule:
    """Assignment of at most one person per shift; unassigned shifts are absent."""

    assignment: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "assignment", dict(self.assignment))

    def person_for(self, shift_id: int) -> Optional[int]:
        return self.assignment.get(shift_id)

    def shifts_of(self, person_id: int) -> list:
        return sorted(i for i, j in self.assignment.items() if j == person_id)

    def items(self):
        return sorted(self.assignment.items())


# ---- Temporal structure ----

def absolute_interval(shift: Shift) -> tuple:
    """Half-open [start, end) interval in minutes since day-1 00:00."""
    start = (shift.start_day - 1) * MINUTES_PER_DAY + shift.start_time
    return (start, start + shift.duration)


def shifts_overlap(a: Shift, b: Shift) -> bool:
    """True iff the two shifts' time intervals intersect."""
    sa, ea = absolute_interval(a)
    sb, eb = absolute_interval(b)
    return sa < eb and sb < ea


def enumerate_overlap_pairs(instance: RosterInstance) -> set:
    """All unordered overlapping shift-id pairs, each as (low_id, high_id)."""
    pairs = set()
    shifts = instance.shifts
    for idx, a in enumerate(shifts):
        for b in shifts[idx + 1 :]:
            if shifts_overlap(a, b):
                lo, hi = sorted((a.id, b.id))
                pairs.add((lo, hi))
    return pairs


# ---- Qualification structure ----

def qualified_personnel(shift: Shift, instance: RosterInstance) -> frozenset:
    """Ids of persons whose qualifications cover the shift's requirements."""
    need = shift.required_qualifications
    return frozenset(p.id for p in instance.personnel if need <= p.qualifications)


# ---- Instance validation ----

def validate_instance(instance: RosterInstance) -> list:
    """Return a list of defect strings; empty iff the instance is well formed."""
    defects = []
    seen_pids = set()
    for p in instance.personnel:
        if p.id in seen_pids:
            defects.append(f"duplicate person id {p.id}")
        seen_pids.add(p.id)
    seen_sids = set()
    for s in instance.shifts:
        if s.id in seen_sids:
            defects.append(f"duplicate shift id {s.id}")
        seen_sids.add(s.id)
        if not 1 <= s.start_day <= instance.horizon_days:
            defects.append(
                f"shift {s.id}: start_day {s.start_day} outside horizon "
                f"[1, {instance.horizon_days}]"
            )
    seen_pairs = set()
    for allowance in instance.allowed_overlap:
        pair = allowance.pair
        if pair in seen_pairs:
            defects.append(f"overlap pair {pair} listed more than once")
        seen_pairs.add(pair)
        for sid in pair:
            if sid not in seen_sids:
                defects.append(f"overlap pair {pair} references unknown shift {sid}")
        if not all(sid in seen_sids for sid in pair):
            continue
        a = instance.shift_by_id[pair[0]]
        b = instance.shift_by_id[pair[1]]
        for pid in sorted(allowance.persons):
            if pid not in seen_pids:
                defects.append(f"overlap pair {pair} references unknown person {pid}")
                continue
            person = instance.person_by_id[pid]
            # allowed persons must be qualified for both shifts of the pair
            for s in (a, b):
                if not s.required_qualifications <= person.qualifications:
                    defects.append(
                        f"overlap pair {pair}: person {pid} not qualified for shift {s.id}"
                    )
    return defects


def validate_schedule(schedule: Schedule, instance: RosterInstance) -> list:
    """Defects of a schedule against an instance: unknown ids only.

    The one-person-per-shift rule is structural here (a mapping cannot hold
    two persons for one shift); backends that read solver models enforce it
    while parsing.
    """
    defects = []
    for sid, pid in schedule.items():
        if sid not in instance.shift_by_id:
            defects.append(f"schedule references unknown shift {sid}")
        if pid not in instance.person_by_id:
            defects.append(f"schedule references unknown person {pid}")
    return defects
