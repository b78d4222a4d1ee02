"""Straight-line reimplementation of the nine constraint semantics.

Deliberately written from the definitions, without reusing the package's
evaluator internals, so differential tests compare two independent
readings. Everything is recomputed from scratch on every call.
"""

from fractions import Fraction

from rosterkit.constraints import GcKind

DAY_MINUTES = 24 * 60


def _interval(shift):
    start = (shift.start_day - 1) * DAY_MINUTES + shift.start_time
    return start, start + shift.duration


def _overlapping_pairs(instance):
    pairs = []
    shifts = list(instance.shifts)
    for i in range(len(shifts)):
        for k in range(i + 1, len(shifts)):
            a0, a1 = _interval(shifts[i])
            b0, b1 = _interval(shifts[k])
            if a0 < b1 and b0 < a1:
                lo, hi = sorted((shifts[i].id, shifts[k].id))
                pairs.append((lo, hi))
    return pairs


def _allowed(instance, a, b):
    for allowance in instance.allowed_overlap:
        if {allowance.shift_a, allowance.shift_b} == {a, b}:
            return set(allowance.persons)
    return set()


def _is_qualified(person, shift):
    return set(shift.required_qualifications) <= set(person.qualifications)


def _workload(instance, schedule, person_id, shift_ids):
    total = 0
    for sid in shift_ids:
        if schedule.assignment.get(sid) == person_id:
            total += instance.shift_by_id[sid].workload_centi
    return total


def _worked_day_set(instance, schedule, person_id, shift_ids):
    return {instance.shift_by_id[sid].start_day
            for sid in shift_ids
            if schedule.assignment.get(sid) == person_id}


def _runs(days):
    """Maximal consecutive-day blocks as (first, last) pairs."""
    out = []
    for d in sorted(days):
        if d - 1 in days:
            continue
        end = d
        while end + 1 in days:
            end += 1
        out.append((d, end))
    return out


def check(gc, instance, schedule) -> bool:
    """True when the schedule satisfies the constraint."""
    assign = schedule.assignment
    if gc.kind is GcKind.GC1:
        count = 0
        for sid in gc.shifts:
            if assign.get(sid) not in gc.staff:
                count += 1
        return gc.x <= count <= gc.y

    if gc.kind is GcKind.GC2:
        count = 0
        for sid in gc.shifts:
            holder = assign.get(sid)
            if holder is None or holder not in gc.staff:
                continue
            if not _is_qualified(instance.person_by_id[holder],
                                 instance.shift_by_id[sid]):
                count += 1
        return gc.x <= count <= gc.y

    if gc.kind is GcKind.GC3:
        count = 0
        for a, b in _overlapping_pairs(instance):
            holder = assign.get(a)
            if holder is None or assign.get(b) != holder:
                continue
            if holder in gc.staff and holder not in _allowed(instance, a, b):
                count += 1
        return gc.x <= count <= gc.y

    if gc.kind is GcKind.GC4:
        every = [s.id for s in instance.shifts]
        for j in gc.staff:
            whole = _workload(instance, schedule, j, every)
            if whole == 0:
                continue
            part = _workload(instance, schedule, j, gc.shifts)
            ratio = Fraction(part, whole)
            if not (gc.u <= ratio <= gc.v):
                return False
        return True

    if gc.kind is GcKind.GC5:
        triggered = any(assign.get(sid) == j
                        for sid in gc.shifts1 for j in gc.staff)
        if not triggered:
            return True
        count = sum(1 for sid in gc.shifts2 for j in gc.staff2
                    if assign.get(sid) == j)
        return gc.x <= count <= gc.y

    if gc.kind is GcKind.GC6:
        for j in gc.staff:
            days = _worked_day_set(instance, schedule, j, gc.shifts)
            for first, last in _runs(days):
                length = last - first + 1
                if length > gc.y:
                    return False
                touches_edge = first == 1 or last == instance.horizon_days
                if length < gc.x and not touches_edge:
                    return False
        return True

    if gc.kind is GcKind.GC7:
        for j in gc.staff:
            days = _worked_day_set(instance, schedule, j, gc.shifts)
            for first, last in _runs(days):
                length = last - first + 1
                if not (gc.x <= length <= gc.y):
                    continue
                for sid in gc.shifts1:
                    day = instance.shift_by_id[sid].start_day
                    if first - gc.n <= day <= first - 1 and assign.get(sid) == j:
                        return False
                for sid in gc.shifts2:
                    day = instance.shift_by_id[sid].start_day
                    if last + 1 <= day <= last + gc.m and assign.get(sid) == j:
                        return False
        return True

    if gc.kind is GcKind.GC8:
        for j in gc.staff:
            mine = [instance.shift_by_id[sid] for sid in gc.shifts
                    if assign.get(sid) == j]
            days_held = {s.start_day for s in mine}
            for shift in mine:
                if shift.start_day == 1:
                    continue
                if shift.start_day - 1 not in days_held:
                    continue
                carried = any(other.start_day == shift.start_day - 1
                              and other.shift_type == shift.shift_type
                              for other in mine)
                if not carried:
                    return False
        return True

    if gc.kind is GcKind.GC9:
        denom = sum(instance.person_by_id[j].desired_centi for j in gc.staff)
        if denom == 0:
            return True
        total = sum(instance.shift_by_id[sid].workload_centi for sid in gc.shifts)
        expected = Fraction(total, denom)
        for j in gc.staff:
            desired = instance.person_by_id[j].desired_centi
            mine = Fraction(_workload(instance, schedule, j, gc.shifts))
            low = (1 - gc.v) * expected * desired
            high = (1 + gc.v) * expected * desired
            if not (low <= mine <= high):
                return False
        return True

    raise ValueError(f"unknown kind {gc.kind}")


def check_all(constraints, instance, schedule) -> bool:
    return all(check(gc, instance, schedule) for gc in constraints)
