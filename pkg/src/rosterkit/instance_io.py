"""JSON serialization for instances, constraint lists and schedules.

Instance files use "HH:MM" start times and workloads in hours (numbers, or
decimal strings for non-integers). Constraint files are JSON arrays whose
staff/shift sets are either explicit id lists or filter objects resolved
against a given instance.
"""

from __future__ import annotations

import json
from pathlib import Path

from .constraints import GcInstance, GcKind, frac
from .model import (
    OverlapAllowance,
    Person,
    RosterInstance,
    Schedule,
    Shift,
    centi,
)


def format_hhmm(minutes: int) -> str:
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


def parse_hhmm(text: str) -> int:
    hh, mm = text.split(":")
    minutes = int(hh) * 60 + int(mm)
    if not 0 <= minutes < 1440:
        raise ValueError(f"time of day out of range: {text!r}")
    return minutes


def _workload_out(centi_value: int):
    """Hours as an int when whole, else as a short decimal string."""
    if centi_value % 100 == 0:
        return centi_value // 100
    if centi_value % 10 == 0:
        return f"{centi_value // 100}.{(centi_value // 10) % 10}"
    return f"{centi_value // 100}.{centi_value % 100:02d}"


# ---- Instances ----

def instance_to_dict(instance: RosterInstance) -> dict:
    doc = {
        "horizon_days": instance.horizon_days,
        "personnel": [
            {
                "id": p.id,
                "desired_workload": _workload_out(p.desired_centi),
                "qualifications": sorted(p.qualifications),
            }
            for p in instance.personnel
        ],
        "shifts": [
            {
                "id": s.id,
                "type": s.shift_type,
                "start_day": s.start_day,
                "start_time": format_hhmm(s.start_time),
                "duration_minutes": s.duration,
                "workload": _workload_out(s.workload_centi),
                "required_qualifications": sorted(s.required_qualifications),
            }
            for s in instance.shifts
        ],
        "allowed_overlap_pairs": [
            {
                "shift_a": a.shift_a,
                "shift_b": a.shift_b,
                "persons": sorted(a.persons),
            }
            for a in instance.allowed_overlap
        ],
    }
    if instance.metadata:
        doc["metadata"] = dict(instance.metadata)
    return doc


def instance_from_dict(doc: dict) -> RosterInstance:
    personnel = tuple(
        Person(
            id=int(p["id"]),
            desired_centi=centi(p["desired_workload"]),
            qualifications=frozenset(p.get("qualifications", ())),
        )
        for p in doc["personnel"]
    )
    shifts = tuple(
        Shift(
            id=int(s["id"]),
            shift_type=s["type"],
            start_day=int(s["start_day"]),
            start_time=parse_hhmm(s["start_time"]),
            duration=int(s["duration_minutes"]),
            workload_centi=centi(s.get("workload", 0)),
            required_qualifications=frozenset(s.get("required_qualifications", ())),
        )
        for s in doc["shifts"]
    )
    allowed = tuple(
        OverlapAllowance(
            shift_a=int(a["shift_a"]),
            shift_b=int(a["shift_b"]),
            persons=frozenset(int(j) for j in a.get("persons", ())),
        )
        for a in doc.get("allowed_overlap_pairs", ())
    )
    return RosterInstance(
        horizon_days=int(doc["horizon_days"]),
        personnel=personnel,
        shifts=shifts,
        allowed_overlap=allowed,
        metadata=doc.get("metadata", {}),
    )


def dump_instance(instance: RosterInstance, path) -> None:
    Path(path).write_text(dumps_instance(instance))


def dumps_instance(instance: RosterInstance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def load_instance(path) -> RosterInstance:
    return instance_from_dict(json.loads(Path(path).read_text()))


# ---- Constraint lists ----

_SET_FIELDS = ("staff", "staff2", "shifts", "shifts1", "shifts2")
_NAT_FIELDS = ("x", "y", "n", "m")
_FRAC_FIELDS = ("u", "v")


def _resolve_person_set(spec, instance: RosterInstance) -> frozenset:
    if isinstance(spec, list):
        return frozenset(int(j) for j in spec)
    if isinstance(spec, dict):
        ids = set(p.id for p in instance.personnel)
        if "by_qualification" in spec:
            wanted = set(spec["by_qualification"])
            ids &= {p.id for p in instance.personnel if wanted <= p.qualifications}
        unknown = set(spec) - {"by_qualification"}
        if unknown:
            raise ValueError(f"unsupported person filter keys: {sorted(unknown)}")
        return frozenset(ids)
    raise ValueError(f"person set must be an id list or a filter object: {spec!r}")


def _resolve_shift_set(spec, instance: RosterInstance) -> frozenset:
    if isinstance(spec, list):
        return frozenset(int(i) for i in spec)
    if isinstance(spec, dict):
        ids = set(s.id for s in instance.shifts)
        if "by_type" in spec:
            wanted = set(spec["by_type"])
            ids &= {s.id for s in instance.shifts if s.shift_type in wanted}
        if "by_start_day" in spec:
            days = set(int(d) for d in spec["by_start_day"])
            ids &= {s.id for s in instance.shifts if s.start_day in days}
        if "by_qualification" in spec:
            wanted = set(spec["by_qualification"])
            ids &= {s.id for s in instance.shifts if wanted <= s.required_qualifications}
        unknown = set(spec) - {"by_type", "by_start_day", "by_qualification"}
        if unknown:
            raise ValueError(f"unsupported shift filter keys: {sorted(unknown)}")
        return frozenset(ids)
    raise ValueError(f"shift set must be an id list or a filter object: {spec!r}")


def constraint_from_dict(doc: dict, instance: RosterInstance) -> GcInstance:
    kind = GcKind(doc["kind"])
    kwargs = {"kind": kind, "label": doc.get("label", "")}
    for name in _SET_FIELDS:
        if name in doc:
            resolver = _resolve_person_set if name.startswith("staff") else _resolve_shift_set
            kwargs[name] = resolver(doc[name], instance)
    for name in _NAT_FIELDS:
        if name in doc:
            kwargs[name] = int(doc[name])
    for name in _FRAC_FIELDS:
        if name in doc:
            kwargs[name] = frac(doc[name])
    return GcInstance(**kwargs)


def constraint_to_dict(gc: GcInstance) -> dict:
    doc = {"kind": gc.kind.value}
    if gc.label:
        doc["label"] = gc.label
    for name in _SET_FIELDS:
        val = getattr(gc, name)
        if val is not None:
            doc[name] = sorted(val)
    for name in _NAT_FIELDS:
        val = getattr(gc, name)
        if val is not None:
            doc[name] = val
    for name in _FRAC_FIELDS:
        val = getattr(gc, name)
        if val is not None:
            doc[name] = str(val) if val.denominator != 1 else val.numerator
    return doc


def constraints_from_list(docs, instance: RosterInstance) -> list:
    return [constraint_from_dict(d, instance) for d in docs]


def dump_constraints(constraints, path) -> None:
    Path(path).write_text(dumps_constraints(constraints))


def dumps_constraints(constraints) -> str:
    return json.dumps([constraint_to_dict(gc) for gc in constraints], indent=2) + "\n"


def load_constraints(path, instance: RosterInstance) -> list:
    return constraints_from_list(json.loads(Path(path).read_text()), instance)


# ---- Schedules ----

def schedule_to_dict(schedule: Schedule) -> dict:
    return {"assignment": {str(sid): pid for sid, pid in schedule.items()}}


def schedule_from_dict(doc: dict) -> Schedule:
    return Schedule({int(sid): int(pid) for sid, pid in doc["assignment"].items()})


def dump_schedule(schedule: Schedule, path) -> None:
    Path(path).write_text(json.dumps(schedule_to_dict(schedule), indent=2) + "\n")


def load_schedule(path) -> Schedule:
    return schedule_from_dict(json.loads(Path(path).read_text()))
