"""Serialization tests: JSON round-trips, time strings, set filters."""

from fractions import Fraction

import pytest

from rosterkit.constraints import GcInstance, GcKind
from rosterkit.generators import build_problem_a, build_problem_b
from rosterkit.instance_io import (
    constraint_from_dict,
    constraint_to_dict,
    constraints_from_list,
    dump_constraints,
    dump_instance,
    dump_schedule,
    format_hhmm,
    instance_from_dict,
    instance_to_dict,
    load_constraints,
    load_instance,
    load_schedule,
    parse_hhmm,
    schedule_from_dict,
    schedule_to_dict,
)
from rosterkit.model import OverlapAllowance, Person, RosterInstance, Schedule, Shift


# ---- HH:MM ----

def test_hhmm_formats():
    assert format_hhmm(0) == "00:00"
    assert format_hhmm(360) == "06:00"
    assert format_hhmm(1439) == "23:59"


def test_hhmm_parses():
    assert parse_hhmm("00:00") == 0
    assert parse_hhmm("06:00") == 360
    assert parse_hhmm("23:59") == 1439


def test_hhmm_rejects_out_of_range():
    with pytest.raises(ValueError):
        parse_hhmm("24:00")
    with pytest.raises(ValueError):
        parse_hhmm("junk")


# ---- instances ----

def _sample_instance():
    return RosterInstance(
        horizon_days=2,
        personnel=(
            Person(id=1, desired_centi=10000, qualifications=frozenset({"N", "A"})),
            Person(id=2, desired_centi=7550, qualifications=frozenset({"N"})),
        ),
        shifts=(
            Shift(id=1, shift_type="D", start_day=1, start_time=360, duration=540,
                  workload_centi=900, required_qualifications=frozenset({"N"})),
            Shift(id=2, shift_type="E", start_day=1, start_time=840, duration=540,
                  workload_centi=750, required_qualifications=frozenset({"N"})),
            Shift(id=3, shift_type="D", start_day=2, start_time=360, duration=540,
                  workload_centi=625, required_qualifications=frozenset()),
        ),
        allowed_overlap=(OverlapAllowance(1, 2, frozenset({1})),),
    )


def test_instance_round_trip_equality():
    inst = _sample_instance()
    assert instance_from_dict(instance_to_dict(inst)) == inst


def test_workload_serial_forms():
    doc = instance_to_dict(_sample_instance())
    by_id = {s["id"]: s for s in doc["shifts"]}
    assert by_id[1]["workload"] == 9  # whole hours stay numeric
    assert by_id[2]["workload"] == "7.5"  # tenths as short decimal string
    assert by_id[3]["workload"] == "6.25"  # hundredths keep two places
    assert doc["personnel"][1]["desired_workload"] == "75.5"


def test_workload_parse_accepts_numbers_and_strings():
    doc = instance_to_dict(_sample_instance())
    doc["shifts"][0]["workload"] = 9.0
    doc["personnel"][0]["desired_workload"] = "100"
    inst = instance_from_dict(doc)
    assert inst.shift_by_id[1].workload_centi == 900
    assert inst.person_by_id[1].desired_centi == 10000


def test_instance_times_serialize_as_hhmm():
    doc = instance_to_dict(_sample_instance())
    assert doc["shifts"][0]["start_time"] == "06:00"
    assert doc["shifts"][1]["start_time"] == "14:00"


def test_extra_keys_are_tolerated():
    doc = instance_to_dict(_sample_instance())
    doc["generator"] = "kept elsewhere"
    doc["shifts"][0]["note"] = "ignored"
    inst = instance_from_dict(doc)
    assert inst.horizon_days == 2


def test_optional_fields_default():
    doc = {
        "horizon_days": 1,
        "personnel": [{"id": 1, "desired_workload": 10}],
        "shifts": [{"id": 1, "type": "D", "start_day": 1, "start_time": "06:00",
                    "duration_minutes": 60}],
    }
    inst = instance_from_dict(doc)
    assert inst.personnel[0].qualifications == frozenset()
    assert inst.shifts[0].workload_centi == 0
    assert inst.allowed_overlap == ()


def test_instance_file_round_trip(tmp_path):
    inst = _sample_instance()
    path = tmp_path / "roster.json"
    dump_instance(inst, path)
    assert load_instance(path) == inst


def test_generated_instances_round_trip():
    for inst in (build_problem_a(12, 4)[0], build_problem_b(1)[0]):
        assert instance_from_dict(instance_to_dict(inst)) == inst


# ---- constraints ----

def test_constraint_round_trip_with_fractions():
    inst = _sample_instance()
    gc = GcInstance(GcKind.GC4, staff=frozenset({1, 2}), shifts=frozenset({1, 3}),
                    u="1/2", v="0.75", label="half-days")
    doc = constraint_to_dict(gc)
    assert doc["u"] == "1/2" and doc["v"] == "3/4"
    assert constraint_from_dict(doc, inst) == gc


def test_constraint_integral_fraction_stays_numeric():
    gc = GcInstance(GcKind.GC9, staff=frozenset({1}), shifts=frozenset({1}), v=1)
    assert constraint_to_dict(gc)["v"] == 1


def test_constraint_accepts_decimal_strings():
    inst = _sample_instance()
    doc = {"kind": "GC9", "staff": [1, 2], "shifts": [1, 2, 3], "v": "0.3"}
    gc = constraint_from_dict(doc, inst)
    assert gc.v == Fraction(3, 10)


def test_shift_filters_conjoin():
    inst = _sample_instance()
    doc = {
        "kind": "GC1",
        "staff": [1],
        "shifts": {"by_type": ["D"], "by_start_day": [1]},
        "x": 0, "y": 0,
    }
    gc = constraint_from_dict(doc, inst)
    assert gc.shifts == frozenset({1})  # D-typed AND day-1


def test_shift_filter_by_qualification():
    inst = _sample_instance()
    doc = {"kind": "GC1", "staff": [1], "shifts": {"by_qualification": ["N"]},
           "x": 0, "y": 3}
    assert constraint_from_dict(doc, inst).shifts == frozenset({1, 2})


def test_person_filter_by_qualification():
    inst = _sample_instance()
    doc = {"kind": "GC1", "staff": {"by_qualification": ["N", "A"]},
           "shifts": [1], "x": 0, "y": 1}
    assert constraint_from_dict(doc, inst).staff == frozenset({1})


def test_empty_filter_object_selects_everything():
    inst = _sample_instance()
    doc = {"kind": "GC1", "staff": {}, "shifts": {}, "x": 0, "y": 3}
    gc = constraint_from_dict(doc, inst)
    assert gc.staff == frozenset({1, 2})
    assert gc.shifts == frozenset({1, 2, 3})


def test_unknown_filter_keys_raise():
    inst = _sample_instance()
    with pytest.raises(ValueError, match="by_weekday"):
        constraint_from_dict(
            {"kind": "GC1", "staff": [1], "shifts": {"by_weekday": [1]},
             "x": 0, "y": 0}, inst)
    with pytest.raises(ValueError, match="by_type"):
        constraint_from_dict(
            {"kind": "GC1", "staff": {"by_type": ["D"]}, "shifts": [1],
             "x": 0, "y": 0}, inst)


def test_constraint_file_round_trip(tmp_path):
    inst, cons = build_problem_a(12, 4)
    path = tmp_path / "constraints.json"
    dump_constraints(cons, path)
    assert load_constraints(path, inst) == cons


def test_problem_b_constraints_round_trip(tmp_path):
    inst, cons = build_problem_b(2)
    path = tmp_path / "constraints.json"
    dump_constraints(cons, path)
    assert load_constraints(path, inst) == cons


def test_constraints_from_list_preserves_order():
    inst = _sample_instance()
    docs = [
        {"kind": "GC1", "staff": [1], "shifts": [1], "x": 0, "y": 0, "label": "one"},
        {"kind": "GC8", "staff": [1, 2], "shifts": [1, 2, 3], "label": "two"},
    ]
    cons = constraints_from_list(docs, inst)
    assert [gc.label for gc in cons] == ["one", "two"]
    assert cons[1].kind is GcKind.GC8


# ---- schedules ----

def test_schedule_round_trip(tmp_path):
    sched = Schedule({1: 2, 3: 1})
    assert schedule_from_dict(schedule_to_dict(sched)) == sched
    path = tmp_path / "schedule.json"
    dump_schedule(sched, path)
    assert load_schedule(path) == sched


def test_schedule_keys_serialize_as_strings():
    doc = schedule_to_dict(Schedule({2: 1, 1: 2}))
    assert doc == {"assignment": {"1": 2, "2": 1}}
