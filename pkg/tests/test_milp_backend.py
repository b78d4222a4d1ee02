"""LP emission, solution parsing, and MILP solver invocation tests."""

import random
import sys
import textwrap
from fractions import Fraction

import pytest

import lp_check
from rosterkit.bench import fuzz_instance
from rosterkit.constraints import GcInstance, GcKind, eval_all
from rosterkit.exact_solver import SearchBudget, dfs_feasible
from rosterkit.generators import ProblemASpec, build_problem_a
from rosterkit.milp_backend import (
    LpModel,
    emit_lp,
    model_path,
    parse_solution,
    run_milp,
    solve_milp,
)
from rosterkit.model import Person, RosterInstance, Schedule, Shift
from rosterkit.smt_backend import EncodingContractError
from rosterkit.solve import Backend, SolverConfig, Verdict


def mk_shift(sid, day, start, dur, stype="S", quals=(), workload=0):
    return Shift(
        id=sid,
        shift_type=stype,
        start_day=day,
        start_time=start,
        duration=dur,
        workload_centi=workload,
        required_qualifications=frozenset(quals),
    )


def mk_person(pid, quals=(), desired=100):
    return Person(id=pid, desired_centi=desired, qualifications=frozenset(quals))


def _inst(shifts, persons):
    return RosterInstance(
        horizon_days=max((s.start_day for s in shifts), default=1),
        personnel=tuple(persons),
        shifts=tuple(shifts),
    )


def shim_config(tmp_path, timeout=20.0):
    command = (
        sys.executable,
        "-m",
        "rosterkit.shims.milp_cli",
        "--timeout",
        "{timeout}",
        "--solution",
        "{solution}",
        "{file}",
    )
    return SolverConfig(command=command, timeout=timeout, workdir=str(tmp_path / "milp"))


def rows_by_name(text):
    return {name: (terms, sense, rhs) for name, terms, sense, rhs in lp_check.parse_rows(text)}


# ---- Emission structure ----


def test_uncovered_shift_indicator_rows():
    # one shift, staff of three: big-M is 3 and z_1 flags the uncovered case
    inst = _inst([mk_shift(1, 1, 480, 480)], [mk_person(j) for j in (1, 2, 3)])
    gc = GcInstance(GcKind.GC1, staff={1, 2, 3}, shifts={1}, x=0, y=0)
    model = emit_lp(inst, [gc])
    assert model.aux_index[("c1", "z_1")] == "c1_z_1"
    assert " c1_cov_lo_1: x_1_1 + x_1_2 + x_1_3 + c1_z_1 >= 1" in model.text
    assert " c1_cov_hi_1: x_1_1 + x_1_2 + x_1_3 + 3 c1_z_1 <= 3" in model.text
    rows = rows_by_name(model.text)
    assert rows["c1_cnt_lo"] == ([(1, "c1_z_1")], ">=", 0)
    assert rows["c1_cnt_hi"] == ([(1, "c1_z_1")], "<=", 0)


def test_double_assignment_pair_rows():
    # 2 z <= x_a + x_b and x_a + x_b <= z + 1 for the one disallowed pair
    shifts = [mk_shift(1, 1, 480, 480), mk_shift(2, 1, 600, 480)]
    inst = _inst(shifts, [mk_person(1)])
    gc = GcInstance(GcKind.GC3, staff={1}, x=0, y=0)
    model = emit_lp(inst, [gc])
    assert " c1_pair_lo_1_1_2: x_1_1 + x_2_1 - 2 c1_z_1_1_2 >= 0" in model.text
    assert " c1_pair_hi_1_1_2: x_1_1 + x_2_1 - c1_z_1_1_2 <= 1" in model.text
    rows = rows_by_name(model.text)
    assert rows["c1_cnt_hi"] == ([(1, "c1_z_1_1_2")], "<=", 0)


def test_no_constraints_emits_only_exclusivity_rows():
    inst = _inst([mk_shift(1, 1, 480, 480), mk_shift(2, 1, 1200, 480)], [mk_person(1)])
    model = emit_lp(inst, [])
    rows = lp_check.parse_rows(model.text)
    assert [name for name, *_ in rows] == ["one_1", "one_2"]
    assert rows[0][1:] == ([(1, "x_1_1")], "<=", 1)
    assert model.aux_index == {}


def test_workload_balance_rows_are_gcd_reduced():
    # 9h shift, desired 100h, tolerance 3/10: rows reduce to 10x in [7, 13]
    inst = _inst([mk_shift(1, 1, 480, 540, workload=900)], [mk_person(1, desired=10000)])
    gc = GcInstance(GcKind.GC9, staff={1}, shifts={1}, v=Fraction(3, 10))
    model = emit_lp(inst, [gc])
    rows = rows_by_name(model.text)
    assert rows["c1_wl_lo_1"] == ([(10, "x_1_1")], ">=", 7)
    assert rows["c1_wl_hi_1"] == ([(10, "x_1_1")], "<=", 13)


def test_section_order_and_binary_block():
    inst, cons = build_problem_a(ProblemASpec(num_shifts=6, num_staff=4))
    model = emit_lp(inst, cons)
    lines = model.text.splitlines()
    assert lines[0] == "Minimize"
    assert lines[1] == " obj: 0 x_1_1"
    assert lines[2] == "Subject To"
    bounds_at = lines.index("Bounds")
    binary_at = lines.index("Binary")
    assert bounds_at < binary_at < lines.index("End") == len(lines) - 1
    declared = {line.strip() for line in lines[binary_at + 1 : -1]}
    assert set(model.var_index.values()) <= declared
    assert set(model.aux_index.values()) <= declared
    assert model.text.endswith("End\n")


def test_emission_is_deterministic():
    inst, cons = build_problem_a(ProblemASpec(num_shifts=12, num_staff=4))
    first = emit_lp(inst, cons)
    for _ in range(9):
        again = emit_lp(inst, cons)
        assert again.text == first.text
        assert again.var_index == first.var_index
        assert again.aux_index == first.aux_index


# ---- Solution parsing ----

VARS = {(1, 1): "x_1_1", (1, 2): "x_1_2", (2, 1): "x_2_1"}


def test_parse_solution_reads_assignments():
    sched = parse_solution("x_1_2 1.0\nx_2_1 0.0\n", VARS)
    assert sched.assignment == {1: 2}


def test_parse_solution_absent_variables_count_as_zero():
    assert parse_solution("", VARS).assignment == {}


def test_parse_solution_tolerates_near_integral_values():
    sched = parse_solution("x_1_1 0.9999999\nx_2_1 0.0000004\n", VARS)
    assert sched.assignment == {1: 1}


def test_parse_solution_skips_comments_and_junk():
    raw = "# Objective value = 0\n\nnoise\nx_9 1 extra\nx_2_1 not_a_number\nx_1_1 1\n"
    assert parse_solution(raw, VARS).assignment == {1: 1}


def test_parse_solution_rejects_fractional_values():
    with pytest.raises(EncodingContractError):
        parse_solution("x_1_1 0.4\n", VARS)


def test_parse_solution_rejects_double_assignment():
    with pytest.raises(EncodingContractError):
        parse_solution("x_1_1 1\nx_1_2 1\n", VARS)


# ---- Solver invocation keyword mapping ----

FAKE_SOLVER = textwrap.dedent(
    """\
    import pathlib
    import sys
    import time

    mode, sol = sys.argv[1], sys.argv[2]
    if mode == "sleep":
        time.sleep(30)
        sys.exit(0)
    if mode in ("optimal", "timelimit-sol"):
        pathlib.Path(sol).write_text("# Objective value = 0\\nx_1_1 1.0\\n")
    if mode == "fractional":
        pathlib.Path(sol).write_text("x_1_1 0.5\\n")
    print({
        "optimal": "Optimal solution found",
        "optimal-nosol": "Optimal solution found",
        "fractional": "Optimal solution found",
        "infeasible": "Model is infeasible",
        "timelimit-sol": "Time limit reached",
        "timelimit-nosol": "Time limit reached",
        "garbage": "exit without diagnosis",
    }[mode])
    """
)


def fake_config(tmp_path, mode, timeout=10.0):
    script = tmp_path / "fake_solver.py"
    script.write_text(FAKE_SOLVER)
    command = (sys.executable, str(script), mode, "{solution}", "{file}")
    return SolverConfig(command=command, timeout=timeout, workdir=str(tmp_path / "work"))


@pytest.fixture
def one_var_model():
    inst = _inst([mk_shift(1, 1, 480, 480)], [mk_person(1)])
    return emit_lp(inst, [])


def test_optimal_with_solution_is_feasible(tmp_path, one_var_model):
    out = run_milp(one_var_model, fake_config(tmp_path, "optimal"))
    assert out.verdict is Verdict.FEASIBLE
    assert out.backend is Backend.MILP
    assert out.schedule.assignment == {1: 1}
    assert "Optimal" in out.raw_log


def test_infeasible_phrase_wins_over_feasible_substring(tmp_path, one_var_model):
    # "infeasible" contains "feasible"; the verdict must still be INFEASIBLE
    out = run_milp(one_var_model, fake_config(tmp_path, "infeasible"))
    assert out.verdict is Verdict.INFEASIBLE
    assert out.schedule is None


def test_time_limit_without_solution_is_timeout(tmp_path, one_var_model):
    out = run_milp(one_var_model, fake_config(tmp_path, "timelimit-nosol"))
    assert out.verdict is Verdict.TIMEOUT


def test_time_limit_with_incumbent_is_feasible(tmp_path, one_var_model):
    out = run_milp(one_var_model, fake_config(tmp_path, "timelimit-sol"))
    assert out.verdict is Verdict.FEASIBLE
    assert out.schedule.assignment == {1: 1}


def test_unrecognized_output_is_solver_error(tmp_path, one_var_model):
    out = run_milp(one_var_model, fake_config(tmp_path, "garbage"))
    assert out.verdict is Verdict.SOLVER_ERROR
    assert "diagnosis" in out.raw_log


def test_solved_claim_without_solution_file_is_solver_error(tmp_path, one_var_model):
    out = run_milp(one_var_model, fake_config(tmp_path, "optimal-nosol"))
    assert out.verdict is Verdict.SOLVER_ERROR


def test_fractional_solution_file_is_solver_error(tmp_path, one_var_model):
    out = run_milp(one_var_model, fake_config(tmp_path, "fractional"))
    assert out.verdict is Verdict.SOLVER_ERROR


def test_overrunning_solver_is_killed_and_times_out(tmp_path, one_var_model):
    out = run_milp(one_var_model, fake_config(tmp_path, "sleep", timeout=0.3))
    assert out.verdict is Verdict.TIMEOUT
    assert out.wall_time < 10


def test_stale_solution_file_is_ignored(tmp_path, one_var_model):
    config = fake_config(tmp_path, "timelimit-nosol")
    workdir = tmp_path / "work"
    workdir.mkdir()
    stale = model_path(one_var_model, workdir).with_suffix(".sol")
    stale.write_text("x_1_1 1.0\n")
    out = run_milp(one_var_model, config)
    assert out.verdict is Verdict.TIMEOUT
    assert not stale.exists()


def test_model_file_is_content_addressed(tmp_path, one_var_model):
    config = fake_config(tmp_path, "optimal")
    run_milp(one_var_model, config)
    path = model_path(one_var_model, tmp_path / "work")
    assert path.name.startswith("roster_") and path.suffix == ".lp"
    assert len(path.stem) == len("roster_") + 16
    assert path.read_text() == one_var_model.text
    other = emit_lp(
        _inst([mk_shift(1, 1, 480, 480), mk_shift(2, 2, 480, 480)], [mk_person(1)]), []
    )
    assert model_path(other, tmp_path / "work") != path


# ---- End to end against the bundled solver ----


def test_contradictory_rows_solve_infeasible(tmp_path):
    text = (
        "Minimize\n obj: 0 x_1_1\nSubject To\n a: x_1_1 >= 1\n b: x_1_1 <= 0\n"
        "Bounds\nBinary\n x_1_1\nEnd\n"
    )
    model = LpModel(text=text, var_index={(1, 1): "x_1_1"}, aux_index={})
    out = run_milp(model, shim_config(tmp_path))
    assert out.verdict is Verdict.INFEASIBLE


def test_forced_assignment_solves_feasible(tmp_path):
    inst = _inst([mk_shift(1, 1, 480, 480)], [mk_person(1), mk_person(2)])
    cover = GcInstance(GcKind.GC1, staff={1, 2}, shifts={1}, x=0, y=0)
    out = solve_milp(inst, [cover], shim_config(tmp_path))
    assert out.verdict is Verdict.FEASIBLE
    assert out.schedule.assignment[1] in (1, 2)


def test_generated_roster_solution_passes_evaluator(tmp_path):
    inst, cons = build_problem_a(ProblemASpec(num_shifts=6, num_staff=4))
    cons = cons[:4]
    out = solve_milp(inst, cons, shim_config(tmp_path))
    assert out.verdict is Verdict.FEASIBLE
    report = eval_all(cons, inst, out.schedule)
    assert report.satisfied
    assert lp_check.violated_rows(emit_lp(inst, cons), inst, cons, out.schedule) == []


def test_fuzzed_verdicts_match_exact_oracle(tmp_path):
    budget = SearchBudget(max_nodes=500_000, max_seconds=30.0)
    agreed = 0
    for seed in range(6):
        inst, cons = fuzz_instance(seed)
        want = dfs_feasible(inst, cons, budget)
        got = solve_milp(inst, cons, shim_config(tmp_path))
        assert got.verdict is want.verdict, f"seed {seed}"
        if got.verdict is Verdict.FEASIBLE:
            assert eval_all(cons, inst, got.schedule).satisfied
        agreed += 1
    assert agreed == 6


# ---- Row-level fidelity of the encoding ----


def _random_schedule(instance, rng):
    pool = [p.id for p in instance.personnel] + [None]
    picks = {s.id: rng.choice(pool) for s in instance.shifts}
    return Schedule({sid: pid for sid, pid in picks.items() if pid is not None})


def test_rows_hold_exactly_for_satisfying_schedules():
    # the intended valuation satisfies every row iff the roster satisfies
    # every constraint, across fuzzed instances and random schedules
    satisfied_seen = violated_seen = 0
    for seed in range(40):
        inst, cons = fuzz_instance(seed)
        model = emit_lp(inst, cons)
        rng = random.Random(seed * 59 + 1)
        for _ in range(6):
            sched = _random_schedule(inst, rng)
            bad = lp_check.violated_rows(model, inst, cons, sched)
            if eval_all(cons, inst, sched).satisfied:
                satisfied_seen += 1
                assert bad == [], f"seed {seed}: rows {bad} broken by a good roster"
            else:
                violated_seen += 1
                assert bad, f"seed {seed}: bad roster passes every row"
    assert satisfied_seen >= 20
    assert violated_seen >= 20


def test_rows_hold_for_oracle_schedule_on_generated_roster():
    inst, cons = build_problem_a(ProblemASpec(num_shifts=6, num_staff=4))
    out = dfs_feasible(inst, cons[:4], SearchBudget(max_nodes=2_000_000, max_seconds=30.0))
    assert out.verdict is Verdict.FEASIBLE
    model = emit_lp(inst, cons[:4])
    assert lp_check.violated_rows(model, inst, cons[:4], out.schedule) == []
