"""Command-line interface: generate, solve, validate, benchmark, plot."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import bench as bench_mod
from . import instance_io
from .constraints import eval_all
from .exact_solver import SearchBudget, dfs_feasible
from .milp_backend import solve_milp
from .generators import build_problem_a, build_problem_b
from .smt_backend import solve_smt
from .solve import Verdict, default_milp_config, default_smt_config


def _parse_range(text: str) -> tuple:
    """'6..36:6' -> (6, 12, ..., 36); '6..10' steps by 1; '7' -> (7,)."""
    if ".." not in text:
        return (int(text),)
    lo_part, _, rest = text.partition("..")
    hi_part, _, step_part = rest.partition(":")
    lo, hi = int(lo_part), int(hi_part)
    step = int(step_part) if step_part else 1
    if step < 1 or hi < lo:
        raise click.BadParameter(f"bad range: {text!r}")
    return tuple(range(lo, hi + 1, step))


def _write_pair(instance, constraints, out_dir: str, stem: str):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    inst_path = out / f"{stem}_instance.json"
    gc_path = out / f"{stem}_constraints.json"
    instance_io.dump_instance(instance, inst_path)
    instance_io.dump_constraints(constraints, gc_path)
    click.echo(f"wrote {inst_path}")
    click.echo(f"wrote {gc_path}")


@click.group()
def main():
    """Roster modeling, solving and benchmarking."""


@main.command("gen-a")
@click.option("--shifts", type=int, required=True)
@click.option("--staff", type=int, required=True)
@click.option("--out", "out_dir", default=".", show_default=True)
def gen_a(shifts, staff, out_dir):
    """Write the scaled benchmark instance and its constraint list."""
    instance, constraints = build_problem_a(shifts, staff)
    _write_pair(instance, constraints, out_dir, "problem_a")


@main.command("gen-b")
@click.option("--days", type=int, required=True)
@click.option("--out", "out_dir", default=".", show_default=True)
def gen_b(days, out_dir):
    """Write the fixed hospital instance and its constraint list."""
    instance, constraints = build_problem_b(days)
    _write_pair(instance, constraints, out_dir, "problem_b")


@main.command()
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--constraints", "constraints_path", required=True, type=click.Path(exists=True))
@click.option("--backend", type=click.Choice(["smt", "milp", "native"]), default="native",
              show_default=True)
@click.option("--timeout", type=float, default=60.0, show_default=True)
@click.option("--schedule-out", type=click.Path(), default=None,
              help="Write the schedule JSON here when feasible.")
def solve(instance_path, constraints_path, backend, timeout, schedule_out):
    """Decide feasibility of an instance under a constraint file."""
    instance = instance_io.load_instance(instance_path)
    constraints = instance_io.load_constraints(constraints_path, instance)
    if backend == "smt":
        outcome = solve_smt(instance, constraints, default_smt_config(timeout=timeout))
    elif backend == "milp":
        outcome = solve_milp(instance, constraints, default_milp_config(timeout=timeout))
    else:
        outcome = dfs_feasible(instance, constraints, SearchBudget(max_seconds=timeout))
    click.echo(f"{outcome.verdict.value} in {outcome.wall_time:.3f}s [{backend}]")
    if outcome.schedule is not None and schedule_out:
        instance_io.dump_schedule(outcome.schedule, schedule_out)
        click.echo(f"wrote {schedule_out}")
    sys.exit(1 if outcome.verdict is Verdict.SOLVER_ERROR else 0)


@main.command()
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--constraints", "constraints_path", required=True, type=click.Path(exists=True))
@click.option("--schedule", "schedule_path", required=True, type=click.Path(exists=True))
def validate(instance_path, constraints_path, schedule_path):
    """Check a schedule against every constraint; nonzero exit on violation."""
    instance = instance_io.load_instance(instance_path)
    constraints = instance_io.load_constraints(constraints_path, instance)
    schedule = instance_io.load_schedule(schedule_path)
    report = eval_all(constraints, instance, schedule)
    for entry in report.entries:
        state = "ok" if entry.satisfied else "VIOLATED"
        click.echo(f"{entry.label}: {state} (measure={entry.measure})")
    sys.exit(0 if report.satisfied else 1)


@main.group()
def bench():
    """Benchmark matrices and figures."""


@bench.command("run")
@click.option("--problem", type=click.Choice(["a", "b", "fuzz"]), required=True)
@click.option("--shifts", default=None, help="Range for problem a, e.g. 6..36:6")
@click.option("--staff", default=None, help="Range for problem a, e.g. 2..10:2")
@click.option("--days", default=None, help="Range for problem b, e.g. 1..17")
@click.option("--seeds", type=int, default=0, help="Seed count for fuzz runs.")
@click.option("--backends", default="native", show_default=True,
              help="Comma-separated subset of smt,milp,native.")
@click.option("--timeout", type=float, default=60.0, show_default=True)
@click.option("--out", "out_dir", default="bench-out", show_default=True)
def bench_run(problem, shifts, staff, days, seeds, backends, timeout, out_dir):
    """Run the matrix; results land in OUT/results.csv as cells finish."""
    spec = bench_mod.RunSpec(
        problem=problem,
        shifts=_parse_range(shifts) if shifts else (),
        staff=_parse_range(staff) if staff else (),
        days=_parse_range(days) if days else (),
        seeds=seeds,
        backends=tuple(backends.split(",")),
        timeout=timeout,
        output_dir=Path(out_dir),
    )
    records = bench_mod.run_matrix(spec)
    definite = sum(1 for r in records if r.verdict.definite)
    click.echo(f"{len(records)} records ({definite} definite) -> {out_dir}/results.csv")


@bench.command("figures")
@click.option("--csv", "csv_path", required=True, type=click.Path(exists=True))
@click.option("--kind", type=click.Choice(["heatmap", "ranking", "line"]), required=True)
@click.option("--out", "out_path", default=None, help="Defaults to KIND.svg beside the CSV.")
def bench_figures(csv_path, kind, out_path):
    """Render one figure from a results CSV."""
    records = bench_mod.read_records(csv_path)
    renderer = {
        "heatmap": bench_mod.render_heatmap,
        "ranking": bench_mod.render_ranking,
        "line": bench_mod.render_lineplot,
    }[kind]
    svg = renderer(records)
    target = Path(out_path) if out_path else Path(csv_path).parent / f"{kind}.svg"
    target.write_text(svg)
    click.echo(f"wrote {target}")


if __name__ == "__main__":
    main()
