"""Benchmark harness: instance matrices, CSV persistence, SVG figures.

Runs the configured backends across Problem-A/Problem-B/fuzz matrices with
a per-cell timeout, validates every feasible schedule through the
evaluator, appends one CSV row per record so interrupted runs stay
recoverable, and renders heatmap/ranking/line figures from record sets.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .constraints import GcInstance, GcKind, eval_all
from .exact_solver import SearchBudget, dfs_feasible
from .generators import build_problem_a, build_problem_b
from .milp_backend import solve_milp
from .model import OverlapAllowance, Person, RosterInstance, Shift, shifts_overlap
from .smt_backend import solve_smt
from .solve import Backend, Verdict, default_milp_config, default_smt_config

CSV_FIELDS = ("problem", "shifts", "staff", "days", "seed",
              "backend", "verdict", "wall_time_s", "validated")


@dataclass(frozen=True)
class RunSpec:
    problem: str                    # "a", "b" or "fuzz"
    shifts: tuple = ()              # problem-a axis
    staff: tuple = ()               # problem-a axis
    days: tuple = ()                # problem-b axis
    seeds: int = 0                  # fuzz axis: seeds 1..seeds
    backends: tuple = ("native",)
    timeout: float = 60.0
    output_dir: Path = Path("bench-out")

    def __post_init__(self):
        if self.problem not in ("a", "b", "fuzz"):
            raise ValueError(f"unknown problem family: {self.problem!r}")
        if not self.backends:
            raise ValueError("need at least one backend")
        for b in self.backends:
            if b not in ("smt", "milp", "native"):
                raise ValueError(f"unknown backend: {b!r}")
        if self.problem == "a" and (not self.shifts or not self.staff):
            raise ValueError("problem a needs shifts and staff ranges")
        if self.problem == "b" and not self.days:
            raise ValueError("problem b needs a days range")
        if self.problem == "fuzz" and self.seeds < 1:
            raise ValueError("fuzz needs a positive seed count")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


@dataclass(frozen=True)
class RunRecord:
    problem: str
    shifts: Optional[int]
    staff: Optional[int]
    days: Optional[int]
    seed: Optional[int]
    backend: str
    verdict: Verdict
    wall_time_s: float
    validated: Optional[bool]   # None unless the verdict carried a schedule


def log_quotient(smt_time: float, milp_time: float) -> float:
    """log10(milp/smt); positive means the SMT backend was faster."""
    return math.log10(max(milp_time, 1e-9) / max(smt_time, 1e-9))


# ---- CSV persistence ----

def _to_row(r: RunRecord) -> dict:
    return {
        "problem": r.problem,
        "shifts": "" if r.shifts is None else r.shifts,
        "staff": "" if r.staff is None else r.staff,
        "days": "" if r.days is None else r.days,
        "seed": "" if r.seed is None else r.seed,
        "backend": r.backend,
        "verdict": r.verdict.value,
        "wall_time_s": repr(r.wall_time_s),
        "validated": "" if r.validated is None else ("true" if r.validated else "false"),
    }


def _from_row(row: dict) -> RunRecord:
    def opt(field):
        return int(row[field]) if row[field] != "" else None

    validated = {"": None, "true": True, "false": False}[row["validated"]]
    return RunRecord(
        problem=row["problem"], shifts=opt("shifts"), staff=opt("staff"),
        days=opt("days"), seed=opt("seed"), backend=row["backend"],
        verdict=Verdict(row["verdict"]), wall_time_s=float(row["wall_time_s"]),
        validated=validated,
    )


def append_record(record: RunRecord, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fresh = not path.exists()
    with open(path, "a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        if fresh:
            writer.writeheader()
        writer.writerow(_to_row(record))
        fh.flush()


def write_records(records, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for record in records:
            writer.writerow(_to_row(record))


def read_records(path: Path):
    with open(path, newline="") as fh:
        return [_from_row(row) for row in csv.DictReader(fh)]


# ---- Fuzz instance family ----

_FUZZ_TYPES = (("day", 8 * 60, 480), ("eve", 14 * 60, 480), ("night", 22 * 60, 480))
_FUZZ_QUALS = ("q1", "q2")


def fuzz_instance(seed: int):
    """Seeded tiny instance plus 1-4 random constraints.

    Sizes stay enumerable (shifts <= 8, persons <= 3, horizon <= 4) and
    parameters are internally consistent (x <= y, u <= v).
    """
    rng = random.Random(seed)
    horizon = rng.randint(1, 4)
    n_shifts = rng.randint(1, 8)
    n_persons = rng.randint(1, 3)
    shifts = []
    for k in range(1, n_shifts + 1):
        stype, start, dur = rng.choice(_FUZZ_TYPES)
        req = frozenset(q for q in _FUZZ_QUALS if rng.random() < 0.3)
        shifts.append(Shift(
            id=k, shift_type=stype, start_day=rng.randint(1, horizon),
            start_time=start, duration=dur,
            workload_centi=rng.choice((0, 400, 800, 900)),
            required_qualifications=req,
        ))
    personnel = []
    for j in range(1, n_persons + 1):
        quals = frozenset(q for q in _FUZZ_QUALS if rng.random() < 0.7)
        personnel.append(Person(id=j, desired_centi=rng.choice((5000, 10000)),
                                qualifications=quals))
    allowances = []
    for i, a in enumerate(shifts):
        for b in shifts[i + 1:]:
            if shifts_overlap(a, b) and rng.random() < 0.3:
                need = a.required_qualifications | b.required_qualifications
                pool = [p.id for p in personnel if need <= p.qualifications]
                allowed = frozenset(j for j in pool if rng.random() < 0.6)
                allowances.append(OverlapAllowance(a.id, b.id, allowed))
    instance = RosterInstance(
        horizon_days=horizon, personnel=tuple(personnel),
        shifts=tuple(shifts), allowed_overlap=tuple(allowances),
    )
    return instance, _fuzz_constraints(rng, instance)


def _subset(rng, pool, p=0.7):
    return frozenset(v for v in pool if rng.random() < p)


def _fuzz_constraints(rng, instance):
    person_ids = [p.id for p in instance.personnel]
    shift_ids = [s.id for s in instance.shifts]
    out = []
    for i in range(rng.randint(1, 4)):
        kind = rng.choice(list(GcKind))
        label = f"f{i}"
        staff = _subset(rng, person_ids)
        sset = _subset(rng, shift_ids)
        x = rng.randint(0, 2)
        y = x + rng.randint(0, 2)
        if kind in (GcKind.GC1, GcKind.GC2):
            out.append(GcInstance(kind, staff=staff, shifts=sset, x=x, y=y, label=label))
        elif kind is GcKind.GC3:
            out.append(GcInstance(kind, staff=staff, x=x, y=y, label=label))
        elif kind is GcKind.GC4:
            u, v = sorted(rng.sample((Fraction(0), Fraction(1, 4), Fraction(1, 2),
                                      Fraction(3, 4), Fraction(1)), 2))
            out.append(GcInstance(kind, staff=staff, shifts=sset, u=u, v=v, label=label))
        elif kind is GcKind.GC5:
            out.append(GcInstance(kind, staff=staff, staff2=_subset(rng, person_ids),
                                  shifts1=sset, shifts2=_subset(rng, shift_ids),
                                  x=x, y=y, label=label))
        elif kind is GcKind.GC6:
            lo = rng.choice((0, 0, 2, 3))
            out.append(GcInstance(kind, staff=staff, shifts=sset,
                                  x=lo, y=lo + rng.randint(0, 2), label=label))
        elif kind is GcKind.GC7:
            lo = rng.randint(1, 2)
            out.append(GcInstance(kind, staff=staff, shifts=sset,
                                  shifts1=_subset(rng, shift_ids),
                                  shifts2=_subset(rng, shift_ids),
                                  x=lo, y=lo + rng.randint(0, 1),
                                  n=rng.randint(0, 2), m=rng.randint(0, 2), label=label))
        elif kind is GcKind.GC8:
            out.append(GcInstance(kind, staff=staff, shifts=sset, label=label))
        else:
            v = rng.choice((Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2)))
            out.append(GcInstance(kind, staff=staff, shifts=sset, v=v, label=label))
    return out


# ---- Matrix execution ----

def _cells(spec: RunSpec):
    if spec.problem == "a":
        for n in spec.shifts:
            for p in spec.staff:
                instance, gcs = build_problem_a(n, p)
                yield instance, gcs, {"shifts": n, "staff": p,
                                      "days": instance.horizon_days, "seed": None}
    elif spec.problem == "b":
        for d in spec.days:
            instance, gcs = build_problem_b(d)
            yield instance, gcs, {"shifts": len(instance.shifts),
                                  "staff": len(instance.personnel),
                                  "days": d, "seed": None}
    else:
        for seed in range(1, spec.seeds + 1):
            instance, gcs = fuzz_instance(seed)
            yield instance, gcs, {"shifts": len(instance.shifts),
                                  "staff": len(instance.personnel),
                                  "days": instance.horizon_days, "seed": seed}


def _run_backend(backend: str, instance, constraints, timeout: float, workdir: Path):
    if backend == "smt":
        return solve_smt(instance, constraints,
                         default_smt_config(timeout=timeout, workdir=workdir))
    if backend == "milp":
        return solve_milp(instance, constraints,
                          default_milp_config(timeout=timeout, workdir=workdir))
    return dfs_feasible(instance, constraints, SearchBudget(max_seconds=timeout))


def run_matrix(spec: RunSpec):
    """One RunRecord per cell per backend, appended to results.csv as we go."""
    out_dir = Path(spec.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "results.csv"
    workdir = out_dir / "solver-files"
    records = []
    for instance, constraints, coords in _cells(spec):
        for backend in spec.backends:
            try:
                outcome = _run_backend(backend, instance, constraints,
                                       spec.timeout, workdir)
                verdict, wall, schedule = outcome.verdict, outcome.wall_time, outcome.schedule
            except Exception:   # a broken solver run records the cell and moves on
                verdict, wall, schedule = Verdict.SOLVER_ERROR, 0.0, None
            validated = None
            if schedule is not None:
                validated = eval_all(constraints, instance, schedule).satisfied
            record = RunRecord(problem=spec.problem, backend=backend,
                               verdict=verdict, wall_time_s=wall,
                               validated=validated, **coords)
            append_record(record, csv_path)
            records.append(record)
    return records


# ---- Figures ----

_QUOT_CLAMP = 3.0


def _fig_to_svg(fig) -> str:
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    import matplotlib.pyplot as plt
    plt.close(fig)
    return buf.getvalue().decode("utf-8")


def _new_figure(size):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    # stable internal element ids, so rendered files diff cleanly
    plt.rcParams["svg.hashsalt"] = "rosterkit"
    return plt.subplots(figsize=size)


def _grid(records):
    """(xs, ys, cell dict {(x, y): {backend: record}}) for 2-D record sets."""
    cells = {}
    for r in records:
        if r.shifts is None or r.staff is None:
            raise ValueError("heatmap/ranking need records with shifts and staff axes")
        cells.setdefault((r.shifts, r.staff), {})[r.backend] = r
    xs = sorted({x for x, _ in cells})
    ys = sorted({y for _, y in cells})
    for x in xs:
        for y in ys:
            got = cells.get((x, y), {})
            if "smt" not in got or "milp" not in got:
                raise ValueError(f"cell ({x}, {y}) lacks smt/milp records; not a grid")
    return xs, ys, cells


def _cell_category(smt: RunRecord, milp: RunRecord):
    """(kind, quotient) where kind names the special case, if any."""
    if Verdict.INFEASIBLE in (smt.verdict, milp.verdict):
        return "infeasible-hatch", None
    smt_done = smt.verdict is Verdict.FEASIBLE
    milp_done = milp.verdict is Verdict.FEASIBLE
    if smt_done and milp_done:
        q = log_quotient(smt.wall_time_s, milp.wall_time_s)
        return "quotient", max(-_QUOT_CLAMP, min(_QUOT_CLAMP, q))
    if not smt_done and milp_done:
        return "smt-timeout", None
    if smt_done and not milp_done:
        return "milp-timeout", _QUOT_CLAMP
    return "both-indefinite", None


def _diverging_cmap():
    import matplotlib
    try:
        return matplotlib.colormaps["RdBu"]
    except AttributeError:      # older registry API
        from matplotlib import cm
        return cm.get_cmap("RdBu")


def render_heatmap(records) -> str:
    """Cells colored by log10(milp/smt); black when only MILP finished,
    saturated positive when only SMT finished, gray when neither, hatched
    when infeasible."""
    from matplotlib import colors
    from matplotlib.patches import Rectangle

    xs, ys, cells = _grid(records)
    fig, ax = _new_figure((1.2 * len(xs) + 2.2, 1.0 * len(ys) + 1.6))
    cmap = _diverging_cmap()
    norm = colors.Normalize(vmin=-_QUOT_CLAMP, vmax=_QUOT_CLAMP)
    for xi, x in enumerate(xs):
        for yi, y in enumerate(ys):
            got = cells[(x, y)]
            kind, quot = _cell_category(got["smt"], got["milp"])
            style = {"edgecolor": "black", "linewidth": 0.8}
            if kind == "infeasible-hatch":
                style.update(facecolor="white", hatch="////")
            elif kind == "smt-timeout":
                style.update(facecolor="black")
            elif kind == "both-indefinite":
                style.update(facecolor="0.6")
            else:
                style.update(facecolor=cmap(norm(quot)))
            rect = Rectangle((xi, yi), 1, 1, **style)
            rect.set_gid(f"cell-{x}-{y}-{kind}")
            ax.add_patch(rect)
    ax.set_xlim(0, len(xs))
    ax.set_ylim(0, len(ys))
    ax.set_xticks([i + 0.5 for i in range(len(xs))], [str(x) for x in xs])
    ax.set_yticks([i + 0.5 for i in range(len(ys))], [str(y) for y in ys])
    ax.set_xlabel("shifts")
    ax.set_ylabel("staff")
    ax.set_title("log10(milp time / smt time); positive favors smt")
    from matplotlib.cm import ScalarMappable
    fig.colorbar(ScalarMappable(norm=norm, cmap=cmap), ax=ax, label="log10 quotient")
    return _fig_to_svg(fig)


_RANK_COLORS = {
    "smt-faster": "#3465a4",
    "milp-faster": "#cc0000",
    "equal": "#edd400",
    "none": "0.6",
}


def render_ranking(records) -> str:
    """Three-way winner map: smt faster, milp faster, or equal within 5%."""
    from matplotlib.patches import Patch, Rectangle

    xs, ys, cells = _grid(records)
    fig, ax = _new_figure((1.2 * len(xs) + 2.2, 1.0 * len(ys) + 1.6))
    for xi, x in enumerate(xs):
        for yi, y in enumerate(ys):
            got = cells[(x, y)]
            smt, milp = got["smt"], got["milp"]
            smt_done = smt.verdict.definite
            milp_done = milp.verdict.definite
            if smt_done and milp_done:
                hi = max(smt.wall_time_s, milp.wall_time_s)
                lo = max(1e-9, min(smt.wall_time_s, milp.wall_time_s))
                if hi / lo <= 1.05:
                    cat = "equal"
                elif smt.wall_time_s < milp.wall_time_s:
                    cat = "smt-faster"
                else:
                    cat = "milp-faster"
            elif smt_done:
                cat = "smt-faster"
            elif milp_done:
                cat = "milp-faster"
            else:
                cat = "none"
            rect = Rectangle((xi, yi), 1, 1, facecolor=_RANK_COLORS[cat],
                             edgecolor="black", linewidth=0.8)
            rect.set_gid(f"cell-{x}-{y}-rank-{cat}")
            ax.add_patch(rect)
    ax.set_xlim(0, len(xs))
    ax.set_ylim(0, len(ys))
    ax.set_xticks([i + 0.5 for i in range(len(xs))], [str(x) for x in xs])
    ax.set_yticks([i + 0.5 for i in range(len(ys))], [str(y) for y in ys])
    ax.set_xlabel("shifts")
    ax.set_ylabel("staff")
    ax.set_title("faster backend per cell (equal within 5%)")
    handles = [Patch(facecolor=c, edgecolor="black", label=n)
               for n, c in _RANK_COLORS.items()]
    ax.legend(handles=handles, loc="upper left", bbox_to_anchor=(1.02, 1.0))
    fig.tight_layout()
    return _fig_to_svg(fig)


_LINE_COLORS = {"smt": "#3465a4", "milp": "#cc0000", "native": "#4e9a06"}


def render_lineplot(records) -> str:
    """Wall time per backend over the 1-D axis; gaps where runs timed out."""
    fig, ax = _new_figure((6.4, 4.0))
    axis_name = "days"
    values = sorted({r.days for r in records if r.days is not None})
    if len(values) <= 1:
        for candidate in ("shifts", "seed"):
            alt = sorted({getattr(r, candidate) for r in records
                          if getattr(r, candidate) is not None})
            if len(alt) > 1:
                axis_name, values = candidate, alt
                break
    backends = sorted({r.backend for r in records})
    for backend in backends:
        by_x = {getattr(r, axis_name): r for r in records if r.backend == backend}
        segment = []
        segments = []
        for x in values:
            r = by_x.get(x)
            if r is not None and r.verdict.definite:
                segment.append((x, max(r.wall_time_s, 1e-9)))
            elif segment:
                segments.append(segment)
                segment = []
        if segment:
            segments.append(segment)
        for k, seg in enumerate(segments):
            line, = ax.plot([p[0] for p in seg], [p[1] for p in seg],
                            marker="o", color=_LINE_COLORS.get(backend),
                            label=backend if k == 0 else None)
            line.set_gid(f"line-{backend}-seg{k}")
    ax.set_yscale("log")
    ax.set_xlabel(axis_name)
    ax.set_ylabel("wall time (s)")
    if backends:
        ax.legend()
    ax.set_title("solving time per backend")
    return _fig_to_svg(fig)
