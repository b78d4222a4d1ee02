"""Native exact feasibility deciders: exhaustive enumeration and pruned DFS.

Both return definite verdicts only when they complete within budget; they
serve as the ground truth the external backends are compared against.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from .constraints import GcKind, eval_all
from .model import RosterInstance, Schedule, enumerate_overlap_pairs, qualified_personnel
from .solve import Backend, SolveOutcome, Verdict


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = 10_000_000
    max_seconds: float = 60.0

    def __post_init__(self):
        if self.max_nodes <= 0 or self.max_seconds <= 0:
            raise ValueError("budget limits must be positive")


class _BudgetExhausted(Exception):
    pass


def _shift_order(instance: RosterInstance):
    return sorted(instance.shifts, key=lambda s: (s.start_day, s.start_time, s.id))


def brute_force(instance: RosterInstance, constraints, budget: SearchBudget = SearchBudget()) -> SolveOutcome:
    """Try every complete assignment; first one passing eval_all wins.

    Domain per shift is every person plus "unassigned", so (|P|+1)^|S|
    candidates. No shortcuts: this is the dumb oracle.
    """
    start = time.monotonic()
    shifts = _shift_order(instance)
    persons = sorted(p.id for p in instance.personnel)
    domain = persons + [None]
    nodes = 0
    for combo in itertools.product(domain, repeat=len(shifts)):
        nodes += 1
        if nodes > budget.max_nodes or time.monotonic() - start > budget.max_seconds:
            return SolveOutcome(Verdict.UNKNOWN, Backend.NATIVE,
                                time.monotonic() - start, raw_log="budget exhausted")
        assignment = {s.id: p for s, p in zip(shifts, combo) if p is not None}
        schedule = Schedule(assignment)
        if eval_all(constraints, instance, schedule).satisfied:
            return SolveOutcome(Verdict.FEASIBLE, Backend.NATIVE,
                                time.monotonic() - start, schedule)
    return SolveOutcome(Verdict.INFEASIBLE, Backend.NATIVE, time.monotonic() - start)


class _Dfs:
    """Depth-first search with sound prunes over counting prefixes.

    Tracked incrementally per constraint:
      GC1/GC2/GC3 - running violation-candidate counts (prune when the
        count tops y, or remaining slack cannot reach x);
      GC6 - consecutive worked-day run length of the committed prefix
        against the upper bound.
    GC4, GC5, GC7, GC8, GC9 are checked only at complete assignments.
    """

    def __init__(self, instance, constraints, budget):
        self.instance = instance
        self.constraints = list(constraints)
        self.budget = budget
        self.shifts = _shift_order(instance)
        self.persons = sorted(p.id for p in instance.personnel)
        self.start = time.monotonic()
        self.nodes = 0
        self.assignment = {}

        self.gc1 = []  # (staff, shifts, x, y)
        self.gc2 = []  # (staff, unqualified_by_shift, shifts, x, y)
        self.gc3 = []  # (staff, x, y)
        self.gc6 = []  # (staff, shifts, y)
        self.force_staff = {}   # shift id -> list of staff sets that must cover it
        self.forbid_staff = {}  # shift id -> set of persons barred by GC2 y=0
        for gc in self.constraints:
            if gc.kind is GcKind.GC1:
                self.gc1.append((gc.staff, gc.shifts, gc.x, gc.y))
                if gc.y == 0:
                    for sid in gc.shifts:
                        self.force_staff.setdefault(sid, []).append(gc.staff)
            elif gc.kind is GcKind.GC2:
                unq = {
                    sid: gc.staff - qualified_personnel(instance.shift_by_id[sid], instance)
                    for sid in gc.shifts
                }
                self.gc2.append((gc.staff, unq, gc.shifts, gc.x, gc.y))
                if gc.y == 0:
                    for sid, barred in unq.items():
                        self.forbid_staff.setdefault(sid, set()).update(barred)
            elif gc.kind is GcKind.GC3:
                self.gc3.append((gc.staff, gc.x, gc.y))
            elif gc.kind is GcKind.GC6:
                self.gc6.append((gc.staff, gc.shifts, gc.y))

        self.partners = {s.id: [] for s in self.shifts}
        for a, b in sorted(enumerate_overlap_pairs(instance)):
            self.partners[a].append(b)
            self.partners[b].append(a)

        # counting state, index-aligned with the gc lists above
        self.cnt1 = [0] * len(self.gc1)
        self.rem1 = [len(sh) for _, sh, _, _ in self.gc1]
        self.cnt2 = [0] * len(self.gc2)
        self.rem2 = [len(sh) for _, _, sh, _, _ in self.gc2]
        self.cnt3 = [0] * len(self.gc3)
        self.pairs_open = len(enumerate_overlap_pairs(instance))
        # worked-day multiplicity per (gc6 index, person, day)
        self.days6 = {}

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise _BudgetExhausted
        if time.monotonic() - self.start > self.budget.max_seconds:
            raise _BudgetExhausted

    def _counts_ok(self):
        for k, (_, _, x, y) in enumerate(self.gc1):
            if self.cnt1[k] > y or self.cnt1[k] + self.rem1[k] < x:
                return False
        for k, (_, _, _, x, y) in enumerate(self.gc2):
            if self.cnt2[k] > y or self.cnt2[k] + self.rem2[k] < x:
                return False
        for k, (_, x, y) in enumerate(self.gc3):
            if self.cnt3[k] > y or self.cnt3[k] + self.pairs_open < x:
                return False
        return True

    def _push(self, shift, person):
        """Apply one decision; returns an undo token, or None when a run
        bound is already broken."""
        sid = shift.id
        self.assignment[sid] = person
        deltas = []
        for k, (staff, shset, _, _) in enumerate(self.gc1):
            if sid in shset:
                self.rem1[k] -= 1
                if person is None or person not in staff:
                    self.cnt1[k] += 1
                    deltas.append(("c1", k))
                deltas.append(("r1", k))
        for k, (staff, unq, shset, _, _) in enumerate(self.gc2):
            if sid in shset:
                self.rem2[k] -= 1
                if person is not None and person in unq[sid]:
                    self.cnt2[k] += 1
                    deltas.append(("c2", k))
                deltas.append(("r2", k))
        closed = 0
        for other in self.partners[sid]:
            if other in self.assignment and other != sid:
                closed += 1
                if person is not None and self.assignment[other] == person:
                    lo, hi = min(sid, other), max(sid, other)
                    if person not in self.instance.allowed_for(lo, hi):
                        for k, (staff, _, _) in enumerate(self.gc3):
                            if person in staff:
                                self.cnt3[k] += 1
                                deltas.append(("c3", k))
        self.pairs_open -= closed
        deltas.append(("pairs", closed))
        run_ok = True
        if person is not None:
            for k, (staff, shset, y) in enumerate(self.gc6):
                if person in staff and sid in shset:
                    key = (k, person, shift.start_day)
                    self.days6[key] = self.days6.get(key, 0) + 1
                    deltas.append(("d6", key))
                    if self.days6[key] == 1 and not self._run_within(k, person, shift.start_day, y):
                        run_ok = False
        token = (sid, deltas)
        if not run_ok:
            self._pop(token)
            return None
        return token

    def _run_within(self, k, person, day, y):
        length = 1
        d = day - 1
        while (k, person, d) in self.days6:
            length += 1
            d -= 1
        d = day + 1
        while (k, person, d) in self.days6:
            length += 1
            d += 1
        return length <= y

    def _pop(self, token):
        sid, deltas = token
        del self.assignment[sid]
        for kind, payload in reversed(deltas):
            if kind == "c1":
                self.cnt1[payload] -= 1
            elif kind == "r1":
                self.rem1[payload] += 1
            elif kind == "c2":
                self.cnt2[payload] -= 1
            elif kind == "r2":
                self.rem2[payload] += 1
            elif kind == "c3":
                self.cnt3[payload] -= 1
            elif kind == "pairs":
                self.pairs_open += payload
            elif kind == "d6":
                self.days6[payload] -= 1
                if self.days6[payload] == 0:
                    del self.days6[payload]

    def _domain(self, shift):
        """Persons ascending then unassigned, filtered by forced-coverage
        and forbidden-assignment rules."""
        sid = shift.id
        musts = self.force_staff.get(sid)
        barred = self.forbid_staff.get(sid, ())
        values = []
        for p in self.persons:
            if musts is not None and any(p not in staff for staff in musts):
                continue
            if p in barred:
                continue
            values.append(p)
        if musts is None:
            values.append(None)
        return values

    def search(self, depth):
        self._tick()
        if depth == len(self.shifts):
            schedule = Schedule({sid: p for sid, p in self.assignment.items()
                                 if p is not None})
            if eval_all(self.constraints, self.instance, schedule).satisfied:
                return schedule
            return None
        shift = self.shifts[depth]
        for value in self._domain(shift):
            token = self._push(shift, value)
            if token is None:
                continue
            if self._counts_ok():
                found = self.search(depth + 1)
                if found is not None:
                    self._pop(token)
                    return found
            self._pop(token)
        return None


def dfs_feasible(instance: RosterInstance, constraints, budget: SearchBudget = SearchBudget()) -> SolveOutcome:
    """Pruned depth-first search over shifts in chronological order."""
    start = time.monotonic()
    for gc in constraints:
        if gc.kind in (GcKind.GC1, GcKind.GC2, GcKind.GC3) and gc.x > gc.y:
            # the count must land in an empty interval; nothing satisfies it
            return SolveOutcome(Verdict.INFEASIBLE, Backend.NATIVE, time.monotonic() - start)
    state = _Dfs(instance, constraints, budget)
    try:
        schedule = state.search(0)
    except _BudgetExhausted:
        return SolveOutcome(Verdict.UNKNOWN, Backend.NATIVE,
                            time.monotonic() - start, raw_log="budget exhausted")
    if schedule is None:
        return SolveOutcome(Verdict.INFEASIBLE, Backend.NATIVE, time.monotonic() - start)
    return SolveOutcome(Verdict.FEASIBLE, Backend.NATIVE, time.monotonic() - start, schedule)
