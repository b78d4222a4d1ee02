"""LP-file front end over scipy's HiGHS MILP bindings.

Parses the CPLEX-style LP subset this package emits (Minimize / Subject To
/ Bounds / Binary / End, integer coefficients, <= >= = rows), solves the
feasibility problem, prints a status phrase on stdout, and writes a
`variable value` solution file when a model is found.
"""

from __future__ import annotations

import argparse
import sys

_SENSES = ("<=", ">=", "=")


def _parse_terms(tokens):
    """[(coef, var)] from e.g. ['x_1', '+', '2', 'z', '-', 'x_2']."""
    terms = []
    sign = 1
    idx = 0
    while idx < len(tokens):
        tok = tokens[idx]
        if tok == "+":
            sign = 1
        elif tok == "-":
            sign = -1
        else:
            try:
                coef = float(tok)
                var = tokens[idx + 1]
                idx += 1
            except (ValueError, IndexError):
                coef = 1.0
                var = tok
            terms.append((sign * coef, var))
            sign = 1
        idx += 1
    return terms


class LpFile:
    def __init__(self):
        self.objective = []
        self.rows = []     # (name, [(coef, var)], sense, rhs)
        self.binaries = []

    @classmethod
    def parse(cls, text: str) -> "LpFile":
        lp = cls()
        section = None
        for line in text.splitlines():
            stripped = line.strip()
            if not stripped or stripped.startswith("\\"):
                continue
            lowered = stripped.lower()
            if lowered in ("minimize", "maximize"):
                section = "objective"
                continue
            if lowered in ("subject to", "st", "s.t."):
                section = "rows"
                continue
            if lowered == "bounds":
                section = "bounds"
                continue
            if lowered in ("binary", "binaries", "general", "generals"):
                section = "binary"
                continue
            if lowered == "end":
                break
            if section == "objective":
                body = stripped.split(":", 1)[-1]
                lp.objective.extend(_parse_terms(body.split()))
            elif section == "rows":
                name, _, body = stripped.partition(":")
                tokens = body.split()
                sense_at = next(i for i, t in enumerate(tokens) if t in _SENSES)
                lp.rows.append((
                    name.strip(),
                    _parse_terms(tokens[:sense_at]),
                    tokens[sense_at],
                    float(tokens[sense_at + 1]),
                ))
            elif section == "binary":
                lp.binaries.extend(stripped.split())
        return lp


def solve_lp(lp: LpFile, time_limit: float):
    """Returns (status_code, values dict or None); codes follow scipy.milp."""
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp

    index = {name: i for i, name in enumerate(lp.binaries)}
    n = len(lp.binaries)
    c = np.zeros(n)
    for coef, var in lp.objective:
        c[index[var]] += coef
    constraints = []
    if lp.rows:
        rows_i = []
        cols = []
        data = []
        lower = []
        upper = []
        for r, (_, terms, sense, rhs) in enumerate(lp.rows):
            for coef, var in terms:
                rows_i.append(r)
                cols.append(index[var])
                data.append(coef)
            lower.append(rhs if sense in (">=", "=") else -np.inf)
            upper.append(rhs if sense in ("<=", "=") else np.inf)
        from scipy.sparse import coo_matrix
        matrix = coo_matrix((data, (rows_i, cols)), shape=(len(lp.rows), n))
        constraints.append(LinearConstraint(matrix, lower, upper))
    result = milp(
        c,
        integrality=np.ones(n),
        bounds=Bounds(0, 1),
        constraints=constraints,
        options={"time_limit": max(0.01, time_limit)},
    )
    values = None
    if result.x is not None:
        values = {name: float(result.x[i]) for name, i in index.items()}
    return result.status, values


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--timeout", type=float, default=60.0)
    parser.add_argument("--solution", required=True)
    parser.add_argument("lp_file")
    args = parser.parse_args(argv)
    with open(args.lp_file) as fh:
        lp = LpFile.parse(fh.read())
    if not lp.binaries:
        print("Solver error: no variables")
        return 1
    status, values = solve_lp(lp, args.timeout)
    if status == 0:
        with open(args.solution, "w") as fh:
            fh.write("# Objective value = 0\n")
            for name in lp.binaries:
                fh.write(f"{name} {values[name]!r}\n")
        print("Optimal solution found")
    elif status == 2:
        print("Model is infeasible")
    elif status == 1:
        if values is not None:
            with open(args.solution, "w") as fh:
                fh.write("# Objective value = 0\n")
                for name in lp.binaries:
                    fh.write(f"{name} {values[name]!r}\n")
        print("Time limit reached")
    elif status == 3:
        print("Model is unbounded")
    else:
        print(f"Solve interrupted (status {status})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
