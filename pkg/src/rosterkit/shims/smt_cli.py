"""Small SAT-style decider for the emitted SMT-LIB2 subset.

Understands Bool constants, zero-argument define-funs over Bool/Int,
b2i pseudo-Boolean sums, and linear comparisons. Decides by depth-first
search with three-valued/interval evaluation for pruning. Intended for
desk-scale scripts; prints `timeout` when the budget runs out.

Prints z3-style output: a status line, then a parenthesized model of
`(define-fun name () Bool value)` entries when satisfiable.
"""

from __future__ import annotations

import argparse
import sys
import time


class _Timeout(Exception):
    pass


def tokenize(text: str):
    out = []
    for line in text.splitlines():
        body = line.split(";", 1)[0]
        out.extend(body.replace("(", " ( ").replace(")", " ) ").split())
    return out


def parse_sexprs(tokens):
    stack = [[]]
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            done = stack.pop()
            if not stack:
                raise ValueError("unbalanced parentheses")
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ValueError("unbalanced parentheses")
    return stack[0]


class Script:
    """Declared Bool variables, named definitions, and assertions."""

    def __init__(self):
        self.variables = []
        self.defs = {}  # name -> ("Bool" | "Int", body)
        self.asserts = []

    @classmethod
    def parse(cls, text: str) -> "Script":
        script = cls()
        for form in parse_sexprs(tokenize(text)):
            if not isinstance(form, list) or not form:
                continue
            head = form[0]
            if head == "declare-const":
                script.variables.append(form[1])
            elif head == "define-fun":
                name = form[1]
                if name == "b2i":
                    continue  # builtin
                script.defs[name] = (form[3], form[4])
            elif head == "assert":
                script.asserts.append(form[1])
        return script


class Evaluator:
    """Three-valued Bool / interval Int evaluation over a partial assignment."""

    def __init__(self, script: Script):
        self.script = script
        self.assignment = {v: None for v in script.variables}
        self.memo = {}

    def _atom_bool(self, node):
        if node == "true":
            return True
        if node == "false":
            return False
        if node in self.assignment:
            return self.assignment[node]
        if node in self.memo:
            return self.memo[node]
        sort, body = self.script.defs[node]
        if sort != "Bool":
            raise ValueError(f"{node} is not a Bool definition")
        value = self.beval(body)
        self.memo[node] = value
        return value

    def beval(self, node):
        if isinstance(node, str):
            return self._atom_bool(node)
        head = node[0]
        if head == "not":
            inner = self.beval(node[1])
            return None if inner is None else not inner
        if head == "and":
            saw_none = False
            for arg in node[1:]:
                val = self.beval(arg)
                if val is False:
                    return False
                if val is None:
                    saw_none = True
            return None if saw_none else True
        if head == "or":
            saw_none = False
            for arg in node[1:]:
                val = self.beval(arg)
                if val is True:
                    return True
                if val is None:
                    saw_none = True
            return None if saw_none else False
        if head == "=>":
            a = self.beval(node[1])
            if a is False:
                return True
            b = self.beval(node[2])
            if b is True:
                return True
            if a is True and b is False:
                return False
            return None
        if head in ("<=", "<", ">=", ">", "="):
            alo, ahi = self.ieval(node[1])
            blo, bhi = self.ieval(node[2])
            if head == "<=":
                return True if ahi <= blo else (False if alo > bhi else None)
            if head == "<":
                return True if ahi < blo else (False if alo >= bhi else None)
            if head == ">=":
                return True if alo >= bhi else (False if ahi < blo else None)
            if head == ">":
                return True if alo > bhi else (False if ahi <= blo else None)
            if alo == ahi == blo == bhi:
                return True
            if ahi < blo or bhi < alo:
                return False
            return None
        raise ValueError(f"unsupported Bool form: {head}")

    def ieval(self, node):
        if isinstance(node, str):
            try:
                value = int(node)
                return value, value
            except ValueError:
                pass
            key = ("int", node)
            if key in self.memo:
                return self.memo[key]
            sort, body = self.script.defs[node]
            if sort != "Int":
                raise ValueError(f"{node} is not an Int definition")
            value = self.ieval(body)
            self.memo[key] = value
            return value
        head = node[0]
        if head == "b2i":
            val = self.beval(node[1])
            if val is True:
                return 1, 1
            if val is False:
                return 0, 0
            return 0, 1
        if head == "+":
            lo = hi = 0
            for arg in node[1:]:
                alo, ahi = self.ieval(arg)
                lo += alo
                hi += ahi
            return lo, hi
        if head == "*":
            k = self._const(node[1])
            lo, hi = self.ieval(node[2])
            return (k * lo, k * hi) if k >= 0 else (k * hi, k * lo)
        if head == "-" and len(node) == 2:
            lo, hi = self.ieval(node[1])
            return -hi, -lo
        raise ValueError(f"unsupported Int form: {head}")

    def _const(self, node):
        if isinstance(node, str):
            return int(node)
        if node[0] == "-" and len(node) == 2:
            return -self._const(node[1])
        raise ValueError(f"expected integer constant, got {node!r}")

    def check(self):
        """True: all asserts hold; False: some assert broken; None: open."""
        self.memo.clear()
        open_left = False
        for form in self.script.asserts:
            val = self.beval(form)
            if val is False:
                return False
            if val is None:
                open_left = True
        return None if open_left else True


def solve(script: Script, deadline: float):
    """Returns (status, assignment) with status sat/unsat/timeout."""
    ev = Evaluator(script)
    order = script.variables

    def rec(pos):
        if time.monotonic() > deadline:
            raise _Timeout
        status = ev.check()
        if status is False:
            return False
        if status is True:
            return True
        while pos < len(order) and ev.assignment[order[pos]] is not None:
            pos += 1
        if pos == len(order):
            return False
        var = order[pos]
        for value in (True, False):
            ev.assignment[var] = value
            if rec(pos + 1):
                return True
        ev.assignment[var] = None
        return False

    try:
        found = rec(0)
    except _Timeout:
        return "timeout", {}
    if not found:
        return "unsat", {}
    model = {v: bool(ev.assignment[v]) for v in order}
    return "sat", model


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--timeout", type=float, default=60.0)
    parser.add_argument("script")
    args = parser.parse_args(argv)
    with open(args.script) as fh:
        text = fh.read()
    try:
        script = Script.parse(text)
    except (ValueError, KeyError) as exc:
        print(f"(error \"{exc}\")")
        return 1
    status, model = solve(script, time.monotonic() + args.timeout)
    print(status)
    if status == "sat":
        print("(")
        for name, value in model.items():
            print(f"  (define-fun {name} () Bool {'true' if value else 'false'})")
        print(")")
    return 0


if __name__ == "__main__":
    sys.exit(main())
