"""Bundled fallback solvers used when no external solver is installed.

`smt_cli` decides the SMT-LIB2 subset this package emits; `milp_cli`
decides the LP subset via scipy's HiGHS bindings. Both speak the same
command-line contract as the external tools they stand in for, so the
backends can shell out to them interchangeably.
"""
