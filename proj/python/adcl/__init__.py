"""Acceleration driven clause learning for linear constrained Horn clauses."""

from ._adcl import AdclError, check_witness, expand_witness, instrument, luby, solve

__all__ = ["AdclError", "check_witness", "expand_witness", "instrument", "luby", "solve"]


def solve_file(path, **kwargs):
    with open(path, encoding="utf-8") as f:
        return solve(f.read(), **kwargs)
