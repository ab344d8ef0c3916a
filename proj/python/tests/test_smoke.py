import os
import pathlib

import pytest

import adcl

BENCH = pathlib.Path(__file__).resolve().parents[2] / "benchmarks"


def read(name):
    return (BENCH / name).read_text()


def test_ex1_unsat_with_checked_witness():
    r = adcl.solve(read("ex1.smt2"))
    assert r["answer"] == "unsat"
    ok, reason, steps = adcl.check_witness(read("ex1.smt2"), r["witness"])
    assert ok, reason
    assert steps == 10002


def test_sat_variant():
    r = adcl.solve(read("ex1_sat.smt2"), restarts=False)
    assert r["answer"] == "sat"
    assert r["transitions"] == "ISSASABBBP"


def test_unsupported_input_is_unknown():
    r = adcl.solve(read("div.smt2"))
    assert r["answer"] == "unknown"
    assert "UnsupportedFeature" in r["reason"]


def test_syntax_error_raises():
    with pytest.raises(adcl.AdclError):
        adcl.solve("(assert")


def test_instrument_and_expand():
    inst = adcl.instrument(read("ex1.smt2"))
    assert "Int Int Int" in inst
    r = adcl.solve(read("ex1.smt2"))
    expanded = adcl.expand_witness(read("ex1.smt2"), r["witness"])
    assert expanded.count("\nground ") == 10002


def test_luby_and_solve_file():
    assert [adcl.luby(i) for i in range(1, 9)] == [1, 1, 2, 1, 1, 2, 4, 1]
    assert adcl.solve_file(os.fspath(BENCH / "ex1.smt2"))["answer"] == "unsat"
