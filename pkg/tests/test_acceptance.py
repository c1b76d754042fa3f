"""Acceptance criteria 1-13, each at its stated tolerance.

Every test prints one pass/fail line (and the detail lines of its checks) in
the "acceptance criteria" section of the pytest summary.
"""

import pytest

from optcorr import verify as V
from optcorr.cli import main


def _assert(report, criterion, checks):
    ok = report(criterion, checks)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}")
    assert ok, "\n".join(c.line() for c in checks if not c.passed)


def test_criterion_01_unrestricted_tables(report, capsys):
    codes = {cone: main(["discover", "--cone", cone, "--expect", "paper", "--format", "json"])
             for cone in ("00", "10")}
    capsys.readouterr()
    checks = [c for c in V.check_tables() if not c.name.startswith("reference finite")]
    checks.append(V.Check("discover --expect exit codes", all(v == 0 for v in codes.values()),
                          0.0, f"{codes}"))
    _assert(report, 1, checks)


def test_criterion_02_finite_tables(report, capsys):
    codes = {cone: main(["discover", "--cone", cone, "--finite", "--expect", "paper",
                         "--format", "json"]) for cone in ("00", "10")}
    capsys.readouterr()
    checks = [c for c in V.check_tables() if c.name.startswith("reference finite")]
    checks.append(V.Check("discover --finite --expect exit codes",
                          all(v == 0 for v in codes.values()), 0.0, f"{codes}"))
    _assert(report, 2, checks)


def test_criterion_03_duality_closure(report):
    _assert(report, 3, V.check_duality_closure())


def test_criterion_04_bell_sandwich(report):
    _assert(report, 4, V.check_bell_sandwich())


def test_criterion_05_classical_family(report):
    _assert(report, 5, V.check_classical())


def test_criterion_06_pure_state_closure(report):
    _assert(report, 6, V.check_pure_closure())


def test_criterion_07_product_nullity(report):
    _assert(report, 7, V.check_product_nullity())


def test_criterion_08_antisymmetric(report):
    _assert(report, 8, V.check_antisymmetric())


def test_criterion_09_additivity(report):
    _assert(report, 9, V.check_additivity())


def test_criterion_10_monotonicity(report):
    _assert(report, 10, V.check_monotonicity())


def test_criterion_11_domination(report):
    _assert(report, 11, V.check_domination())


def test_criterion_12_divergence(report):
    _assert(report, 12, V.check_divergence())


def test_criterion_13_hygiene(report):
    _assert(report, 13, V.check_hygiene())
