"""Seeded theorem-as-test suites; each runs at least 200 cases."""

import pytest

import suites


@pytest.mark.parametrize("fn", [
    suites.suite_property_I,
    suites.suite_cp_surjectivity,
    suites.suite_wedge_property_I,
    suites.suite_oracle,
    suites.suite_restriction,
    suites.suite_retraction_wedge,
], ids=lambda f: f.__name__.replace("suite_", ""))
def test_suite(fn):
    n, fails = fn()
    assert n >= 200
    assert fails == [], fails[:5]


def test_oracle_sample_has_both_verdicts():
    from eqrat import diagrams as dg
    verdicts = set()
    for s in range(60):
        d = suites.random_cpq(s) if s % 2 else suites.random_cp(s)
        verdicts.add(dg.envelope(d).injective)
    assert verdicts == {True, False}
