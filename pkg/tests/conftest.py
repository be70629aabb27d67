"""Shared fixtures and random-data generators for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from selinf.cli import load_fixture_text
from selinf.feasibility import HiddenStateDistribution
from selinf.io import parse_experiment
from selinf.model import TREATMENTS, ExperimentData, JointTable, Level


@pytest.fixture(scope="session")
def table1():
    return parse_experiment(load_fixture_text("table1"))


@pytest.fixture(scope="session")
def table2():
    return parse_experiment(load_fixture_text("table2"))


@pytest.fixture(scope="session")
def table3():
    return parse_experiment(load_fixture_text("table3"))


def random_hidden_distribution(rng: random.Random, max_weight: int = 30) -> HiddenStateDistribution:
    """Random rational distribution over the 16 hidden states."""
    weights = [Fraction(rng.randint(0, max_weight)) for _ in range(16)]
    if sum(weights) == 0:
        weights[rng.randrange(16)] = Fraction(1)
    total = sum(weights)
    return HiddenStateDistribution(tuple(w / total for w in weights))


def random_ms_data(rng: random.Random, denom: int = 24) -> ExperimentData:
    """Random tables with exact marginal selectivity.

    Marginals Pr(A=+1) per alpha level and Pr(B=+1) per beta level are drawn
    first; each treatment's p_pp is then placed uniformly inside its
    Frechet-Hoeffding interval, which spans every joint with those margins.
    """
    pa = {lv: Fraction(rng.randint(0, denom), denom) for lv in Level}
    pb = {lv: Fraction(rng.randint(0, denom), denom) for lv in Level}
    tables = {}
    for t in TREATMENTS:
        a, b = pa[t.alpha.level], pb[t.beta.level]
        lo = max(Fraction(0), a + b - 1)
        hi = min(a, b)
        mix = Fraction(rng.randint(0, 16), 16)
        p_pp = lo + mix * (hi - lo)
        tables[t] = JointTable(p_pp, a - p_pp, b - p_pp, 1 - a - b + p_pp)
    return ExperimentData(tables=tables)


def random_any_data(rng: random.Random, denom: int = 20) -> ExperimentData:
    """Random valid tables with no selectivity constraint (MS almost surely fails)."""
    tables = {}
    for t in TREATMENTS:
        cells = [Fraction(rng.randint(0, denom)) for _ in range(4)]
        if sum(cells) == 0:
            cells[rng.randrange(4)] = Fraction(1)
        total = sum(cells)
        tables[t] = JointTable(*(c / total for c in cells))
    return ExperimentData(tables=tables)


def pr_box() -> ExperimentData:
    """The extremal no-signaling behavior: three aligned tables, one anti-aligned."""
    half = Fraction(1, 2)
    aligned = JointTable(half, 0, 0, half)
    crossed = JointTable(0, half, half, 0)
    tables = dict.fromkeys(TREATMENTS[:3], aligned)
    tables[TREATMENTS[3]] = crossed
    return ExperimentData(tables=tables)
