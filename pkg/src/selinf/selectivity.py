"""Marginal selectivity: exact checks and finite-sample significance tests.

If each response depends only on its own factor (plus shared randomness),
the distribution of A cannot move when beta's level changes, nor B's when
alpha's does. That gives four equalities of Pr(response = +1), one per
response per own-factor level, checked here exactly or within a tolerance,
and tested statistically with a two-sample pooled-proportion z-test when
per-treatment counts are available.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from .errors import InvalidValue, MissingCounts
from .model import (
    ALPHA_A,
    ALPHA_A_PRIME,
    BETA_B,
    BETA_B_PRIME,
    ExperimentData,
    FactorLevel,
    Level,
    Rational,
    Treatment,
    rational,
)


class Response(enum.Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True)
class MarginalComparison:
    """Pr(response=+1) at a fixed own-factor level, across the other factor's levels.

    For response A at alpha level L: p_under_first is Pr(A=+1) under (L, b)
    and p_under_second under (L, b'); for response B at beta level L the
    roles of the factors swap.
    """

    response: Response
    fixed_level: FactorLevel
    p_under_first: Fraction
    p_under_second: Fraction

    @property
    def delta(self) -> Fraction:
        return abs(self.p_under_first - self.p_under_second)

    @property
    def treatments(self) -> tuple[Treatment, Treatment]:
        """The two treatments whose marginals are compared, in level order."""
        if self.response is Response.A:
            return (
                Treatment(self.fixed_level, BETA_B),
                Treatment(self.fixed_level, BETA_B_PRIME),
            )
        return (
            Treatment(ALPHA_A, self.fixed_level),
            Treatment(ALPHA_A_PRIME, self.fixed_level),
        )

    def complements(self) -> tuple[Fraction, Fraction]:
        """Pr(response = -1) under both levels (the second listed alternative)."""
        return (1 - self.p_under_first, 1 - self.p_under_second)


# Fixed comparison order: A at a, A at a', B at b, B at b'.
_COMPARISON_SLOTS = (
    (Response.A, ALPHA_A),
    (Response.A, ALPHA_A_PRIME),
    (Response.B, BETA_B),
    (Response.B, BETA_B_PRIME),
)


def _build_comparison(data: ExperimentData, response: Response, level: FactorLevel) -> MarginalComparison:
    if response is Response.A:
        first = data.table(Treatment(level, BETA_B)).pr_a_plus
        second = data.table(Treatment(level, BETA_B_PRIME)).pr_a_plus
    else:
        first = data.table(Treatment(ALPHA_A, level)).pr_b_plus
        second = data.table(Treatment(ALPHA_A_PRIME, level)).pr_b_plus
    return MarginalComparison(response, level, first, second)


@dataclass(frozen=True)
class MarginalReport:
    """All four marginal comparisons plus the satisfied/violated verdict."""

    comparisons: tuple[MarginalComparison, ...]
    tolerance: Fraction

    @property
    def max_delta(self) -> Fraction:
        return max(c.delta for c in self.comparisons)

    @property
    def satisfied(self) -> bool:
        return self.max_delta <= self.tolerance

    def comparison(self, response: Response, level: Level) -> MarginalComparison:
        for c in self.comparisons:
            if c.response is response and c.fixed_level.level is level:
                return c
        raise KeyError((response, level))


def check_marginal_selectivity(
    data: ExperimentData, tolerance: Rational = 0
) -> MarginalReport:
    """Compare Pr(response=+1) across the other factor's levels, all four ways.

    tolerance 0 is the exact check; a positive rational accepts deltas up to it.
    """
    tol = rational(tolerance)
    if tol < 0:
        raise InvalidValue(f"tolerance must be nonnegative, got {tol}")
    comparisons = tuple(
        _build_comparison(data, response, level) for response, level in _COMPARISON_SLOTS
    )
    return MarginalReport(comparisons=comparisons, tolerance=tol)


@dataclass(frozen=True)
class MsTestResult:
    """Two-sample pooled z-test of one marginal comparison."""

    comparison: MarginalComparison
    n_first: int
    n_second: int
    z_statistic: float
    p_value: float
    reject: bool
    alpha_sig: float
    degenerate: bool = False


def test_marginal_selectivity(
    data: ExperimentData,
    alpha_sig: float = 0.05,
    bonferroni: bool = False,
) -> list[MsTestResult]:
    """Run the pooled two-proportion z-test on each of the four comparisons.

    Proportions come from the joint tables' marginals; sample sizes from the
    attached counts (all four treatments must carry counts). Two-sided
    p-values from the standard normal. A pooled proportion of exactly 0 or 1
    is flagged degenerate: z is 0 when the two proportions agree, otherwise
    infinite in magnitude. ``bonferroni`` divides the significance level by
    the four comparisons made.
    """
    if not 0 < alpha_sig < 1:
        raise InvalidValue(f"alpha_sig must be in (0, 1), got {alpha_sig}")
    if not data.has_full_counts():
        raise MissingCounts("statistical test needs counts for all four treatments")
    alpha_eff = alpha_sig / 4 if bonferroni else alpha_sig
    results = []
    for response, level in _COMPARISON_SLOTS:
        comp = _build_comparison(data, response, level)
        t1, t2 = comp.treatments
        n1 = data.count(t1).n
        n2 = data.count(t2).n
        p1, p2 = comp.p_under_first, comp.p_under_second
        pooled = (p1 * n1 + p2 * n2) / Fraction(n1 + n2)
        degenerate = pooled == 0 or pooled == 1
        if degenerate:
            z = 0.0 if p1 == p2 else math.copysign(math.inf, float(p1 - p2))
        else:
            se = math.sqrt(float(pooled * (1 - pooled)) * (1 / n1 + 1 / n2))
            z = float(p1 - p2) / se
        p_value = math.erfc(abs(z) / math.sqrt(2))
        results.append(
            MsTestResult(
                comparison=comp,
                n_first=n1,
                n_second=n2,
                z_statistic=z,
                p_value=p_value,
                reject=p_value < alpha_eff,
                alpha_sig=alpha_eff,
                degenerate=degenerate,
            )
        )
    return results
