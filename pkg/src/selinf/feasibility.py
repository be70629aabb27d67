"""Latent-model representability of four joint tables, decided exactly.

A deterministic hidden state fixes all four responses at once: A's answer at
a and at a', B's answer at b and at b'. There are 16 such states, and the
mixtures over them are exactly the models in which each response reads only
its own factor plus a shared random source. Whether observed tables admit
such a mixture is a linear feasibility question in the 16 weights; it is
decided here with an exact rational phase-1 simplex, returning either a
witness distribution or a certificate (a marginal-selectivity inequality or
a CHSH facet above 2) that provably excludes every mixture. Fine's theorem
guarantees the certificate family is complete for this design, and
``fine_criterion`` provides that closed form as an independent cross-check.

An unrestricted representation, in which both responses may read both
factors, always exists: ``construct_general_representation`` builds one as a
product measure over the 256 tuples of per-treatment outcome pairs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Union

from .chsh import SIGN_PATTERNS, SignPattern, chsh_facet_value, compute_gamma
from .errors import InvalidDistribution, InvalidValue, SelinfError
from .model import (
    CELLS,
    TREATMENTS,
    ExperimentData,
    JointTable,
    Level,
    Rational,
    Treatment,
    rational,
)
from .selectivity import MarginalComparison, check_marginal_selectivity
from .simplex import feasible_point


@dataclass(frozen=True)
class HiddenState:
    """Deterministic responses (A(a), A(a'), B(b), B(b')), each +1 or -1."""

    a_val: int
    a_prime_val: int
    b_val: int
    b_prime_val: int

    def __post_init__(self) -> None:
        for name in ("a_val", "a_prime_val", "b_val", "b_prime_val"):
            if getattr(self, name) not in (1, -1):
                raise InvalidValue(f"{name} must be +1 or -1")

    @property
    def index(self) -> int:
        """Position in the fixed lexicographic order with +1 before -1."""
        bits = 0
        for v in (self.a_val, self.a_prime_val, self.b_val, self.b_prime_val):
            bits = (bits << 1) | (v == -1)
        return bits

    @classmethod
    def from_index(cls, index: int) -> "HiddenState":
        if not 0 <= index < 16:
            raise InvalidValue(f"hidden state index {index} outside 0..15")
        vals = [(-1 if (index >> shift) & 1 else 1) for shift in (3, 2, 1, 0)]
        return cls(*vals)

    @classmethod
    def from_string(cls, text: str) -> "HiddenState":
        if len(text) != 4 or set(text) - {"+", "-"}:
            raise InvalidValue(f"hidden state string must be four of +/-, got {text!r}")
        return cls(*(1 if ch == "+" else -1 for ch in text))

    def a_response(self, level: Level) -> int:
        return self.a_val if level is Level.FIRST else self.a_prime_val

    def b_response(self, level: Level) -> int:
        return self.b_val if level is Level.FIRST else self.b_prime_val

    def response(self, treatment: Treatment) -> tuple[int, int]:
        """The (A, B) outcome this state produces under ``treatment``."""
        return (
            self.a_response(treatment.alpha.level),
            self.b_response(treatment.beta.level),
        )

    def __str__(self) -> str:
        return "".join(
            "+" if v == 1 else "-"
            for v in (self.a_val, self.a_prime_val, self.b_val, self.b_prime_val)
        )


HIDDEN_STATES: tuple[HiddenState, ...] = tuple(HiddenState.from_index(i) for i in range(16))


@dataclass(frozen=True)
class HiddenStateDistribution:
    """Probability weights over the 16 deterministic states, summing to 1."""

    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        ws = tuple(rational(w) for w in self.weights)
        if len(ws) != 16:
            raise InvalidDistribution(f"need 16 weights, got {len(ws)}")
        if any(w < 0 for w in ws):
            raise InvalidDistribution("weights must be nonnegative")
        total = sum(ws)
        if total != 1:
            raise InvalidDistribution(f"weights sum to {total}, expected exactly 1")
        object.__setattr__(self, "weights", ws)

    @classmethod
    def from_mapping(cls, mapping: Mapping[Union[HiddenState, str], Rational]) -> "HiddenStateDistribution":
        """Build from {state: weight}; states may be "+-+-" strings; missing states get 0."""
        ws = [Fraction(0)] * 16
        for state, weight in mapping.items():
            if isinstance(state, str):
                state = HiddenState.from_string(state)
            ws[state.index] += rational(weight)
        return cls(tuple(ws))

    @classmethod
    def uniform(cls) -> "HiddenStateDistribution":
        return cls((Fraction(1, 16),) * 16)

    @classmethod
    def point_mass(cls, state: HiddenState) -> "HiddenStateDistribution":
        ws = [Fraction(0)] * 16
        ws[state.index] = Fraction(1)
        return cls(tuple(ws))

    def weight(self, state: HiddenState) -> Fraction:
        return self.weights[state.index]

    def items(self) -> Iterator[tuple[HiddenState, Fraction]]:
        return zip(HIDDEN_STATES, self.weights)

    def nonzero_items(self) -> Iterator[tuple[HiddenState, Fraction]]:
        return ((s, w) for s, w in self.items() if w != 0)

    def mix(self, other: "HiddenStateDistribution", lam: Rational) -> "HiddenStateDistribution":
        lam = rational(lam)
        if not 0 <= lam <= 1:
            raise InvalidValue(f"mixing weight {lam} outside [0, 1]")
        return HiddenStateDistribution(
            tuple(lam * a + (1 - lam) * b for a, b in zip(self.weights, other.weights))
        )


def predicted_tables(dist: HiddenStateDistribution) -> ExperimentData:
    """Push the state distribution forward to one joint table per treatment."""
    tables = {}
    for t in TREATMENTS:
        cells = {pair: Fraction(0) for pair in CELLS}
        for state, w in dist.nonzero_items():
            cells[state.response(t)] += w
        tables[t] = JointTable(*(cells[pair] for pair in CELLS))
    return ExperimentData(tables=tables)


# One outcome pair per treatment, in canonical treatment order: 4^4 = 256 tuples.
OutcomePair = tuple[int, int]
OutcomeTuple = tuple[OutcomePair, OutcomePair, OutcomePair, OutcomePair]


@dataclass(frozen=True)
class GeneralRepresentation:
    """A joint source over per-treatment outcome tuples; reproduces any tables.

    Stored sparsely: tuples with zero weight are omitted.
    """

    weights: Mapping[OutcomeTuple, Fraction]

    def __post_init__(self) -> None:
        fixed = {}
        for tup, w in self.weights.items():
            if len(tup) != 4 or any(pair not in CELLS for pair in tup):
                raise InvalidValue(f"bad outcome tuple {tup!r}")
            w = rational(w)
            if w < 0:
                raise InvalidDistribution("weights must be nonnegative")
            if w != 0:
                fixed[tuple(tup)] = w
        if sum(fixed.values()) != 1:
            raise InvalidDistribution("weights must sum to exactly 1")
        object.__setattr__(self, "weights", fixed)

    def reconstructed_tables(self) -> ExperimentData:
        """Marginalize each treatment's coordinate back to a joint table."""
        tables = {}
        for k, t in enumerate(TREATMENTS):
            cells = {pair: Fraction(0) for pair in CELLS}
            for tup, w in self.weights.items():
                cells[tup[k]] += w
            tables[t] = JointTable(*(cells[pair] for pair in CELLS))
        return ExperimentData(tables=tables)


def construct_general_representation(data: ExperimentData) -> GeneralRepresentation:
    """Product measure across treatments; always exists and reconstructs exactly."""
    weights: dict[OutcomeTuple, Fraction] = {}
    tables = [data.table(t) for t in TREATMENTS]
    for pair0 in CELLS:
        w0 = tables[0].cell(*pair0)
        if w0 == 0:
            continue
        for pair1 in CELLS:
            w1 = w0 * tables[1].cell(*pair1)
            if w1 == 0:
                continue
            for pair2 in CELLS:
                w2 = w1 * tables[2].cell(*pair2)
                if w2 == 0:
                    continue
                for pair3 in CELLS:
                    w3 = w2 * tables[3].cell(*pair3)
                    if w3 != 0:
                        weights[(pair0, pair1, pair2, pair3)] = w3
    return GeneralRepresentation(weights)


class Verdict(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class FacetViolation:
    """A CHSH facet whose signed sum exceeds the classical bound 2."""

    pattern: SignPattern
    value: Fraction


Certificate = Union[MarginalComparison, FacetViolation]


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of the hidden-state feasibility decision.

    Feasible results carry a witness distribution whose push-forward equals
    the data exactly. Infeasible results carry the first violated condition
    in the fixed search order (marginal comparisons, then CHSH facets) as
    ``certificate``, with every violated condition listed in
    ``all_violations``.
    """

    verdict: Verdict
    witness: Optional[HiddenStateDistribution] = None
    certificate: Optional[Certificate] = None
    all_violations: tuple[Certificate, ...] = ()

    @property
    def feasible(self) -> bool:
        return self.verdict is Verdict.FEASIBLE


def fine_violations(data: ExperimentData) -> list[Certificate]:
    """All violated conditions: marginal inequalities first, then CHSH facets."""
    violations: list[Certificate] = []
    for comp in check_marginal_selectivity(data, 0).comparisons:
        if comp.delta > 0:
            violations.append(comp)
    for pattern in SIGN_PATTERNS:
        value = chsh_facet_value(data, pattern)
        if value > 2:
            violations.append(FacetViolation(pattern, value))
    return violations


def fine_criterion(data: ExperimentData) -> bool:
    """Exact marginal selectivity and all eight CHSH facets at most 2."""
    return (
        check_marginal_selectivity(data, 0).satisfied
        and compute_gamma(data).gamma <= 2
    )


def _constraint_system(data: ExperimentData) -> tuple[list[list[Fraction]], list[Fraction]]:
    zero, one = Fraction(0), Fraction(1)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for t in TREATMENTS:
        table = data.table(t)
        for pair in CELLS:
            rows.append(
                [one if state.response(t) == pair else zero for state in HIDDEN_STATES]
            )
            rhs.append(table.cell(*pair))
    rows.append([one] * 16)
    rhs.append(one)
    return rows, rhs


def solve_feasibility(data: ExperimentData) -> FeasibilityResult:
    """Decide exactly whether some hidden-state mixture reproduces the data.

    The verdict comes from the rational phase-1 simplex on the 16-weight
    system (the 16 cell equations plus normalization; dependent rows are
    eliminated first). Certificates are not read off the solver: they are
    recomputed from the marginal and facet checks, which Fine's theorem
    makes complete for this design.
    """
    rows, rhs = _constraint_system(data)
    solution = feasible_point(rows, rhs)
    if solution is not None:
        witness = HiddenStateDistribution(tuple(solution))
        return FeasibilityResult(verdict=Verdict.FEASIBLE, witness=witness)
    violations = fine_violations(data)
    if not violations:
        raise SelinfError(
            "solver found no mixture but no marginal or facet condition is violated"
        )
    return FeasibilityResult(
        verdict=Verdict.INFEASIBLE,
        certificate=violations[0],
        all_violations=tuple(violations),
    )


def verify_witness(dist: HiddenStateDistribution, data: ExperimentData) -> bool:
    """True iff the push-forward of ``dist`` equals the data cell-by-cell."""
    predicted = predicted_tables(dist)
    return all(predicted.table(t) == data.table(t) for t in TREATMENTS)
