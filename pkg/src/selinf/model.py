"""Exact data model for 2x2 factorial experiments with two binary responses.

Two factors (alpha with levels a/a', beta with levels b/b') are crossed into
four treatments; under each treatment two responses A and B are recorded,
coded +1 for the first listed alternative and -1 for the second. Every
probability in this package is a ``fractions.Fraction``: decimal strings such
as ".049" parse to the exact rational 49/1000, so equality checks downstream
(witness round-trips, criterion equivalences) are bit-exact rather than
tolerance-based.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Union

from .errors import ConflictingData, InvalidTable, InvalidValue, ZeroTotal

# Public alias: probabilities are exact rationals in [0, 1].
Probability = Fraction

Rational = Union[Fraction, int, str, float]


def rational(value: Rational) -> Fraction:
    """Convert ``value`` to an exact Fraction.

    Strings may be decimals (".049" -> 49/1000) or ratios ("49/1000").
    Floats go through their shortest decimal repr, so a JSON number 0.049
    also becomes exactly 49/1000.
    """
    if isinstance(value, bool):
        raise InvalidValue(f"cannot interpret {value!r} as a rational")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidValue(f"cannot interpret {value!r} as a rational") from exc
    raise InvalidValue(f"cannot interpret {value!r} as a rational")


class Factor(enum.Enum):
    ALPHA = "alpha"
    BETA = "beta"


class Level(enum.Enum):
    FIRST = "first"  # a or b
    SECOND = "second"  # a' or b'


@dataclass(frozen=True)
class FactorLevel:
    """One level of one factor. ``label`` is display-only and ignored by ==."""

    factor: Factor
    level: Level
    label: Optional[str] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.label is not None and not self.label:
            raise InvalidValue("factor level label must be nonempty when given")

    @property
    def key(self) -> str:
        base = "a" if self.factor is Factor.ALPHA else "b"
        return base if self.level is Level.FIRST else base + "'"

    def __str__(self) -> str:
        return self.key


ALPHA_A = FactorLevel(Factor.ALPHA, Level.FIRST)
ALPHA_A_PRIME = FactorLevel(Factor.ALPHA, Level.SECOND)
BETA_B = FactorLevel(Factor.BETA, Level.FIRST)
BETA_B_PRIME = FactorLevel(Factor.BETA, Level.SECOND)

FACTOR_LEVELS = (ALPHA_A, ALPHA_A_PRIME, BETA_B, BETA_B_PRIME)


@dataclass(frozen=True)
class Treatment:
    """One combination of factor levels; exactly four exist."""

    alpha: FactorLevel
    beta: FactorLevel

    def __post_init__(self) -> None:
        if self.alpha.factor is not Factor.ALPHA or self.beta.factor is not Factor.BETA:
            raise InvalidValue("treatment needs one alpha level and one beta level")

    @property
    def key(self) -> str:
        return f"{self.alpha.key},{self.beta.key}"

    @property
    def index(self) -> int:
        """Position in the canonical order (a,b), (a,b'), (a',b), (a',b')."""
        return 2 * (self.alpha.level is Level.SECOND) + (self.beta.level is Level.SECOND)

    @classmethod
    def from_key(cls, key: str) -> "Treatment":
        for t in TREATMENTS:
            if t.key == key:
                return t
        raise InvalidValue(f"unknown treatment key {key!r}")

    def __str__(self) -> str:
        return self.key


TREATMENTS = (
    Treatment(ALPHA_A, BETA_B),
    Treatment(ALPHA_A, BETA_B_PRIME),
    Treatment(ALPHA_A_PRIME, BETA_B),
    Treatment(ALPHA_A_PRIME, BETA_B_PRIME),
)

# Outcome pairs (A, B) in the fixed cell order pp, pm, mp, mm.
CELLS = ((1, 1), (1, -1), (-1, 1), (-1, -1))

_CELL_FIELDS = ("p_pp", "p_pm", "p_mp", "p_mm")


@dataclass(frozen=True)
class CountTable:
    """Observed outcome counts for one treatment."""

    n_pp: int
    n_pm: int
    n_mp: int
    n_mm: int

    def __post_init__(self) -> None:
        for name in ("n_pp", "n_pm", "n_mp", "n_mm"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise InvalidTable(f"count {name} must be an integer, got {v!r}")
            if v < 0:
                raise InvalidTable(f"count {name} must be nonnegative, got {v}")
        if self.n == 0:
            raise ZeroTotal("count table has zero total observations")

    @property
    def n(self) -> int:
        return self.n_pp + self.n_pm + self.n_mp + self.n_mm

    def cells(self) -> tuple[int, int, int, int]:
        return (self.n_pp, self.n_pm, self.n_mp, self.n_mm)

    def normalized(self) -> "JointTable":
        return JointTable.from_counts(self)

    def flip_a(self) -> "CountTable":
        return CountTable(self.n_mp, self.n_mm, self.n_pp, self.n_pm)

    def flip_b(self) -> "CountTable":
        return CountTable(self.n_pm, self.n_pp, self.n_mm, self.n_mp)


@dataclass(frozen=True)
class JointTable:
    """Joint distribution of (A, B) in {+1,-1}^2 under one treatment.

    Cell names follow the sign coding: p_pm is Pr(A=+1, B=-1). Cells must be
    rationals in [0, 1] summing to exactly 1.
    """

    p_pp: Fraction
    p_pm: Fraction
    p_mp: Fraction
    p_mm: Fraction

    def __post_init__(self) -> None:
        for name in _CELL_FIELDS:
            v = rational(getattr(self, name))
            if not 0 <= v <= 1:
                raise InvalidTable(f"cell {name} = {v} outside [0, 1]")
            object.__setattr__(self, name, v)
        total = self.p_pp + self.p_pm + self.p_mp + self.p_mm
        if total != 1:
            raise InvalidTable(f"cells sum to {total}, expected exactly 1")

    @classmethod
    def from_counts(cls, counts: CountTable) -> "JointTable":
        """Normalize a count table to exact cell fractions count/n."""
        if counts.n == 0:
            raise ZeroTotal("count table has zero total observations")
        n = counts.n
        return cls(*(Fraction(c, n) for c in counts.cells()))

    @classmethod
    def uniform(cls) -> "JointTable":
        q = Fraction(1, 4)
        return cls(q, q, q, q)

    @classmethod
    def point_mass(cls, a: int, b: int) -> "JointTable":
        cells = [Fraction(1) if (a, b) == pair else Fraction(0) for pair in CELLS]
        return cls(*cells)

    def cells(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.p_pp, self.p_pm, self.p_mp, self.p_mm)

    def cell(self, a: int, b: int) -> Fraction:
        """Pr(A=a, B=b) for a, b in {+1, -1}."""
        return self.cells()[CELLS.index((a, b))]

    def expectation(self) -> Fraction:
        """E[A*B] = p_pp - p_pm - p_mp + p_mm."""
        return self.p_pp - self.p_pm - self.p_mp + self.p_mm

    def marginals(self) -> tuple[Fraction, Fraction]:
        """(Pr(A=+1), Pr(B=+1)) as row and column sums."""
        return (self.p_pp + self.p_pm, self.p_pp + self.p_mp)

    @property
    def pr_a_plus(self) -> Fraction:
        return self.p_pp + self.p_pm

    @property
    def pr_b_plus(self) -> Fraction:
        return self.p_pp + self.p_mp

    def flip_a(self) -> "JointTable":
        """Swap the A=+1 / A=-1 rows (recode A)."""
        return JointTable(self.p_mp, self.p_mm, self.p_pp, self.p_pm)

    def flip_b(self) -> "JointTable":
        """Swap the B=+1 / B=-1 columns (recode B)."""
        return JointTable(self.p_pm, self.p_pp, self.p_mm, self.p_mp)

    def mix(self, other: "JointTable", lam: Rational) -> "JointTable":
        """Cell-wise convex combination lam*self + (1-lam)*other."""
        lam = rational(lam)
        if not 0 <= lam <= 1:
            raise InvalidValue(f"mixing weight {lam} outside [0, 1]")
        return JointTable(
            *(lam * x + (1 - lam) * y for x, y in zip(self.cells(), other.cells()))
        )


def expectation(table: JointTable) -> Fraction:
    """E[A*B] of one treatment's joint table."""
    return table.expectation()


def marginals(table: JointTable) -> tuple[Fraction, Fraction]:
    """(Pr(A=+1), Pr(B=+1)) of one treatment's joint table."""
    return table.marginals()


def from_counts(counts: CountTable) -> JointTable:
    """Exact normalization of observed counts, cell = count/n."""
    return JointTable.from_counts(counts)


_LEVEL_KEYS = ("a", "a'", "b", "b'")


@dataclass(frozen=True)
class LabelSet:
    """Optional display names: factor names, level prompts, response alternatives.

    ``responses`` maps a level key ("a", "a'", "b", "b'") to the pair of
    alternative names, first alternative (+1) before second (-1).
    """

    factors: Optional[Mapping[str, str]] = None
    levels: Optional[Mapping[str, str]] = None
    responses: Optional[Mapping[str, tuple[str, str]]] = None

    def __post_init__(self) -> None:
        if self.factors is not None:
            bad = set(self.factors) - {"alpha", "beta"}
            if bad:
                raise InvalidValue(f"unknown factor label keys {sorted(bad)}")
            object.__setattr__(self, "factors", dict(self.factors))
        for attr in ("levels", "responses"):
            mapping = getattr(self, attr)
            if mapping is None:
                continue
            bad = set(mapping) - set(_LEVEL_KEYS)
            if bad:
                raise InvalidValue(f"unknown level keys {sorted(bad)} in {attr}")
            if attr == "responses":
                fixed = {}
                for key, pair in mapping.items():
                    first, second = pair
                    if not first or not second:
                        raise InvalidValue(f"response alternatives for {key} must be nonempty")
                    fixed[key] = (str(first), str(second))
                object.__setattr__(self, attr, fixed)
            else:
                object.__setattr__(self, attr, dict(mapping))

    def response_pair(self, level: FactorLevel) -> Optional[tuple[str, str]]:
        if self.responses is None:
            return None
        return self.responses.get(level.key)


@dataclass(frozen=True)
class ExperimentData:
    """The four joint tables of one experiment, optionally with counts and labels.

    When ``counts`` are present each table must equal its count table
    normalized, unless ``independent_counts`` marks the probabilities as
    supplied separately from the counts (e.g. published rounded estimates
    alongside the sample size).
    """

    tables: Mapping[Treatment, JointTable]
    counts: Optional[Mapping[Treatment, CountTable]] = None
    labels: Optional[LabelSet] = None
    independent_counts: bool = False

    def __post_init__(self) -> None:
        found = set(self.tables)
        if found != set(TREATMENTS):
            missing = [t.key for t in TREATMENTS if t not in found]
            if missing:
                raise InvalidValue(f"missing treatments: {missing}")
            raise InvalidValue("tables must be keyed by the four treatments")
        object.__setattr__(self, "tables", {t: self.tables[t] for t in TREATMENTS})
        if self.counts is not None:
            extra = set(self.counts) - set(TREATMENTS)
            if extra:
                raise InvalidValue("counts keyed by unknown treatments")
            counts = {t: self.counts[t] for t in TREATMENTS if t in self.counts}
            if not counts:
                counts = None
            object.__setattr__(self, "counts", counts)
            if counts and not self.independent_counts:
                for t, ct in counts.items():
                    if ct.normalized() != self.tables[t]:
                        raise ConflictingData(
                            f"treatment {t.key}: counts normalize to "
                            f"{ct.normalized().cells()} but table says {self.tables[t].cells()}"
                        )

    def table(self, treatment: Treatment) -> JointTable:
        return self.tables[treatment]

    def count(self, treatment: Treatment) -> Optional[CountTable]:
        if self.counts is None:
            return None
        return self.counts.get(treatment)

    def has_full_counts(self) -> bool:
        return self.counts is not None and set(self.counts) == set(TREATMENTS)

    def expectations(self) -> dict[Treatment, Fraction]:
        return {t: tab.expectation() for t, tab in self.tables.items()}


def mix_experiments(first: ExperimentData, second: ExperimentData, lam: Rational) -> ExperimentData:
    """Treatment-wise convex combination lam*first + (1-lam)*second of the tables."""
    return ExperimentData(
        tables={t: first.table(t).mix(second.table(t), lam) for t in TREATMENTS}
    )


def _swap_pair(pair: Optional[tuple[str, str]]) -> Optional[tuple[str, str]]:
    return None if pair is None else (pair[1], pair[0])


def _transform(
    data: ExperimentData,
    table_fn,
    count_fn,
    key_map: Mapping[Treatment, Treatment],
    labels: Optional[LabelSet],
) -> ExperimentData:
    tables = {key_map[t]: table_fn(t, data.table(t)) for t in TREATMENTS}
    counts = None
    if data.counts is not None:
        counts = {
            key_map[t]: count_fn(t, ct)
            for t, ct in data.counts.items()
        }
    return ExperimentData(
        tables=tables,
        counts=counts,
        labels=labels,
        independent_counts=data.independent_counts,
    )


def flip_a_coding(data: ExperimentData, level: Optional[Level] = None) -> ExperimentData:
    """Recode A (+1 <-> -1) at one alpha level, or at both when level is None."""
    hit = lambda t: level is None or t.alpha.level is level
    labels = data.labels
    if labels is not None and labels.responses is not None:
        responses = dict(labels.responses)
        for lv, key in ((Level.FIRST, "a"), (Level.SECOND, "a'")):
            if (level is None or lv is level) and key in responses:
                responses[key] = _swap_pair(responses[key])
        labels = LabelSet(labels.factors, labels.levels, responses)
    return _transform(
        data,
        lambda t, tab: tab.flip_a() if hit(t) else tab,
        lambda t, ct: ct.flip_a() if hit(t) else ct,
        {t: t for t in TREATMENTS},
        labels,
    )


def flip_b_coding(data: ExperimentData, level: Optional[Level] = None) -> ExperimentData:
    """Recode B (+1 <-> -1) at one beta level, or at both when level is None."""
    hit = lambda t: level is None or t.beta.level is level
    labels = data.labels
    if labels is not None and labels.responses is not None:
        responses = dict(labels.responses)
        for lv, key in ((Level.FIRST, "b"), (Level.SECOND, "b'")):
            if (level is None or lv is level) and key in responses:
                responses[key] = _swap_pair(responses[key])
        labels = LabelSet(labels.factors, labels.levels, responses)
    return _transform(
        data,
        lambda t, tab: tab.flip_b() if hit(t) else tab,
        lambda t, ct: ct.flip_b() if hit(t) else ct,
        {t: t for t in TREATMENTS},
        labels,
    )


def _swap_level_labels(labels: Optional[LabelSet], first_key: str, second_key: str) -> Optional[LabelSet]:
    if labels is None:
        return None
    levels = None
    if labels.levels is not None:
        levels = dict(labels.levels)
        levels[first_key], levels[second_key] = (
            levels.get(second_key),
            levels.get(first_key),
        )
        levels = {k: v for k, v in levels.items() if v is not None}
    responses = None
    if labels.responses is not None:
        responses = dict(labels.responses)
        responses[first_key], responses[second_key] = (
            responses.get(second_key),
            responses.get(first_key),
        )
        responses = {k: v for k, v in responses.items() if v is not None}
    return LabelSet(labels.factors, levels, responses)


def swap_alpha_levels(data: ExperimentData) -> ExperimentData:
    """Exchange the roles of a and a' (relabel the alpha factor's levels)."""
    key_map = {
        t: Treatment(
            ALPHA_A if t.alpha.level is Level.SECOND else ALPHA_A_PRIME, t.beta
        )
        for t in TREATMENTS
    }
    return _transform(
        data,
        lambda t, tab: tab,
        lambda t, ct: ct,
        key_map,
        _swap_level_labels(data.labels, "a", "a'"),
    )


def swap_beta_levels(data: ExperimentData) -> ExperimentData:
    """Exchange the roles of b and b' (relabel the beta factor's levels)."""
    key_map = {
        t: Treatment(
            t.alpha, BETA_B if t.beta.level is Level.SECOND else BETA_B_PRIME
        )
        for t in TREATMENTS
    }
    return _transform(
        data,
        lambda t, tab: tab,
        lambda t, ct: ct,
        key_map,
        _swap_level_labels(data.labels, "b", "b'"),
    )
