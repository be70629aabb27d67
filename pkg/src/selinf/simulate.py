"""Synthetic experiments from latent models, reproducible across platforms.

Models
------
A selective model is just a hidden-state distribution: its tables are the
exact push-forward. A contaminated model mixes that push-forward, per
treatment, with a point mass on a fixed treatment-indexed outcome pair,
at rate eta; this is the simplest mechanism by which a response can leak
information about the other factor, and at eta = 0 it reduces to the
selective model.

Random number contract
----------------------
Sampling uses SplitMix64 so that any implementation, in any language, can
reproduce the counts bit-for-bit from (model, n, seed):

* state update: ``state = (state + 0x9E3779B97F4A7C15) mod 2^64``
* output: ``z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z = z ^ (z >> 31)``
  (all arithmetic mod 2^64).

Substreams: a root SplitMix64 stream seeded with the experiment seed emits
four values, one per treatment in the canonical order (a,b), (a,b'),
(a',b), (a',b'); each value seeds that treatment's own stream. Treatments
are therefore sampled independently and could run concurrently without
changing the result.

One draw from a table maps r = next_uint64() >> 11 (a 53-bit value) to the
first cell whose cumulative threshold exceeds r, thresholds being
ceil(cum * 2^53) over the fixed cell order pp, pm, mp, mm.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .errors import InvalidValue
from .feasibility import HiddenStateDistribution, predicted_tables
from .model import (
    CELLS,
    TREATMENTS,
    CountTable,
    ExperimentData,
    JointTable,
    Treatment,
    rational,
)

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """The SplitMix64 generator; 64-bit state, 64-bit outputs."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def next_53bits(self) -> int:
        return self.next_uint64() >> 11


def _cell_thresholds(table: JointTable) -> list[int]:
    """ceil(cumulative * 2^53) per cell; the last is exactly 2^53."""
    thresholds = []
    cum = Fraction(0)
    for p in table.cells():
        cum += p
        scaled = cum * (1 << 53)
        thresholds.append(-((-scaled.numerator) // scaled.denominator))
    return thresholds


def _draw_cell(gen: SplitMix64, thresholds: list[int]) -> int:
    r = gen.next_53bits()
    for k in range(4):
        if r < thresholds[k]:
            return k
    raise AssertionError("53-bit draw above the total-mass threshold")


@dataclass(frozen=True)
class SelectiveModel:
    """A latent model in which each response reads only its own factor."""

    hidden: HiddenStateDistribution


@dataclass(frozen=True)
class ContaminatedModel:
    """A selective core contaminated at rate eta by fixed cross-reading outcomes.

    ``cross_map`` gives, for every treatment, the outcome pair forced when
    contamination strikes; because it may vary with the full treatment, both
    responses can effectively read both factors through it.
    """

    hidden: HiddenStateDistribution
    eta: Fraction
    cross_map: Mapping[Treatment, tuple[int, int]]

    def __post_init__(self) -> None:
        eta = rational(self.eta)
        if not 0 <= eta <= 1:
            raise InvalidValue(f"eta must be in [0, 1], got {eta}")
        object.__setattr__(self, "eta", eta)
        if set(self.cross_map) != set(TREATMENTS):
            raise InvalidValue("cross_map must give an outcome pair for all four treatments")
        fixed = {}
        for t, pair in self.cross_map.items():
            pair = tuple(pair)
            if pair not in CELLS:
                raise InvalidValue(f"cross_map[{t.key}] = {pair!r} is not a +1/-1 pair")
            fixed[t] = pair
        object.__setattr__(self, "cross_map", fixed)


Model = Union[SelectiveModel, ContaminatedModel]


@dataclass(frozen=True)
class SampleSpec:
    """How much to sample and with which seed."""

    n_per_treatment: int
    seed: int

    def __post_init__(self) -> None:
        if not isinstance(self.n_per_treatment, int) or self.n_per_treatment < 1:
            raise InvalidValue(f"n_per_treatment must be a positive integer, got {self.n_per_treatment!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < (1 << 64):
            raise InvalidValue(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")


def model_tables(model: Model) -> ExperimentData:
    """The exact per-treatment joint tables a model generates."""
    if isinstance(model, SelectiveModel):
        return predicted_tables(model.hidden)
    if isinstance(model, ContaminatedModel):
        base = predicted_tables(model.hidden)
        eta = model.eta
        tables = {}
        for t in TREATMENTS:
            point = JointTable.point_mass(*model.cross_map[t])
            tables[t] = point.mix(base.table(t), eta)
        return ExperimentData(tables=tables)
    raise InvalidValue(f"unknown model type {type(model).__name__}")


def sample_counts(model: Model, spec: SampleSpec) -> ExperimentData:
    """Draw n observations per treatment; returns count-derived tables plus counts.

    Deterministic in (model, spec): same inputs give identical counts.
    """
    exact = model_tables(model)
    root = SplitMix64(spec.seed)
    substream_seeds = [root.next_uint64() for _ in TREATMENTS]
    tables = {}
    counts = {}
    for t, sub_seed in zip(TREATMENTS, substream_seeds):
        gen = SplitMix64(sub_seed)
        thresholds = _cell_thresholds(exact.table(t))
        tally = [0, 0, 0, 0]
        for _ in range(spec.n_per_treatment):
            tally[_draw_cell(gen, thresholds)] += 1
        counts[t] = CountTable(*tally)
        tables[t] = counts[t].normalized()
    return ExperimentData(tables=tables, counts=counts)
