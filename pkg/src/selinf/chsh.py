"""CHSH statistic over the eight odd-plus sign patterns, with bound classification.

The statistic is the maximum of the signed sums s1*E_ab + s2*E_ab' + s3*E_a'b
+ s4*E_a'b' over sign vectors with an odd number of plus signs. Any model in
which each response depends only on its own factor and shared randomness keeps
it at or below 2; quantum models reach 2*sqrt(2); the algebraic ceiling is 4.
Comparisons against 2*sqrt(2) are done as gamma^2 vs 8 in exact rationals.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import InvalidPattern
from .model import TREATMENTS, ExperimentData, Treatment


@dataclass(frozen=True)
class SignPattern:
    """Signs applied to (E_ab, E_ab', E_a'b, E_a'b'); the plus count must be odd."""

    signs: tuple[int, int, int, int]

    def __post_init__(self) -> None:
        signs = tuple(self.signs)
        if len(signs) != 4 or any(s not in (1, -1) for s in signs):
            raise InvalidPattern(f"signs must be four values in {{+1, -1}}, got {signs!r}")
        if sum(s == 1 for s in signs) % 2 == 0:
            raise InvalidPattern(f"pattern {signs!r} has an even number of plus signs")
        object.__setattr__(self, "signs", signs)

    @classmethod
    def of(cls, s1: int, s2: int, s3: int, s4: int) -> "SignPattern":
        return cls((s1, s2, s3, s4))

    @classmethod
    def from_string(cls, text: str) -> "SignPattern":
        if len(text) != 4 or set(text) - {"+", "-"}:
            raise InvalidPattern(f"pattern string must be four of +/-, got {text!r}")
        return cls(tuple(1 if ch == "+" else -1 for ch in text))

    def negated(self) -> "SignPattern":
        return SignPattern(tuple(-s for s in self.signs))

    def __str__(self) -> str:
        return "".join("+" if s == 1 else "-" for s in self.signs)


# All valid patterns, in lexicographic order over sign tuples with +1 before -1.
SIGN_PATTERNS: tuple[SignPattern, ...] = tuple(
    SignPattern(signs)
    for signs in itertools.product((1, -1), repeat=4)
    if sum(s == 1 for s in signs) % 2 == 1
)


class BoundClassification(enum.Enum):
    CLASSICAL_BOUND_SATISFIED = "classical-bound-satisfied"  # gamma <= 2
    QUANTUM_REGION = "quantum-region"  # 2 < gamma <= 2*sqrt(2)
    SUPRA_QUANTUM = "supra-quantum"  # gamma > 2*sqrt(2)


def classify_gamma(gamma: Fraction) -> BoundClassification:
    """Exact classification; the 2*sqrt(2) comparison is gamma^2 vs 8."""
    if gamma <= 2:
        return BoundClassification.CLASSICAL_BOUND_SATISFIED
    if gamma * gamma <= 8:
        return BoundClassification.QUANTUM_REGION
    return BoundClassification.SUPRA_QUANTUM


@dataclass(frozen=True)
class ChshReport:
    """Per-treatment expectations, all eight signed sums, and their maximum."""

    expectations: Mapping[Treatment, Fraction]
    sums: Mapping[SignPattern, Fraction]
    gamma: Fraction
    argmax_patterns: frozenset[SignPattern]
    classification: BoundClassification

    def gamma_decimal(self, places: int = 3) -> str:
        """Gamma rounded half-up to ``places`` decimal places, as a string."""
        if places < 0:
            raise ValueError("places must be nonnegative")
        q = 10**places
        scaled = math.floor(self.gamma * q + Fraction(1, 2))
        if places == 0:
            return str(scaled)
        return f"{scaled // q}.{scaled % q:0{places}d}"


def chsh_facet_value(data: ExperimentData, pattern: SignPattern) -> Fraction:
    """The signed sum of the four product expectations for one pattern."""
    if not isinstance(pattern, SignPattern):
        pattern = SignPattern(tuple(pattern))
    return sum(
        (s * data.table(t).expectation() for s, t in zip(pattern.signs, TREATMENTS)),
        Fraction(0),
    )


def compute_gamma(data: ExperimentData) -> ChshReport:
    """Evaluate all eight signed sums and report the maximum with its achievers."""
    expectations = data.expectations()
    values = [expectations[t] for t in TREATMENTS]
    sums = {
        p: sum((s * e for s, e in zip(p.signs, values)), Fraction(0))
        for p in SIGN_PATTERNS
    }
    gamma = max(sums.values())
    argmax = frozenset(p for p, v in sums.items() if v == gamma)
    return ChshReport(
        expectations=expectations,
        sums=sums,
        gamma=gamma,
        argmax_patterns=argmax,
        classification=classify_gamma(gamma),
    )
