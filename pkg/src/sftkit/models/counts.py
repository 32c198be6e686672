from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from pydantic import Field, field_validator

from sftkit.models.base import SftModel
from sftkit.utils.rationals import Rational


class CountEntry(SftModel):
    """A weighted count of rigid curves from one positive orbit to a multiset of negative orbits."""
    positive: str
    negative: List[str] = Field(default_factory=list)
    value: Rational
    vdim: Optional[int] = None
    c1: Optional[int] = None

    @field_validator("value")
    @classmethod
    def _nonzero(cls, value: Fraction) -> Fraction:
        if value == 0:
            raise ValueError("count values must be nonzero")
        return value

    @property
    def key(self) -> Tuple[str, Tuple[str, ...]]:
        return self.positive, tuple(sorted(self.negative))


class CountTable(SftModel):
    counts: List[CountEntry] = Field(default_factory=list)

    def entries(self) -> Dict[Tuple[str, Tuple[str, ...]], Fraction]:
        return {entry.key: entry.value for entry in self.counts}


class CountReport(SftModel):
    valid: bool
    diagnostics: List[str] = Field(default_factory=list)


class Term(SftModel):
    """One word of a chain with its coefficient."""
    word: List[str]
    value: Rational


class GeneratorBoundary(SftModel):
    orbit: str
    terms: List[Term] = Field(default_factory=list)


class MatrixEntry(SftModel):
    row: int
    column: int
    value: Rational


class TruncatedTerm(SftModel):
    """A differential term whose target word lies outside the truncated basis."""
    source: List[str]
    target: List[str]
    value: Rational


class RationalComplex(SftModel):
    """Truncated chain complex: basis words, their parities and the sparse differential."""
    basis: List[List[str]]
    parity: List[int]
    action: List[Rational]
    entries: List[MatrixEntry] = Field(default_factory=list)
    truncated: List[TruncatedTerm] = Field(default_factory=list)
    orbit_parities: Dict[str, int] = Field(default_factory=dict)
    orbit_actions: Dict[str, Rational] = Field(default_factory=dict)
    boundaries: List[GeneratorBoundary] = Field(default_factory=list)

    def dimensions(self) -> Tuple[int, int]:
        even = sum(1 for p in self.parity if p == 0)
        return even, len(self.parity) - even


class BoundaryFailure(SftModel):
    word: List[str]
    target: List[str]
    value: Rational


class BoundaryReport(SftModel):
    """Outcome of the ∂∘∂ check; inconclusive entries come from truncation."""
    success: bool
    failures: List[BoundaryFailure] = Field(default_factory=list)
    inconclusive: List[BoundaryFailure] = Field(default_factory=list)


class HomologyRanks(SftModel):
    dim_even: int
    dim_odd: int
    rank_even: int  # rank of ∂ on even words
    rank_odd: int  # rank of ∂ on odd words
    rank_d: int
    betti_even: int
    betti_odd: int
    truncated_terms: int = 0
