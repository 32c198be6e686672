from typing import List, Optional, Tuple

from pydantic import Field, field_validator, model_validator
from sympy import Matrix

from sftkit.models.base import SftModel
from sftkit.models.levels import LevelFunction
from sftkit.utils.rationals import Rational


class FreeMonoid(SftModel):
    """Monoid freely generated by nonnegative integer vectors in a fixed coordinate system."""
    coordinates: List[str]
    generators: List[List[int]] = Field(default_factory=list)

    @field_validator("generators")
    @classmethod
    def _nonnegative(cls, value: List[List[int]]) -> List[List[int]]:
        for generator in value:
            if any(entry < 0 for entry in generator):
                raise ValueError(f"generator {generator} has a negative entry")
        return value

    @model_validator(mode="after")
    def _ambient_dimension(self) -> "FreeMonoid":
        for generator in self.generators:
            if len(generator) != len(self.coordinates):
                raise ValueError(
                    f"generator {generator} does not live in rank {len(self.coordinates)}"
                )
        return self

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def matrix(self) -> Matrix:
        """Generator matrix with generators as columns."""
        if not self.generators:
            return Matrix.zeros(self.dimension, 0)
        return Matrix(self.generators).T

    def canonical(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(sorted(tuple(g) for g in self.generators))


class Refinement(SftModel):
    """A collection of maximal cones subdividing a base cone."""
    base: FreeMonoid
    maximal_cones: List[FreeMonoid] = Field(default_factory=list)
    levels: List[LevelFunction] = Field(default_factory=list)  # level function of each cone, if any


class SmoothnessCertificate(SftModel):
    """Result of checking a refinement: determinants, and a witness when it fails."""
    smooth: bool
    determinants: List[int] = Field(default_factory=list)
    counterexample: Optional[List[Rational]] = None
    diagnostics: List[str] = Field(default_factory=list)


class CoverageReport(SftModel):
    """Integer-point sampling of a refinement over a box in the base cone."""
    side: int
    points_checked: int
    uncovered: List[List[int]] = Field(default_factory=list)
    overlaps: List[List[int]] = Field(default_factory=list)  # points in two cones off a common face

    @property
    def ok(self) -> bool:
        return not self.uncovered and not self.overlaps
