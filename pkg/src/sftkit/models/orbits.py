from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional

from pydantic import Field, field_validator, model_validator

from sftkit.models.base import SftModel
from sftkit.utils.rationals import Rational


class Parity(str, Enum):
    """Z/2 grading of a Reeb orbit."""
    EVEN = "even"
    ODD = "odd"

    @property
    def bit(self) -> int:
        return 1 if self is Parity.ODD else 0


class ReebOrbit(SftModel):
    """A Reeb orbit identified by an opaque id."""
    id: str
    action: Rational
    approx_action: Optional[Rational] = None  # integral after rescaling
    multiplicity: int = 1
    cz_index: Optional[int] = Field(default=None, alias="cz")
    parity: Parity = Parity.EVEN  # declared, never derived
    simple_id: Optional[str] = None  # underlying simple orbit
    odd_neg_eigenvalues: bool = False  # flag carried by the simple orbit

    @field_validator("action")
    @classmethod
    def _action_positive(cls, value: Fraction) -> Fraction:
        if value <= 0:
            raise ValueError(f"action must be positive, got {value}")
        return value

    @field_validator("approx_action")
    @classmethod
    def _approx_positive(cls, value: Optional[Fraction]) -> Optional[Fraction]:
        if value is not None and value <= 0:
            raise ValueError(f"approx_action must be positive, got {value}")
        return value

    @field_validator("multiplicity")
    @classmethod
    def _multiplicity_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"multiplicity must be at least 1, got {value}")
        return value

    @model_validator(mode="before")
    @classmethod
    def _default_simple_id(cls, data: Any) -> Any:
        # A missing simple id means the orbit is its own simple orbit
        if isinstance(data, dict) and data.get("simple_id") is None:
            data = {**data, "simple_id": data.get("id")}
        return data

    @model_validator(mode="after")
    def _simple_orbit_consistency(self) -> "ReebOrbit":
        if self.multiplicity == 1 and self.simple_id != self.id:
            raise ValueError(
                f"orbit {self.id} has multiplicity 1 but simple_id {self.simple_id}"
            )
        if self.multiplicity > 1 and self.simple_id == self.id:
            raise ValueError(f"orbit {self.id} is a multiple cover of itself")
        return self

    @property
    def parity_bit(self) -> int:
        return self.parity.bit


class OrbitUniverse(SftModel):
    """The finite set of orbits of action at most L that a project works with."""
    action_bound: Rational = Field(alias="L")
    orbits: List[ReebOrbit] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_references(self) -> "OrbitUniverse":
        ids = [orbit.id for orbit in self.orbits]
        duplicates = sorted({i for i in ids if ids.count(i) > 1})
        if duplicates:
            raise ValueError(f"duplicate orbit ids: {', '.join(duplicates)}")
        known = set(ids)
        for orbit in self.orbits:
            if orbit.simple_id not in known:
                raise ValueError(
                    f"orbit {orbit.id} references unknown simple orbit {orbit.simple_id}"
                )
        return self

    def by_id(self) -> Dict[str, ReebOrbit]:
        return {orbit.id: orbit for orbit in self.orbits}

    def get(self, orbit_id: str) -> ReebOrbit:
        for orbit in self.orbits:
            if orbit.id == orbit_id:
                return orbit
        raise KeyError(orbit_id)

    def has(self, orbit_id: str) -> bool:
        return any(orbit.id == orbit_id for orbit in self.orbits)

    def within_bound(self) -> List[ReebOrbit]:
        """Orbits of action at most L."""
        return [orbit for orbit in self.orbits if orbit.action <= self.action_bound]
