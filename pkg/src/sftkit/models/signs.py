from typing import List

from pydantic import Field, field_validator

from sftkit.models.base import SftModel


class OrientationLine(SftModel):
    """A formal graded Z/2-torsor: a named generator in an integer degree."""
    label: str
    degree: int = 0
    dual: bool = False

    @property
    def effective_degree(self) -> int:
        return -self.degree if self.dual else self.degree

    def dualize(self) -> "OrientationLine":
        return OrientationLine(label=self.label, degree=self.degree, dual=not self.dual)

    def render(self) -> str:
        return f"o({self.label})" + ("^v" if self.dual else "")


class LineWord(SftModel):
    """Ordered tensor product of orientation lines with an accumulated sign."""
    factors: List[OrientationLine] = Field(default_factory=list)
    sign: int = 1

    @field_validator("sign")
    @classmethod
    def _unit(cls, value: int) -> int:
        if value not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {value}")
        return value

    @property
    def degree(self) -> int:
        return sum(f.effective_degree for f in self.factors)

    def labels(self) -> List[str]:
        return [f.render() for f in self.factors]

    def render(self) -> str:
        body = " ".join(self.labels()) or "1"
        return ("-" if self.sign < 0 else "") + body
