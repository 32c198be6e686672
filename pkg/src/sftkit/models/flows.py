from typing import Dict, List, Optional, Tuple

from pydantic import Field, model_validator

from sftkit.models.base import SftModel


class OrbitSequence(SftModel):
    """An ordered list of orbit ids; the list order is the symmetric-set order."""
    orbits: List[str] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.orbits)

    def key(self) -> Tuple[str, ...]:
        return tuple(self.orbits)

    def multiset(self) -> Tuple[str, ...]:
        return tuple(sorted(self.orbits))

    def render(self) -> str:
        return "(" + ",".join(self.orbits) + ")"


class Partition(SftModel):
    """Λ: positions of Γ- to positions of Γ+, stored as the list of images."""
    assignment: List[int] = Field(default_factory=list)
    targets: int

    @model_validator(mode="after")
    def _total(self) -> "Partition":
        for image in self.assignment:
            if not 0 <= image < self.targets:
                raise ValueError(f"image {image} outside 0..{self.targets - 1}")
        return self

    def fiber(self, position: int) -> List[int]:
        return [i for i, image in enumerate(self.assignment) if image == position]

    def fibers(self) -> List[List[int]]:
        return [self.fiber(j) for j in range(self.targets)]

    def compose(self, after: "Partition") -> "Partition":
        """after ∘ self."""
        return Partition(assignment=[after.assignment[i] for i in self.assignment], targets=after.targets)

    def key(self) -> Tuple[int, ...]:
        return tuple(self.assignment)


class Breaking(SftModel):
    """A declared connected breaking γ ⇝ Γ."""
    positive: str
    negative: List[str] = Field(default_factory=list)

    def key(self) -> Tuple[str, Tuple[str, ...]]:
        return self.positive, tuple(sorted(self.negative))


class StratumLabel(SftModel):
    """Γ- = Γ0 → Γ1 → ... → Γk+1 = Γ+ with one partition per arrow."""
    sequences: List[OrbitSequence]
    partitions: List[Partition]

    @model_validator(mode="after")
    def _shape(self) -> "StratumLabel":
        if len(self.sequences) != len(self.partitions) + 1:
            raise ValueError("a stratum needs exactly one partition between consecutive sequences")
        for i, partition in enumerate(self.partitions):
            if len(partition.assignment) != len(self.sequences[i]):
                raise ValueError(f"partition {i} does not start at sequence {i}")
            if partition.targets != len(self.sequences[i + 1]):
                raise ValueError(f"partition {i} does not end at sequence {i + 1}")
        return self

    @property
    def codimension(self) -> int:
        return len(self.sequences) - 2

    def composite(self) -> Partition:
        result = Partition(assignment=list(range(len(self.sequences[0]))), targets=len(self.sequences[0]))
        for partition in self.partitions:
            result = result.compose(partition)
        return result

    def key(self) -> Tuple[Tuple[Tuple[str, ...], ...], Tuple[Tuple[int, ...], ...]]:
        return (
            tuple(s.key() for s in self.sequences),
            tuple(p.key() for p in self.partitions),
        )

    def render(self) -> str:
        parts = [self.sequences[0].render()]
        for partition, sequence in zip(self.partitions, self.sequences[1:]):
            parts.append(f"-{list(partition.assignment)}-> {sequence.render()}")
        return " ".join(parts)


class NormEntry(SftModel):
    lower: List[str]
    upper: List[str]
    norm: int


class PrecedenceReport(SftModel):
    """The precedence DAG on sorted sequences and the norm of every comparable pair."""
    nodes: List[List[str]] = Field(default_factory=list)
    relations: List[Tuple[List[str], List[str]]] = Field(default_factory=list)
    norms: List[NormEntry] = Field(default_factory=list)

    def norm(self, lower: List[str], upper: List[str]) -> Optional[int]:
        """None stands for -∞: lower does not precede upper."""
        lookup: Dict[Tuple[Tuple[str, ...], Tuple[str, ...]], int] = {
            (tuple(e.lower), tuple(e.upper)): e.norm for e in self.norms
        }
        return lookup.get((tuple(sorted(lower)), tuple(sorted(upper))))

    def precedes(self, lower: List[str], upper: List[str]) -> bool:
        return self.norm(lower, upper) is not None
