from typing import Dict, List, Optional, Tuple

from pydantic import Field

from sftkit.models.base import SftModel
from sftkit.models.levels import LeveledForest, LeveledTree


class FaceElement(SftModel):
    """One element of a face poset."""
    index: int
    rank: int
    name: str
    generators: List[List[int]] = Field(default_factory=list)
    collapsed: List[str] = Field(default_factory=list)
    facets: List[str] = Field(default_factory=list)
    leveled: Optional[LeveledTree] = None
    forest: Optional[LeveledForest] = None


class FacePoset(SftModel):
    """Finite poset given by its elements and cover relations (i covered by j)."""
    elements: List[FaceElement] = Field(default_factory=list)
    covers: List[Tuple[int, int]] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.elements)

    def rank_counts(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for element in self.elements:
            counts[element.rank] = counts.get(element.rank, 0) + 1
        return dict(sorted(counts.items()))

    def maximal(self) -> List[int]:
        below = {i for i, _ in self.covers}
        return [e.index for e in self.elements if e.index not in below]

    def minimal(self) -> List[int]:
        above = {j for _, j in self.covers}
        return [e.index for e in self.elements if e.index not in above]
