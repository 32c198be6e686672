from typing import Dict, List, Tuple

from pydantic import Field, field_validator

from sftkit.models.base import SftModel
from sftkit.models.trees import DecoratedForest, DecoratedTree


class LevelFunction(SftModel):
    """Assignment of a positive level to every vertex."""
    levels: Dict[str, int]

    @field_validator("levels")
    @classmethod
    def _levels_positive(cls, value: Dict[str, int]) -> Dict[str, int]:
        for vertex_id, level in value.items():
            if level < 1:
                raise ValueError(f"level of {vertex_id} must be positive, got {level}")
        return value

    @property
    def size(self) -> int:
        return max(self.levels.values(), default=0)

    def level_sets(self) -> Dict[int, List[str]]:
        sets: Dict[int, List[str]] = {}
        for vertex_id, level in self.levels.items():
            sets.setdefault(level, []).append(vertex_id)
        return {k: sorted(v) for k, v in sorted(sets.items())}

    def vector(self) -> Tuple[int, ...]:
        """Level vector in vertex-id order, the canonical sort key."""
        return tuple(self.levels[v] for v in sorted(self.levels))

    def is_maximal(self) -> bool:
        return all(len(vs) == 1 for vs in self.level_sets().values())


class LeveledTree(SftModel):
    """A decorated tree together with a level function."""
    tree: DecoratedTree
    level: LevelFunction

    @property
    def size(self) -> int:
        return self.level.size


class LevelReport(SftModel):
    """Outcome of level-function validation."""
    valid: bool
    diagnostics: List[str] = Field(default_factory=list)


class LeveledForest(SftModel):
    """A decorated forest with one level function across all components."""
    forest: DecoratedForest
    level: LevelFunction
