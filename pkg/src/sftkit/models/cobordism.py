from typing import Dict, List, Optional, Tuple

from pydantic import Field, field_validator

from sftkit.models.base import SftModel
from sftkit.models.levels import LevelFunction
from sftkit.models.trees import Contraction, DecoratedTree
from sftkit.utils.rationals import Rational


def _check_star_map(value: Dict[str, int]) -> Dict[str, int]:
    for key, star in value.items():
        if star not in (0, 1):
            raise ValueError(f"star label of {key} must be 0 or 1, got {star}")
    return value


class CobordismTree(SftModel):
    """Decorated tree whose vertices and internal edges say which piece of the cobordism they map to.

    0 stands for the positive end, 1 for the negative end; a vertex labeled (0, 1)
    lies in the cobordism itself.
    """
    tree: DecoratedTree
    edge_star: Dict[str, int] = Field(default_factory=dict)
    vertex_star_plus: Dict[str, int] = Field(default_factory=dict, alias="vstar_plus")
    vertex_star_minus: Dict[str, int] = Field(default_factory=dict, alias="vstar_minus")

    @field_validator("edge_star", "vertex_star_plus", "vertex_star_minus")
    @classmethod
    def _stars_binary(cls, value: Dict[str, int]) -> Dict[str, int]:
        return _check_star_map(value)

    def vertex_type(self, vertex_id: str) -> Tuple[int, int]:
        return self.vertex_star_plus[vertex_id], self.vertex_star_minus[vertex_id]

    def vertices_of_type(self, star_plus: int, star_minus: int) -> List[str]:
        return sorted(
            v for v in self.tree.vertex_ids() if self.vertex_type(v) == (star_plus, star_minus)
        )


class CobordismReport(SftModel):
    """Outcome of cobordism tree validation."""
    valid: bool
    stable: bool
    diagnostics: List[str] = Field(default_factory=list)


class LeveledCobordismTree(SftModel):
    """Cobordism tree with a level function and the distinguished cobordism level."""
    cob: CobordismTree
    level: LevelFunction
    cob_level: int = Field(ge=1)


class CobordismLevels(SftModel):
    """Maximally leveled cobordism trees on a fixed cobordism tree."""
    leveled: List[LeveledCobordismTree] = Field(default_factory=list)
    note: Optional[str] = None

    @property
    def count(self) -> int:
        return len(self.leveled)


class StarLabels(SftModel):
    """Vertex star labels produced by degree divisibility."""
    vertex_star_plus: Dict[str, int] = Field(alias="vstar_plus")
    vertex_star_minus: Dict[str, int] = Field(alias="vstar_minus")


class GluingEquation(SftModel):
    """g_vertex = g_edge + g_child, where a missing child reads as 0."""
    vertex: str
    edge: str
    child: Optional[str] = None

    def render(self) -> str:
        rhs = f"g[{self.edge}]" + (f" + g[{self.child}]" if self.child else "")
        return f"g[{self.vertex}] = {rhs}"


class GluingConstraintSystem(SftModel):
    """Gluing parameters: one per internal edge, one per (0, 0)-vertex."""
    edge_variables: List[str] = Field(default_factory=list)
    vertex_variables: List[str] = Field(default_factory=list)
    equations: List[GluingEquation] = Field(default_factory=list)


class GluingAssignment(SftModel):
    """Values of the gluing parameters; None stands for infinity."""
    edges: Dict[str, Optional[Rational]] = Field(default_factory=dict)
    vertices: Dict[str, Optional[Rational]] = Field(default_factory=dict)


class CobordismContraction(SftModel):
    """A contraction of cobordism trees with the induced star labels on the target."""
    contraction: Contraction
    target: CobordismTree
    flipped: List[str] = Field(default_factory=list)
    report: CobordismReport


class GluingStratum(SftModel):
    """The stratum a gluing assignment lands in."""
    contracted_edges: List[str] = Field(default_factory=list)
    flipped_vertices: List[str] = Field(default_factory=list)
    result: CobordismContraction
