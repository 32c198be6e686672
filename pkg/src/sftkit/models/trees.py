from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional

from pydantic import Field, field_validator

from sftkit.models.base import SftModel
from sftkit.utils.rationals import Rational


class Direction(str, Enum):
    """Direction of an exterior edge relative to its vertex."""
    IN = "in"  # positive puncture
    OUT = "out"  # negative puncture


def edge_key(source: str, target: str) -> str:
    return f"{source}->{target}"


class TreeVertex(SftModel):
    """A vertex with its energy tag standing in for the relative class."""
    id: str
    degree: Rational = Fraction(0)

    @field_validator("degree")
    @classmethod
    def _degree_nonnegative(cls, value: Fraction) -> Fraction:
        if value < 0:
            raise ValueError(f"degree tag must be nonnegative, got {value}")
        return value


class InternalEdge(SftModel):
    """Interior edge, stored from its positive end to its negative end."""
    source: str = Field(alias="from")
    target: str = Field(alias="to")
    orbit: str

    @property
    def key(self) -> str:
        return edge_key(self.source, self.target)


class ExteriorEdge(SftModel):
    """Exterior edge (puncture) attached to a vertex."""
    vertex: str
    direction: Direction = Field(alias="dir")
    orbit: str


class DecoratedTree(SftModel):
    """Directed tree with orbit-labeled edges and degree-labeled vertices."""
    vertices: List[TreeVertex]
    internal_edges: List[InternalEdge] = Field(default_factory=list)
    exterior_edges: List[ExteriorEdge] = Field(default_factory=list)

    def vertex_ids(self) -> List[str]:
        return [v.id for v in self.vertices]

    def degrees(self) -> Dict[str, Fraction]:
        return {v.id: v.degree for v in self.vertices}

    def edge_keys(self) -> List[str]:
        return [e.key for e in self.internal_edges]

    def edges_by_key(self) -> Dict[str, InternalEdge]:
        return {e.key: e for e in self.internal_edges}

    def exterior_at(self, vertex_id: str) -> List[ExteriorEdge]:
        return [e for e in self.exterior_edges if e.vertex == vertex_id]

    def inputs_at(self, vertex_id: str) -> List[ExteriorEdge]:
        return [e for e in self.exterior_at(vertex_id) if e.direction is Direction.IN]

    def outputs_at(self, vertex_id: str) -> List[ExteriorEdge]:
        return [e for e in self.exterior_at(vertex_id) if e.direction is Direction.OUT]

    def parents(self, vertex_id: str) -> List[str]:
        return [e.source for e in self.internal_edges if e.target == vertex_id]

    def children(self, vertex_id: str) -> List[str]:
        return [e.target for e in self.internal_edges if e.source == vertex_id]

    def valence(self, vertex_id: str) -> int:
        """Number of special points |D_v|: adjacent interior and exterior edges."""
        interior = sum(
            1 for e in self.internal_edges if vertex_id in (e.source, e.target)
        )
        return interior + len(self.exterior_at(vertex_id))

    def positive_orbits(self) -> List[str]:
        return [e.orbit for e in self.exterior_edges if e.direction is Direction.IN]

    def negative_orbits(self) -> List[str]:
        return [e.orbit for e in self.exterior_edges if e.direction is Direction.OUT]

    def total_degree(self) -> Fraction:
        return sum((v.degree for v in self.vertices), Fraction(0))


class DecoratedForest(SftModel):
    """A nonempty list of decorated trees with globally unique vertex ids."""
    components: List[DecoratedTree] = Field(min_length=1)

    @field_validator("components")
    @classmethod
    def _unique_vertex_ids(cls, value: List[DecoratedTree]) -> List[DecoratedTree]:
        seen: set = set()
        for component in value:
            for vertex_id in component.vertex_ids():
                if vertex_id in seen:
                    raise ValueError(f"vertex id {vertex_id} repeats across components")
                seen.add(vertex_id)
        return value


class Contraction(SftModel):
    """A morphism of decorated trees collapsing a set of interior edges."""
    source: DecoratedTree
    target: DecoratedTree
    edge_map: Dict[str, Optional[str]]  # None marks a collapsed edge
    vertex_map: Dict[str, str]

    def collapsed(self) -> List[str]:
        return sorted(k for k, v in self.edge_map.items() if v is None)


class TreeReport(SftModel):
    """Outcome of tree validation."""
    valid: bool
    is_tree: bool
    labels_ok: bool
    stable: bool
    trivial_vertices: List[str] = Field(default_factory=list)
    diagnostics: List[str] = Field(default_factory=list)
