from typing import List

from pydantic import Field

from sftkit.models.base import SftModel


class IndexData(SftModel):
    """Input of the Fredholm index formula for one curve."""
    n: int = Field(ge=1)  # dim Y = 2n - 1
    euler_char: int = 2
    c1: int = 0
    cz_plus: List[int] = Field(default_factory=list)
    cz_minus: List[int] = Field(default_factory=list)
    domain_dimension: int = 0
    cobordism: bool = False  # no translation quotient in a cobordism


class IndexResult(SftModel):
    index: int
    vdim: int


class NodeSide(SftModel):
    """Data of one component at a separating node."""
    degree: int
    plus_weights: List[int] = Field(default_factory=list)
    minus_weights: List[int] = Field(default_factory=list)
    omega_degree: int = 0


class NodeType(SftModel):
    """Type 0 nodes have d_x = 0; type 1 nodes carry the order |d_x|."""
    node_type: int
    order: int
    d_x: int


class ApproximationReport(SftModel):
    valid: bool
    diagnostics: List[str] = Field(default_factory=list)
