from typing import Any, Dict, List, Literal, Optional

from pydantic import Field

from sftkit.models.base import SftModel
from sftkit.models.counts import CountTable
from sftkit.models.flows import Breaking
from sftkit.models.orbits import OrbitUniverse
from sftkit.models.trees import DecoratedTree
from sftkit.utils.rationals import Rational

SCHEMA_VERSION = 1


class TreeEntry(SftModel):
    """A named tree; the star maps make it a cobordism tree."""
    name: str
    tree: DecoratedTree
    edge_star: Optional[Dict[str, int]] = None
    vertex_star_plus: Optional[Dict[str, int]] = Field(default=None, alias="vstar_plus")
    vertex_star_minus: Optional[Dict[str, int]] = Field(default=None, alias="vstar_minus")

    @property
    def is_cobordism(self) -> bool:
        return self.vertex_star_plus is not None and self.vertex_star_minus is not None


class ProjectOptions(SftModel):
    cutoff_action: Optional[Rational] = None
    cutoff_length: Optional[int] = Field(default=None, ge=0)
    p: Optional[int] = Field(default=None, ge=1)
    p_plus: Optional[int] = None
    p_minus: Optional[int] = None
    n: Optional[int] = Field(default=None, ge=1)


class ProjectInput(SftModel):
    """One self-contained input file."""
    schema_version: Literal[1] = SCHEMA_VERSION
    universe: OrbitUniverse
    trees: List[TreeEntry] = Field(default_factory=list)
    counts: Optional[CountTable] = None
    breakings: Optional[List[Breaking]] = None
    options: ProjectOptions = Field(default_factory=ProjectOptions)

    def tree_names(self) -> List[str]:
        return [entry.name for entry in self.trees]

    def tree(self, name: Optional[str] = None) -> TreeEntry:
        """The named tree, or the only one when no name is given."""
        if name is None:
            if len(self.trees) != 1:
                raise KeyError(f"choose a tree among {', '.join(self.tree_names()) or 'none'}")
            return self.trees[0]
        for entry in self.trees:
            if entry.name == name:
                return entry
        raise KeyError(name)


class CommandReport(SftModel):
    """What a command produced: a JSON payload, table rows and optional DOT text."""
    command: str
    payload: Dict[str, Any] = Field(default_factory=dict)
    columns: List[str] = Field(default_factory=list)
    rows: List[List[str]] = Field(default_factory=list)
    dot: Optional[str] = None


class CommandParams(SftModel):
    """Per-invocation parameters; unset values fall back to the project options."""
    tree: Optional[str] = None
    cutoff_action: Optional[Rational] = None
    cutoff_length: Optional[int] = Field(default=None, ge=0)
    p: Optional[int] = Field(default=None, ge=1)
    p_plus: Optional[int] = None
    p_minus: Optional[int] = None
    n: Optional[int] = None
    side: int = Field(default=5, ge=1)
    minus: List[str] = Field(default_factory=list)
    plus: List[str] = Field(default_factory=list)
    partition: Optional[List[int]] = None
    depth: int = Field(default=1, ge=1)
    max_length: Optional[int] = Field(default=None, ge=0)


class CheckResult(SftModel):
    name: str
    passed: bool
    trials: int
    failures: List[str] = Field(default_factory=list)


class SelftestReport(SftModel):
    seed: int
    trials: int
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)
