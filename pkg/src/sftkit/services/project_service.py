import json
import logging
from pathlib import Path
from typing import Any, List, Optional, Union

from pydantic import BaseModel, ValidationError

from sftkit.cobordism import cobordism_tree_from_labels, validate_cobordism_tree
from sftkit.config import config
from sftkit.exceptions import InputValidationError
from sftkit.homology import validate_counts
from sftkit.models.cobordism import CobordismTree
from sftkit.models.project import ProjectInput, TreeEntry
from sftkit.trees import validate_tree

logger = logging.getLogger(__name__)


def _pointer(location: tuple) -> str:
    return "/" + "/".join(str(part) for part in location)


class ProjectService:
    """Loads, validates and writes project files."""

    def load_input(self, path: Union[str, Path]) -> ProjectInput:
        """Parse and fully validate one input file."""
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise InputValidationError(f"cannot read {path}: {e}")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputValidationError(f"{path} is not valid JSON: {e.msg} at line {e.lineno}", pointer="")
        project = self.parse(data)
        logger.info(
            f"loaded {path}: {len(project.universe.orbits)} orbits, {len(project.trees)} trees"
        )
        return project

    def parse(self, data: Any) -> ProjectInput:
        """Validate a decoded JSON document against the schema and all cross-references."""
        try:
            project = ProjectInput.model_validate(data)
        except ValidationError as e:
            diagnostics = [f"{_pointer(err['loc'])}: {err['msg']}" for err in e.errors()]
            first = _pointer(e.errors()[0]["loc"]) if e.errors() else None
            raise InputValidationError("input does not match the schema", pointer=first, diagnostics=diagnostics)
        self.validate(project)
        return project

    def validate(self, project: ProjectInput) -> None:
        diagnostics: List[str] = []
        names = project.tree_names()
        for name in sorted({n for n in names if names.count(n) > 1}):
            diagnostics.append(f"/trees: duplicate tree name {name}")

        for position, entry in enumerate(project.trees):
            report = validate_tree(entry.tree, project.universe)
            if not report.valid:
                diagnostics += [f"/trees/{position}/tree: {d}" for d in report.diagnostics]
                continue
            if entry.is_cobordism:
                try:
                    cob = self.cobordism(entry)
                except (ValidationError, KeyError) as e:
                    diagnostics.append(f"/trees/{position}: bad star labels: {e}")
                    continue
                cob_report = validate_cobordism_tree(cob)
                diagnostics += [f"/trees/{position}: {d}" for d in cob_report.diagnostics]
            elif entry.edge_star is not None:
                diagnostics.append(f"/trees/{position}: edge_star given without vstar_plus and vstar_minus")

        if project.counts is not None:
            count_report = validate_counts(project.universe, project.counts, project.options.n)
            diagnostics += [d.replace("/counts", "/counts/counts", 1) for d in count_report.diagnostics]

        for position, breaking in enumerate(project.breakings or []):
            for orbit_id in [breaking.positive] + list(breaking.negative):
                if not project.universe.has(orbit_id):
                    diagnostics.append(f"/breakings/{position}: unknown orbit {orbit_id}")

        if diagnostics:
            pointer = diagnostics[0].split(":", 1)[0]
            raise InputValidationError("input failed validation", pointer=pointer, diagnostics=diagnostics)

    def cobordism(self, entry: TreeEntry) -> Optional[CobordismTree]:
        """The cobordism tree of an entry, deriving edge stars when they are not given."""
        if not entry.is_cobordism:
            return None
        if entry.edge_star is None:
            return cobordism_tree_from_labels(entry.tree, entry.vertex_star_plus, entry.vertex_star_minus)
        return CobordismTree(
            tree=entry.tree,
            edge_star=entry.edge_star,
            vertex_star_plus=entry.vertex_star_plus,
            vertex_star_minus=entry.vertex_star_minus,
        )

    def dump(self, value: Union[BaseModel, Any], indent: Optional[int] = None) -> str:
        """Serialize a model or plain JSON value with exact rationals as strings."""
        if isinstance(value, BaseModel):
            value = value.model_dump(mode="json", by_alias=True, exclude_none=True)
        return json.dumps(value, indent=config.output.json_indent if indent is None else indent, ensure_ascii=False)

    def write(self, value: Union[BaseModel, Any], path: Union[str, Path]) -> None:
        Path(path).write_text(self.dump(value) + "\n", encoding="utf-8")
        logger.debug(f"wrote {path}")


# Create a singleton instance
project_service = ProjectService()
