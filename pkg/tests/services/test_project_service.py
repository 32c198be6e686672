import copy
import json

import pytest

from sftkit.exceptions import InputValidationError
from sftkit.services.project_service import ProjectService


class TestProjectService:
    """Tests for the ProjectService."""

    @pytest.fixture
    def project_service(self):
        return ProjectService()

    def test_load_input(self, project_service, project_file):
        """Test loading a complete project file."""
        project = project_service.load_input(project_file)

        assert [o.id for o in project.universe.orbits] == ["a", "b", "c"]
        assert project.tree_names() == ["fork"]
        assert project.options.n == 2
        assert len(project.breakings) == 2

    def test_missing_file(self, project_service, tmp_path):
        with pytest.raises(InputValidationError, match="cannot read"):
            project_service.load_input(tmp_path / "missing.json")

    def test_bad_json(self, project_service, tmp_path):
        """Test that a file that is not JSON is rejected."""
        path = tmp_path / "broken.json"
        path.write_text("{ not json", encoding="utf-8")

        with pytest.raises(InputValidationError, match="not valid JSON"):
            project_service.load_input(path)

    def test_non_canonical_rational(self, project_service, project_data):
        """Test that "2/4" is rejected with a pointer to the offending field."""
        project_data["universe"]["orbits"][0]["action"] = "2/4"

        with pytest.raises(InputValidationError) as info:
            project_service.parse(project_data)

        assert info.value.pointer == "/universe/orbits/0/action"
        assert "lowest terms" in str(info.value)

    def test_wrong_schema_version(self, project_service, project_data):
        project_data["schema_version"] = 2

        with pytest.raises(InputValidationError) as info:
            project_service.parse(project_data)

        assert info.value.pointer == "/schema_version"

    def test_unknown_orbit_in_tree(self, project_service, project_data):
        """Test that a tree edge naming an unknown orbit points at the tree."""
        project_data["trees"][0]["tree"]["internal_edges"][0]["orbit"] = "q"

        with pytest.raises(InputValidationError) as info:
            project_service.parse(project_data)

        assert info.value.pointer == "/trees/0/tree"
        assert any("q" in d for d in info.value.diagnostics)

    def test_duplicate_tree_names(self, project_service, project_data):
        project_data["trees"].append(copy.deepcopy(project_data["trees"][0]))

        with pytest.raises(InputValidationError) as info:
            project_service.parse(project_data)

        assert "/trees: duplicate tree name fork" in info.value.diagnostics

    def test_unknown_orbit_in_breaking(self, project_service, project_data):
        project_data["breakings"][1]["negative"] = ["z"]

        with pytest.raises(InputValidationError) as info:
            project_service.parse(project_data)

        assert info.value.diagnostics == ["/breakings/1: unknown orbit z"]

    def test_count_pointer(self, project_service, project_data):
        """Test that count diagnostics point into the counts list."""
        project_data["counts"]["counts"][0]["vdim"] = 1

        with pytest.raises(InputValidationError) as info:
            project_service.parse(project_data)

        assert info.value.pointer == "/counts/counts/0"

    def test_edge_star_without_vertex_stars(self, project_service, project_data):
        project_data["trees"][0]["edge_star"] = {"r->x": 0, "r->y": 0}

        with pytest.raises(InputValidationError) as info:
            project_service.parse(project_data)

        assert "edge_star given without" in info.value.diagnostics[0]

    def test_cobordism_is_none_for_symplectization_trees(self, project_service, project_data):
        project = project_service.parse(project_data)

        assert project_service.cobordism(project.trees[0]) is None

    def test_dump_keeps_rationals_exact(self, project_service, project_data):
        """Test that dumped actions are "p/q" strings and aliases are kept."""
        project_data["universe"]["orbits"][0]["action"] = "1/3"
        project = project_service.parse(project_data)

        data = json.loads(project_service.dump(project))

        assert data["universe"]["L"] == "3"
        assert data["universe"]["orbits"][0]["action"] == "1/3"
        assert data["trees"][0]["tree"]["internal_edges"][0]["from"] == "r"

    def test_write_and_reload(self, project_service, project_file, tmp_path):
        """Test that a written project loads back to the same model."""
        project = project_service.load_input(project_file)
        target = tmp_path / "copy.json"

        project_service.write(project, target)

        assert project_service.load_input(target) == project
