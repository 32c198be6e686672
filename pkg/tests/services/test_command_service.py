import pytest

from sftkit.exceptions import ComputationRefused, InputValidationError
from sftkit.models.project import CommandParams
from sftkit.services.command_service import COMMANDS, CommandService
from sftkit.services.project_service import project_service


class TestCommandService:
    """Tests for the CommandService."""

    @pytest.fixture
    def command_service(self):
        return CommandService()

    @pytest.fixture
    def project(self, project_data):
        return project_service.parse(project_data)

    def test_every_command_has_a_handler(self, command_service):
        assert set(command_service._handlers) == set(COMMANDS)

    def test_unknown_command(self, command_service, project):
        with pytest.raises(InputValidationError, match="unknown command"):
            command_service.run_command(project, "frobnicate")

    def test_missing_project(self, command_service):
        """Test that every command except simplex needs an input file."""
        with pytest.raises(InputValidationError, match="needs an input file"):
            command_service.run_command(None, "levels")

    def test_unknown_tree(self, command_service, project):
        with pytest.raises(InputValidationError, match="unknown tree"):
            command_service.run_command(project, "levels", CommandParams(tree="spoon"))

    def test_levels(self, command_service, project):
        """Test that the fork has its two maximal level functions."""
        report = command_service.run_command(project, "levels")

        assert report.payload["count"] == 2
        assert report.payload["levels"] == [{"r": 1, "x": 2, "y": 3}, {"r": 1, "x": 3, "y": 2}]
        assert report.rows[0] == ["1", "r:1 x:2 y:3"]

    def test_refine(self, command_service, project):
        report = command_service.run_command(project, "refine", CommandParams(side=3))

        assert len(report.payload["cones"]) == 2
        assert report.payload["certificate"]["smooth"]
        assert report.payload["coverage"]["ok"]

    def test_poset(self, command_service, project):
        report = command_service.run_command(project, "poset")

        assert report.payload["f_vector"] == [1, 3, 2]
        assert report.dot.startswith("digraph faces {")

    def test_degrees_with_given_prime(self, command_service, project):
        """Test framing degrees with p = 7 and actions 1, 2, 3."""
        report = command_service.run_command(project, "degrees", CommandParams(p=7))

        assert report.payload["p"] == 7
        assert report.payload["approx_actions"] == {"a": 1, "b": 2, "c": 3}
        assert report.payload["degrees"] == {"r": 1, "x": 6, "y": 13}

    def test_index_is_additive(self, command_service, project):
        report = command_service.run_command(project, "index")

        assert report.payload["index"] == 4
        assert [v["index"] for v in report.payload["vertices"]] == [-6, 5, 5]
        assert report.payload["additive"]
        assert report.payload["warnings"] == []
        assert report.rows[-1][0] == "(whole)"

    def test_index_needs_n(self, command_service, project_data):
        del project_data["options"]["n"]
        project = project_service.parse(project_data)

        with pytest.raises(InputValidationError) as info:
            command_service.run_command(project, "index")

        assert info.value.pointer == "/options/n"

    def test_ch(self, command_service, project):
        """Test the complex of words of length at most one with ∂c = a."""
        report = command_service.run_command(project, "ch")

        assert report.payload["basis"] == [[], ["a"], ["b"], ["c"]]
        ranks = report.payload["ranks"]
        assert (ranks["betti_even"], ranks["betti_odd"]) == (2, 0)
        assert report.payload["euler_characteristic"] == 2
        assert report.payload["boundary_squared"]["success"]

    def test_ch_refused(self, command_service, project_data):
        """Test that a differential with ∂∂ ≠ 0 is refused."""
        project_data["universe"]["orbits"][1]["parity"] = "odd"
        project_data["universe"]["orbits"][2]["parity"] = "even"
        project_data["counts"]["counts"] = [
            {"positive": "c", "negative": ["b"], "value": "1", "vdim": 0},
            {"positive": "b", "negative": ["a"], "value": "1", "vdim": 0},
        ]
        project = project_service.parse(project_data)

        with pytest.raises(ComputationRefused):
            command_service.run_command(project, "ch")

    def test_ch_needs_counts(self, command_service, project_data):
        del project_data["counts"]
        project = project_service.parse(project_data)

        with pytest.raises(InputValidationError, match="count table"):
            command_service.run_command(project, "ch")

    def test_strata(self, command_service, project):
        """Test the one codimension-one stratum from (a) to (c) through (b)."""
        report = command_service.run_command(project, "strata", CommandParams(minus=["a"], plus=["c"]))

        assert report.rows == [["1", "(a) -[0]-> (b) -[0]-> (c)"]]
        assert report.payload["strata"][0]["energies"] == ["1", "1"]

    def test_strata_bad_partition(self, command_service, project):
        with pytest.raises(InputValidationError, match="bad partition"):
            command_service.run_command(project, "strata", CommandParams(minus=["a"], plus=["c"], partition=[1]))

    def test_norm(self, command_service, project):
        report = command_service.run_command(project, "norm", CommandParams(max_length=1))

        assert report.payload["nodes"] == [["a"], ["b"], ["c"]]
        assert report.rows == [["(a)", "(b)", "0"], ["(a)", "(c)", "1"], ["(b)", "(c)", "0"]]
        assert "digraph precedence" in report.dot

    def test_norm_falls_back_to_counts(self, command_service, project_data):
        del project_data["breakings"]
        project = project_service.parse(project_data)

        report = command_service.run_command(project, "norm", CommandParams(max_length=1))

        assert report.rows == [["(a)", "(c)", "0"]]

    def test_simplex_without_project(self, command_service):
        report = command_service.run_command(None, "simplex", CommandParams(n=2))

        assert report.payload == {"n": 2, "f_vector": [6, 6, 1], "eulerian": True}
        assert report.rows[0] == ["0", "6"]

    def test_simplex_needs_n(self, command_service):
        with pytest.raises(InputValidationError, match="needs n"):
            command_service.run_command(None, "simplex")
