import pytest

from sftkit.exceptions import ComputationError
from sftkit.levels import (
    brute_force_level_functions,
    count_maximal_levels,
    enumerate_maximal_levels,
    insert_trivial_levels,
    insert_trivial_vertices,
    pre_level,
    pre_level_factorial_count,
    validate_level,
)
from sftkit.models.levels import LeveledTree, LevelFunction
from sftkit.trees import contract, is_trivial_vertex


def test_pre_level_examples(corolla, two_children, chain):
    """Test the pre-level on the basic shapes."""
    assert pre_level(corolla).levels == {"r": 1}
    assert pre_level(two_children).levels == {"r": 1, "x": 2, "y": 2}
    assert pre_level(chain).levels == {"a": 2, "b": 3, "r": 1}


def test_pre_level_is_pointwise_minimal(two_children, chain):
    """Test that every level function dominates the pre-level."""
    for t in (two_children, chain):
        minimal = pre_level(t).levels
        for l in brute_force_level_functions(t):
            assert all(l.levels[v] >= minimal[v] for v in minimal)


def test_no_level_function(build_tree):
    """Test that a parentless vertex without an input is refused."""
    t = build_tree([("u", 1)], outputs=[("u", "a")])

    with pytest.raises(ComputationError):
        pre_level(t)


class TestValidateLevel:
    def test_pre_level_validates(self, two_children, chain):
        assert validate_level(two_children, pre_level(two_children)).valid
        assert validate_level(chain, pre_level(chain)).valid

    def test_empty_level(self, two_children):
        good = LevelFunction(levels={"r": 1, "x": 2, "y": 2})
        gapped = LevelFunction(levels={"r": 1, "x": 3, "y": 3})

        assert validate_level(two_children, good).valid
        report = validate_level(two_children, gapped)
        assert not report.valid
        assert "level 2 is empty" in report.diagnostics

    def test_flat_edge(self, two_children):
        report = validate_level(two_children, LevelFunction(levels={"r": 1, "x": 1, "y": 2}))

        assert not report.valid
        assert any("r->x does not increase" in d for d in report.diagnostics)

    def test_missing_vertex(self, two_children):
        report = validate_level(two_children, LevelFunction(levels={"r": 1, "x": 2}))

        assert report.diagnostics == ["vertex y has no level"]


class TestInsertTrivialVertices:
    def test_no_gaps(self, chain):
        lt = LeveledTree(tree=chain, level=pre_level(chain))

        assert insert_trivial_vertices(lt) == chain

    def test_one_gap(self, two_children):
        lt = LeveledTree(tree=two_children, level=LevelFunction(levels={"r": 1, "x": 3, "y": 2}))
        subdivided = insert_trivial_vertices(lt)

        assert sorted(subdivided.vertex_ids()) == ["r", "r~x~1", "x", "y"]
        assert is_trivial_vertex(subdivided, "r~x~1")
        assert insert_trivial_levels(lt).levels["r~x~1"] == 2
        assert validate_level(subdivided, insert_trivial_levels(lt)).valid

    def test_recontract(self, two_children):
        lt = LeveledTree(tree=two_children, level=LevelFunction(levels={"r": 1, "x": 3, "y": 2}))
        subdivided = insert_trivial_vertices(lt)
        restored = contract(subdivided, ["r~x~1->x"]).target

        assert len(restored.vertices) == 3
        assert sorted(e.orbit for e in restored.internal_edges) == ["a", "b"]
        assert restored.total_degree() == two_children.total_degree()


class TestEnumerateMaximalLevels:
    def test_chain(self, chain):
        assert count_maximal_levels(chain) == 1

    def test_two_children(self, two_children):
        vectors = [l.vector() for l in enumerate_maximal_levels(two_children)]

        assert vectors == [(1, 2, 3), (1, 3, 2)]

    def test_three_children(self, three_children):
        assert count_maximal_levels(three_children) == 6
        assert pre_level_factorial_count(three_children) == 6

    def test_leveled_size(self, two_children):
        pre = LeveledTree(tree=two_children, level=pre_level(two_children))
        full = LeveledTree(tree=two_children, level=enumerate_maximal_levels(two_children)[0])

        assert (pre.size, full.size) == (2, 3)
        assert full.level.level_sets() == {1: ["r"], 2: ["x"], 3: ["y"]}

    def test_matches_brute_force(self, two_children, three_children, chain, corolla):
        for t in (two_children, three_children, chain, corolla):
            enumerated = [l.vector() for l in enumerate_maximal_levels(t)]
            brute = [l.vector() for l in brute_force_level_functions(t, singleton_only=True)]
            assert enumerated == brute

    def test_all_maximal(self, three_children):
        assert all(l.is_maximal() for l in enumerate_maximal_levels(three_children))


class TestPreLevelFactorialCount:
    """Tests for the level-by-level count of maximal level functions."""

    @pytest.fixture
    def uneven(self, build_tree):
        """Root r with children x and y, and z below x."""
        return build_tree(
            [("r", 0), ("x", 1), ("y", 1), ("z", 1)],
            internal=[("r", "x", "a"), ("r", "y", "b"), ("x", "z", "a")],
            inputs=[("r", "c")],
        )

    def test_interleaved_levels(self, uneven):
        """Test that y may sit above, between or below x and z."""
        assert pre_level_factorial_count(uneven) == 3
        assert count_maximal_levels(uneven) == 3

    def test_basic_shapes(self, chain, two_children, three_children, corolla):
        for t, expected in ((chain, 1), (two_children, 2), (three_children, 6), (corolla, 1)):
            assert pre_level_factorial_count(t) == expected
            assert pre_level_factorial_count(t) == count_maximal_levels(t)

    def test_matches_brute_force(self, build_tree):
        """Test a two-branch tree whose pre-level sets interleave."""
        t = build_tree(
            [("r", 0), ("x", 1), ("y", 1), ("z", 1), ("w", 1)],
            internal=[("r", "x", "a"), ("r", "y", "b"), ("x", "z", "a"), ("y", "w", "a")],
            inputs=[("r", "c")],
        )

        assert pre_level_factorial_count(t) == len(brute_force_level_functions(t, singleton_only=True)) == 6
