from collections import Counter
from unittest import mock

import pytest

from sftkit.blowup import (
    blowup_simplex,
    box_coverage,
    brute_force_leveled_structures,
    build_refinement,
    disconnected_face_poset,
    f_vector,
    is_eulerian,
    is_smooth_refinement,
    leveled_monoid,
    refinement_face_poset,
)
from sftkit.config import config
from sftkit.exceptions import ComputationError, InputValidationError
from sftkit.levels import count_maximal_levels
from sftkit.models.levels import LeveledTree, LevelFunction
from sftkit.models.monoids import FreeMonoid, Refinement
from sftkit.models.trees import DecoratedForest


def _leveled(t, **levels):
    return LeveledTree(tree=t, level=LevelFunction(levels=levels))


def _plane(*cones):
    base = FreeMonoid(coordinates=["e1", "e2"], generators=[[1, 0], [0, 1]])
    return Refinement(
        base=base,
        maximal_cones=[FreeMonoid(coordinates=["e1", "e2"], generators=g) for g in cones],
    )


class TestLeveledMonoid:
    def test_single_edge(self, build_tree):
        t = build_tree([("u", 1), ("w", 1)], internal=[("u", "w", "a")], inputs=[("u", "a")])

        assert leveled_monoid(_leveled(t, u=1, w=2)).generators == [[1]]

    def test_two_children(self, two_children):
        """Each level cut adds the edges crossing it.

        With x at level 2 the cone is ℕ⟨e₁+e₂, e₂⟩, which the per-edge formula would assign
        to the opposite order. Both orders together still split the quadrant along e₁+e₂.
        """
        first = leveled_monoid(_leveled(two_children, r=1, x=2, y=3))
        second = leveled_monoid(_leveled(two_children, r=1, x=3, y=2))

        assert first.coordinates == ["r->x", "r->y"]
        assert first.generators == [[1, 1], [0, 1]]
        assert second.generators == [[1, 1], [1, 0]]

    def test_three_children(self, three_children):
        cone = leveled_monoid(_leveled(three_children, r=1, x=2, y=3, z=4))

        assert cone.generators == [[1, 1, 1], [0, 1, 1], [0, 0, 1]]
        assert abs(cone.matrix().det()) == 1

    def test_edge_order(self, two_children):
        cone = leveled_monoid(_leveled(two_children, r=1, x=2, y=3), ["r->y", "r->x"])

        assert cone.generators == [[1, 1], [1, 0]]
        with pytest.raises(InputValidationError):
            leveled_monoid(_leveled(two_children, r=1, x=2, y=3), ["r->x"])

    def test_not_maximal(self, two_children):
        with pytest.raises(ComputationError):
            leveled_monoid(_leveled(two_children, r=1, x=2, y=2))


class TestRefinement:
    def test_chain_is_base(self, chain):
        r = build_refinement(chain)

        assert len(r.maximal_cones) == 1
        assert r.maximal_cones[0].canonical() == r.base.canonical()

    def test_two_children_smooth(self, two_children):
        r = build_refinement(two_children)
        certificate = is_smooth_refinement(r)

        assert len(r.maximal_cones) == 2
        assert certificate.smooth
        assert [abs(d) for d in certificate.determinants] == [1, 1]

    def test_three_children(self, three_children):
        r = build_refinement(three_children)

        assert len(r.maximal_cones) == 6
        assert is_smooth_refinement(r).smooth
        assert box_coverage(r, side=3).ok

    def test_cone_count_matches_level_count(self, two_children, three_children, chain, corolla):
        for t in (two_children, three_children, chain, corolla):
            assert len(build_refinement(t).maximal_cones) == count_maximal_levels(t)

    def test_box_coverage(self, two_children):
        report = box_coverage(build_refinement(two_children), side=5)

        assert report.ok
        assert report.points_checked == 25

    def test_overlapping_cones(self):
        """The cone of e1 and e1 + 2 e2 sits inside the quadrant without being a face of it."""
        certificate = is_smooth_refinement(_plane([[1, 0], [0, 1]], [[1, 0], [1, 2]]))

        assert not certificate.smooth
        assert any("meet outside a common face" in d for d in certificate.diagnostics)
        assert certificate.counterexample is not None

    def test_non_unimodular_cone(self):
        certificate = is_smooth_refinement(_plane([[1, 0], [0, 2]]))

        assert not certificate.smooth
        assert certificate.determinants == [2]

    def test_rank_cap(self, three_children):
        with mock.patch.object(config.limits, "max_cone_rank", 2):
            with pytest.raises(ComputationError):
                build_refinement(three_children)


class TestFacePoset:
    def test_single_edge(self, build_tree):
        t = build_tree([("u", 1), ("w", 1)], internal=[("u", "w", "a")], inputs=[("u", "a")])
        poset = refinement_face_poset(t)

        assert poset.rank_counts() == {0: 1, 1: 1}
        assert [e.leveled.size for e in poset.elements] == [1, 2]

    def test_two_children(self, two_children):
        poset = refinement_face_poset(two_children)

        assert poset.rank_counts() == {0: 1, 1: 3, 2: 2}

    def test_faces_match_leveled_structures(self, two_children, three_children, chain):
        for t in (two_children, three_children, chain):
            faces = refinement_face_poset(t).rank_counts()
            structures = Counter(lt.size - 1 for lt in brute_force_leveled_structures(t))
            assert faces == dict(sorted(structures.items()))

    def test_graded(self, three_children):
        poset = refinement_face_poset(three_children)
        rank = {e.index: e.rank for e in poset.elements}

        assert all(rank[j] == rank[i] + 1 for i, j in poset.covers)
        assert all(e.leveled.size == e.rank + 1 for e in poset.elements)

    def test_disconnected_base(self, build_tree):
        first = build_tree([("u", 1)], inputs=[("u", "a")])
        second = build_tree([("w", 1)], inputs=[("w", "b")])
        poset = disconnected_face_poset(DecoratedForest(components=[first, second]), "c")

        assert poset.rank_counts() == {0: 1, 1: 2}
        deepest = poset.elements[0]
        assert len(deepest.forest.forest.components) == 2
        assert deepest.forest.level.levels == {"u": 1, "w": 1}


class TestBlowupSimplex:
    def test_interval(self):
        assert f_vector(blowup_simplex(1)) == [2, 1]

    def test_hexagon(self):
        assert f_vector(blowup_simplex(2)) == [6, 6, 1]

    def test_truncated_tetrahedron(self):
        """Vertices then edges truncated: 24 vertices, 36 edges, 14 facets."""
        assert f_vector(blowup_simplex(3)) == [24, 36, 14, 1]

    def test_eulerian(self):
        for n in range(1, 4):
            assert is_eulerian(blowup_simplex(n))

    def test_limits(self):
        with pytest.raises(InputValidationError):
            blowup_simplex(-1)
        with pytest.raises(ComputationError):
            blowup_simplex(config.limits.max_simplex_dim + 1)
