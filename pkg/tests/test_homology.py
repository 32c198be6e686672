from fractions import Fraction

import pytest

from sftkit.exceptions import ComputationRefused, InputValidationError
from sftkit.homology import (
    ChainAlgebra,
    apply_differential,
    build_differential,
    build_generators,
    check_boundary_squared,
    euler_characteristic,
    homology_ranks,
    require_valid_counts,
    validate_counts,
    word_grading,
)
from sftkit.models.counts import CountEntry, CountTable
from sftkit.models.orbits import OrbitUniverse, Parity, ReebOrbit


def _universe(*specs, bound=100):
    """Orbits from (id, action, odd) triples."""
    return OrbitUniverse(
        action_bound=bound,
        orbits=[
            ReebOrbit(id=i, action=a, parity=Parity.ODD if odd else Parity.EVEN)
            for i, a, odd in specs
        ],
    )


def _counts(*entries):
    return CountTable(
        counts=[CountEntry(positive=p, negative=list(n), value=v, vdim=0) for p, n, v in entries]
    )


class TestBuildGenerators:
    def test_even_orbit_is_polynomial(self):
        basis = build_generators(_universe(("x", 1, False)), max_length=3)

        assert basis == [(), ("x",), ("x", "x"), ("x", "x", "x")]

    def test_odd_orbit_squares_to_zero(self):
        assert build_generators(_universe(("y", 1, True)), max_length=3) == [(), ("y",)]

    def test_action_cutoff(self):
        universe = _universe(("x", 1, False), ("y", 2, True))
        basis = build_generators(universe, max_action=Fraction(3))

        assert basis == [(), ("x",), ("x", "x"), ("y",), ("x", "x", "x"), ("x", "y")]

    def test_bad_orbits_are_skipped(self):
        universe = OrbitUniverse(
            action_bound=10,
            orbits=[
                ReebOrbit(id="s", action=1, odd_neg_eigenvalues=True),
                ReebOrbit(id="s2", action=2, multiplicity=2, simple_id="s"),
            ],
        )

        assert ("s2",) not in build_generators(universe, max_length=1)

    def test_default_length(self):
        """Without cutoffs the configured word length applies."""
        assert len(build_generators(_universe(("x", 1, False)))) == 4


class TestChainAlgebra:
    def test_normalize_signs(self):
        algebra = ChainAlgebra({"u": 1, "v": 1, "w": 0}, {"u": 1, "v": 2, "w": 3}, {})

        assert algebra.normalize(["v", "u"]) == (-1, ("u", "v"))
        assert algebra.normalize(["w", "u"]) == (1, ("u", "w"))
        assert algebra.normalize(["u", "w", "u"]) == (0, None)

    def test_leibniz_sign(self):
        """∂(uv) = (∂u)v − u(∂v) for odd u."""
        universe = _universe(("w", 1, False), ("u", 3, True), ("v", 4, True))
        counts = _counts(("u", ["w"], 1), ("v", ["w"], 1))
        complex_ = build_differential(build_generators(universe, max_length=2), counts, universe)
        image = apply_differential(complex_, {("u", "v"): Fraction(1)})

        assert image == {("w", "v"): Fraction(1), ("w", "u"): Fraction(-1)}
        assert apply_differential(complex_, image) == {}


class TestBuildDifferential:
    def test_single_count(self):
        universe = _universe(("y", 1, True), ("z", 2, False), ("x", 5, False))
        basis = build_generators(universe, max_length=2)
        complex_ = build_differential(basis, _counts(("x", ["z", "y"], Fraction(1, 2))), universe)
        column = basis.index(("x",))
        row = basis.index(("y", "z"))

        assert [(e.row, e.column, e.value) for e in complex_.entries] == [(row, column, Fraction(1, 2))]
        assert check_boundary_squared(complex_).success

    def test_truncated_terms(self):
        universe = _universe(("y", 1, False), ("x", 3, True))
        basis = build_generators(universe, max_length=1)
        complex_ = build_differential(basis, _counts(("x", ["y", "y"], 1)), universe)

        assert complex_.entries == []
        assert [(t.source, t.target) for t in complex_.truncated] == [(["x"], ["y", "y"])]
        assert homology_ranks(complex_).truncated_terms == 1

    def test_unknown_orbit(self):
        universe = _universe(("x", 1, False))

        with pytest.raises(InputValidationError):
            build_differential([()], _counts(("x", ["q"], 1)), universe)


class TestBoundarySquared:
    def test_composition_survives(self):
        universe = _universe(("c", 1, False), ("b", 2, True), ("a", 3, False))
        complex_ = build_differential(
            build_generators(universe, max_length=1), _counts(("a", ["b"], 1), ("b", ["c"], 1)), universe
        )
        report = check_boundary_squared(complex_)

        assert not report.success
        assert [(f.word, f.target, f.value) for f in report.failures] == [(["a"], ["c"], Fraction(1))]

    def test_ranks_refused(self):
        universe = _universe(("c", 1, False), ("b", 2, True), ("a", 3, False))
        complex_ = build_differential(
            build_generators(universe, max_length=1), _counts(("a", ["b"], 1), ("b", ["c"], 1)), universe
        )

        with pytest.raises(ComputationRefused) as info:
            homology_ranks(complex_)
        assert info.value.diagnostics == ["∂∂(a) has 1 at c"]

    def test_term_on_truncated_word_is_inconclusive(self):
        """Test that ∂∂a = cc is inconclusive when words of length two are cut off."""
        universe = _universe(("c", 1, False), ("b", 2, True), ("a", 3, False))
        complex_ = build_differential(
            build_generators(universe, max_length=1), _counts(("a", ["b"], 1), ("b", ["c", "c"], 1)), universe
        )
        report = check_boundary_squared(complex_)

        assert report.failures == []
        assert [(f.word, f.target, f.value) for f in report.inconclusive] == [(["a"], ["c", "c"], Fraction(1))]
        assert not report.success
        with pytest.raises(ComputationRefused) as info:
            homology_ranks(complex_)
        assert info.value.diagnostics == ["truncated ∂∂(a) has 1 at c c"]


class TestHomologyRanks:
    def test_zero_differential(self):
        universe = _universe(("x", 1, False), ("y", 2, True))
        complex_ = build_differential(build_generators(universe, max_length=2), CountTable(), universe)
        ranks = homology_ranks(complex_)

        assert (ranks.betti_even, ranks.betti_odd) == complex_.dimensions()
        assert ranks.rank_d == 0

    def test_one_cancelling_pair(self):
        universe = _universe(("y", 1, False), ("x", 2, True))
        basis = build_generators(universe, max_length=1)
        complex_ = build_differential(basis, _counts(("x", ["y"], 1)), universe)
        ranks = homology_ranks(complex_)

        assert basis == [(), ("y",), ("x",)]
        assert (ranks.betti_even, ranks.betti_odd) == (1, 0)
        assert ranks.rank_odd == 1
        assert ranks.betti_even - ranks.betti_odd == euler_characteristic(complex_)

    def test_rational_coefficients(self):
        universe = _universe(("w", 1, False), ("u", 3, True), ("v", 4, True))
        counts = _counts(("u", ["w"], Fraction(2, 3)), ("v", ["w"], Fraction(-1, 2)))
        complex_ = build_differential(build_generators(universe, max_length=2), counts, universe)
        ranks = homology_ranks(complex_)

        assert ranks.betti_even - ranks.betti_odd == euler_characteristic(complex_)
        assert ranks.rank_odd >= 1


class TestValidateCounts:
    @pytest.fixture
    def graded(self):
        return OrbitUniverse(
            action_bound=10,
            orbits=[
                ReebOrbit(id="p", action=3, cz=4),
                ReebOrbit(id="q", action=1, cz=1),
            ],
        )

    def test_rigid_by_index(self, graded):
        table = CountTable(counts=[CountEntry(positive="p", negative=["q"], value=1, c1=-1)])

        assert validate_counts(graded, table, n=2).valid

    def test_not_rigid(self, graded):
        table = CountTable(counts=[CountEntry(positive="p", negative=["q"], value=1, c1=0)])
        report = validate_counts(graded, table, n=2)

        assert report.diagnostics == ["/counts/0: count is not rigid (index gives vdim 2)"]

    def test_rigidity_unknown(self, graded):
        table = CountTable(counts=[CountEntry(positive="p", negative=["q"], value=1)])

        assert not validate_counts(graded, table).valid

    def test_unknown_orbit_and_energy(self, graded):
        table = CountTable(
            counts=[
                CountEntry(positive="p", negative=["zz"], value=1, vdim=0),
                CountEntry(positive="q", negative=["p"], value=1, vdim=0),
            ]
        )
        report = validate_counts(graded, table)

        assert report.diagnostics == [
            "/counts/0: unknown orbit zz",
            "/counts/1: count has nonpositive energy",
        ]
        with pytest.raises(InputValidationError):
            require_valid_counts(graded, table)

    def test_duplicate(self, graded):
        entry = CountEntry(positive="p", negative=["q"], value=1, vdim=0)
        report = validate_counts(graded, CountTable(counts=[entry, entry]))

        assert any("duplicate count" in d for d in report.diagnostics)

    def test_word_grading(self, graded):
        assert word_grading(["p", "q"], graded, 2) == 3
        assert word_grading(["p"], _universe(("p", 1, False)), 2) is None
