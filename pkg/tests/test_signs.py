import pytest

from sftkit.exceptions import ComputationError, InputValidationError
from sftkit.signs import (
    contract_dual_pair,
    koszul_sign,
    line,
    merge_adjacent,
    moduli_orientation_word,
    orbit_orientation_word,
    reduce_word,
    reorder_sign,
    tensor,
    transpose,
    word,
)


class TestReorderSign:
    def test_two_odd_lines(self):
        assert transpose(word(line("A", 1), line("B", 1)), 0).sign == -1

    def test_odd_and_even(self):
        assert transpose(word(line("A", 1), line("B", 2)), 0).sign == 1

    def test_inverse_restores(self):
        w = word(line("A", 1), line("B", 3), line("C", 2), line("D", 1))
        sigma = [2, 0, 3, 1]
        inverse = [sigma.index(k) for k in range(len(sigma))]

        assert reorder_sign(reorder_sign(w, sigma), inverse) == w

    def test_bad_permutation(self):
        with pytest.raises(InputValidationError):
            koszul_sign([1, 1], [0, 0])


class TestContractDualPair:
    def test_adjacent(self):
        o = line("o", 1)
        result = contract_dual_pair(word(o, o.dualize()), 0, 1)

        assert result.factors == []
        assert result.sign == 1

    def test_dual_first(self):
        """The odd line swaps past its dual once before contracting."""
        o = line("o", 1)
        result = contract_dual_pair(word(o.dualize(), o), 1, 0)

        assert result.factors == []
        assert result.sign == -1

    def test_degree_zero(self):
        o = line("o", 0)

        assert contract_dual_pair(word(o.dualize(), o), 1, 0).sign == 1
        assert contract_dual_pair(word(o, line("p", 1), o.dualize()), 0, 2).sign == 1

    def test_not_a_pair(self):
        with pytest.raises(ComputationError):
            contract_dual_pair(word(line("o", 1), line("p", 1).dualize()), 0, 1)
        with pytest.raises(InputValidationError):
            contract_dual_pair(word(line("o", 1)), 0, 0)


class TestTensor:
    def test_unit(self):
        w = word(line("A", 1), sign=-1)

        assert tensor(word(), w) == w

    def test_associative(self):
        a, b, c = word(line("A", 1)), word(line("B", 2), sign=-1), word(line("C", 1))

        assert tensor(tensor(a, b), c) == tensor(a, tensor(b, c))

    def test_reversal(self):
        a = word(line("A", 1), line("B", 1))
        b = word(line("C", 1))
        joined = tensor(a, b)
        reversed_order = list(reversed(range(len(joined.factors))))
        step = transpose(transpose(transpose(joined, 1), 0), 1)

        assert reorder_sign(joined, reversed_order) == step


class TestOrientationWords:
    def test_moduli_word_reduces(self):
        reduced = reduce_word(moduli_orientation_word(n_punctures=2))

        assert reduced.labels() == ["o(D)", "o(R)^v", "o(M)"]
        assert reduced.sign == 1

    def test_moduli_word_sign(self):
        """An odd E factor crosses R^v on its way back."""
        assert reduce_word(moduli_orientation_word({"E": 1})).sign == -1

    def test_orbit_word(self):
        w = orbit_orientation_word(["x", "y"], ["y"], {"x": 0, "y": 1})

        assert w.labels() == ["o(x)", "o(y)", "o(y)^v"]
        assert reduce_word(w).labels() == ["o(x)"]

    def test_merge(self):
        merged = merge_adjacent(word(line("V", 1), line("W", 2)), 0)

        assert merged.factors[0].degree == 3
        assert merged.render() == "o(o(V)+o(W))"
