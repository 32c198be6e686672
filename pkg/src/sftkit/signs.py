import logging
from typing import Dict, List, Optional, Sequence, Tuple

from sftkit.exceptions import ComputationError, InputValidationError
from sftkit.models.signs import LineWord, OrientationLine

logger = logging.getLogger(__name__)


def line(label: str, degree: int = 0) -> OrientationLine:
    return OrientationLine(label=label, degree=degree)


def word(*factors: OrientationLine, sign: int = 1) -> LineWord:
    return LineWord(factors=list(factors), sign=sign)


def koszul_sign(degrees: Sequence[int], permutation: Sequence[int]) -> int:
    """Sign of moving factor permutation[k] to position k, by the Koszul rule."""
    n = len(degrees)
    if sorted(permutation) != list(range(n)):
        raise InputValidationError(f"{list(permutation)} is not a permutation of {n} factors")
    parity = 0
    for i in range(n):
        for j in range(i + 1, n):
            # each inverted pair of factors crosses once
            if permutation[i] > permutation[j]:
                parity += degrees[permutation[i]] * degrees[permutation[j]]
    return -1 if parity % 2 else 1


def reorder_sign(w: LineWord, permutation: Sequence[int]) -> LineWord:
    """The word with factors w[permutation[0]], w[permutation[1]], ... and the Koszul sign applied."""
    degrees = [f.effective_degree for f in w.factors]
    sign = koszul_sign(degrees, permutation)
    return LineWord(factors=[w.factors[k] for k in permutation], sign=w.sign * sign)


def transpose(w: LineWord, i: int) -> LineWord:
    """Swap the adjacent factors at i and i + 1."""
    permutation = list(range(len(w.factors)))
    permutation[i], permutation[i + 1] = permutation[i + 1], permutation[i]
    return reorder_sign(w, permutation)


def tensor(a: LineWord, b: LineWord) -> LineWord:
    return LineWord(factors=a.factors + b.factors, sign=a.sign * b.sign)


def contract_dual_pair(w: LineWord, i: int, j: int) -> LineWord:
    """Move factor j next to factor i, on its right, and evaluate the pair o ⊗ o^v -> 1 with sign +1."""
    n = len(w.factors)
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise InputValidationError(f"positions {i}, {j} are not two factors of a word of length {n}")
    first, second = w.factors[i], w.factors[j]
    if first.dual or not second.dual or first.label != second.label or first.degree != second.degree:
        raise ComputationError(
            f"cannot contract {first.render()} with {second.render()}: not a line and its dual"
        )

    # bring factor j directly to the right of factor i
    rest = [k for k in range(n) if k != j]
    at = rest.index(i) + 1
    permutation = rest[:at] + [j] + rest[at:]
    moved = reorder_sign(w, permutation)
    factors = moved.factors[:at - 1] + moved.factors[at + 1:]
    return LineWord(factors=factors, sign=moved.sign)


def merge_adjacent(w: LineWord, i: int) -> LineWord:
    """o(V) o(W) ≅ o(V ⊕ W) for the factors at i and i + 1."""
    first, second = w.factors[i], w.factors[i + 1]
    merged = OrientationLine(
        label=f"{first.render()}+{second.render()}",
        degree=first.effective_degree + second.effective_degree,
    )
    return LineWord(factors=w.factors[:i] + [merged] + w.factors[i + 2:], sign=w.sign)


def reduce_word(w: LineWord) -> LineWord:
    """Contract every line with its dual, pairing them like brackets from left to right."""
    current = w
    while True:
        pair = _innermost_pair(current.factors)
        if pair is None:
            return current
        current = contract_dual_pair(current, *pair)
        logger.debug(f"reduced to {current.render()}")


def _innermost_pair(factors: List[OrientationLine]) -> Optional[Tuple[int, int]]:
    stack: List[int] = []
    for position, factor in enumerate(factors):
        for depth in range(len(stack) - 1, -1, -1):
            other = factors[stack[depth]]
            if (
                other.label == factor.label
                and other.degree == factor.degree
                and other.dual != factor.dual
            ):
                if factor.dual:
                    return stack[depth], position
                return position, stack[depth]
        stack.append(position)
    return None


def orbit_orientation_word(
    gamma_plus: Sequence[str], gamma_minus: Sequence[str], parities: Dict[str, int]
) -> LineWord:
    """⊗ o_γ over Γ+ followed by ⊗ o_γ^v over Γ-, each in the degree of the orbit parity."""
    factors = [line(f"{g}", parities[g]) for g in gamma_plus]
    factors += [line(f"{g}", parities[g]).dualize() for g in gamma_minus]
    return LineWord(factors=factors)


def moduli_orientation_word(
    degrees: Optional[Dict[str, int]] = None, n_punctures: int = 1
) -> LineWord:
    """The chain o(D) o(E) o(R)^v o(g) o(ig) o(M) o(S1)^⊗k (o(S1)^⊗k)^v o(ig)^v o(g)^v o(E)^v.

    Degrees of D, E, R, g, M are read from `degrees`; ig has the degree of g and
    every circle factor has degree 1.
    """
    d = {"D": 0, "E": 0, "R": 1, "g": 0, "M": 0}
    d.update(degrees or {})
    circles = [line(f"S1_{k}", 1) for k in range(1, n_punctures + 1)]
    factors = [
        line("D", d["D"]),
        line("E", d["E"]),
        line("R", d["R"]).dualize(),
        line("g", d["g"]),
        line("ig", d["g"]),
        line("M", d["M"]),
        *circles,
        *[c.dualize() for c in reversed(circles)],
        line("ig", d["g"]).dualize(),
        line("g", d["g"]).dualize(),
        line("E", d["E"]).dualize(),
    ]
    return LineWord(factors=factors)
