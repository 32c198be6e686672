import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices.sdm import SDM

from sftkit.config import config
from sftkit.exceptions import ComputationRefused, InputValidationError
from sftkit.grading import classify_goodness, energy, fredholm_index, good_orbits
from sftkit.models.counts import (
    BoundaryFailure,
    BoundaryReport,
    CountReport,
    CountTable,
    GeneratorBoundary,
    HomologyRanks,
    MatrixEntry,
    RationalComplex,
    Term,
    TruncatedTerm,
)
from sftkit.models.grading import IndexData
from sftkit.models.orbits import OrbitUniverse

logger = logging.getLogger(__name__)

Word = Tuple[str, ...]
Element = Dict[Word, Fraction]


def validate_counts(
    universe: OrbitUniverse, counts: CountTable, n: Optional[int] = None
) -> CountReport:
    """Check orbits, goodness, action bound, energy and rigidity of every count."""
    diagnostics: List[str] = []
    orbits = universe.by_id()
    seen = set()
    for position, entry in enumerate(counts.counts):
        pointer = f"/counts/{position}"
        involved = [entry.positive] + list(entry.negative)
        unknown = [o for o in involved if o not in orbits]
        if unknown:
            diagnostics.append(f"{pointer}: unknown orbit {', '.join(sorted(set(unknown)))}")
            continue
        if entry.key in seen:
            diagnostics.append(f"{pointer}: duplicate count for {entry.positive} -> {list(entry.key[1])}")
        seen.add(entry.key)

        for orbit_id in sorted(set(involved)):
            orbit = orbits[orbit_id]
            if not classify_goodness(orbit, universe):
                diagnostics.append(f"{pointer}: orbit {orbit_id} is bad")
            if orbit.action > universe.action_bound:
                diagnostics.append(f"{pointer}: orbit {orbit_id} exceeds the action bound")
        if energy([entry.positive], entry.negative, universe) <= 0:
            diagnostics.append(f"{pointer}: count has nonpositive energy")

        # Rigidity
        if entry.vdim is not None:
            if entry.vdim != 0:
                diagnostics.append(f"{pointer}: count is not rigid (vdim {entry.vdim})")
            continue
        cz_known = all(orbits[o].cz_index is not None for o in involved)
        if entry.c1 is None or n is None or not cz_known:
            diagnostics.append(f"{pointer}: rigidity cannot be established, give vdim or c1 with CZ data")
            continue
        index = fredholm_index(
            IndexData(
                n=n,
                euler_char=2,
                c1=entry.c1,
                cz_plus=[orbits[entry.positive].cz_index],
                cz_minus=[orbits[o].cz_index for o in entry.negative],
            )
        )
        if index.vdim != 0:
            diagnostics.append(f"{pointer}: count is not rigid (index gives vdim {index.vdim})")
    return CountReport(valid=not diagnostics, diagnostics=diagnostics)


def require_valid_counts(universe: OrbitUniverse, counts: CountTable, n: Optional[int] = None) -> None:
    report = validate_counts(universe, counts, n)
    if not report.valid:
        raise InputValidationError("invalid count table", diagnostics=report.diagnostics)


def _word_action(word: Sequence[str], actions: Dict[str, Fraction]) -> Fraction:
    return sum((actions[o] for o in word), Fraction(0))


def _word_parity(word: Sequence[str], parities: Dict[str, int]) -> int:
    return sum(parities[o] for o in word) % 2


def build_generators(
    universe: OrbitUniverse,
    max_action: Optional[Fraction] = None,
    max_length: Optional[int] = None,
) -> List[Word]:
    """All graded-commutative words in good orbits within the cutoffs, ordered by action then ids."""
    if max_action is None and max_length is None:
        max_length = config.complex.default_word_length
    orbits = sorted(good_orbits(universe), key=lambda o: (o.action, o.id))
    actions = {o.id: o.action for o in orbits}
    words: List[Word] = []

    def extend(prefix: Word, start: int, action: Fraction) -> None:
        words.append(prefix)
        if max_length is not None and len(prefix) >= max_length:
            return
        for position in range(start, len(orbits)):
            orbit = orbits[position]
            total = action + orbit.action
            if max_action is not None and total > max_action:
                continue
            # odd orbits square to zero
            following = position + 1 if orbit.parity_bit else position
            extend(prefix + (orbit.id,), following, total)

    extend((), 0, Fraction(0))
    words.sort(key=lambda w: (_word_action(w, actions), w))
    logger.info(f"built {len(words)} generators from {len(orbits)} good orbits")
    return words


class ChainAlgebra:
    """Free graded-commutative algebra on orbit ids with an odd derivation given on generators."""

    def __init__(
        self,
        parities: Dict[str, int],
        actions: Dict[str, Fraction],
        boundaries: Dict[str, Element],
    ):
        self.parities = parities
        self.actions = actions
        self.boundaries = boundaries

    def _order(self, orbit_id: str) -> Tuple[Fraction, str]:
        return self.actions[orbit_id], orbit_id

    def normalize(self, factors: Sequence[str]) -> Tuple[int, Optional[Word]]:
        """Sort factors into canonical order with Koszul signs; None when an odd orbit repeats."""
        items = list(factors)
        sign = 1
        # insertion sort, one sign per adjacent swap
        for i in range(1, len(items)):
            j = i
            while j > 0 and self._order(items[j - 1]) > self._order(items[j]):
                if self.parities[items[j - 1]] and self.parities[items[j]]:
                    sign = -sign
                items[j - 1], items[j] = items[j], items[j - 1]
                j -= 1
        for a, b in zip(items, items[1:]):
            if a == b and self.parities[a]:
                return 0, None
        return sign, tuple(items)

    def apply(self, element: Element) -> Element:
        """∂ extended by the Leibniz rule with sign (-1)^(|γ1| + ... + |γ(i-1)|)."""
        result: Element = {}
        for word, coefficient in element.items():
            prefix_parity = 0
            for i, orbit_id in enumerate(word):
                sign = -1 if prefix_parity else 1
                for image, value in self.boundaries.get(orbit_id, {}).items():
                    factors = list(word[:i]) + list(image) + list(word[i + 1:])
                    koszul, normal = self.normalize(factors)
                    if normal is None:
                        continue
                    result[normal] = result.get(normal, Fraction(0)) + sign * koszul * value * coefficient
                prefix_parity ^= self.parities[orbit_id]
        return {w: v for w, v in result.items() if v != 0}

    @classmethod
    def from_complex(cls, c: RationalComplex) -> "ChainAlgebra":
        boundaries = {
            b.orbit: {tuple(t.word): t.value for t in b.terms} for b in c.boundaries
        }
        return cls(dict(c.orbit_parities), dict(c.orbit_actions), boundaries)


def apply_differential(c: RationalComplex, element: Element) -> Element:
    """∂ on a sparse element, computed without truncation."""
    return ChainAlgebra.from_complex(c).apply(element)


def build_differential(
    basis: Sequence[Word], counts: CountTable, universe: OrbitUniverse
) -> RationalComplex:
    """Assemble the differential matrix of the Leibniz extension of the counts on the basis."""
    orbits = universe.by_id()
    for position, entry in enumerate(counts.counts):
        for orbit_id in [entry.positive] + list(entry.negative):
            if orbit_id not in orbits:
                raise InputValidationError(f"unknown orbit {orbit_id}", pointer=f"/counts/{position}")
            if not classify_goodness(orbits[orbit_id], universe):
                raise InputValidationError(f"count uses bad orbit {orbit_id}", pointer=f"/counts/{position}")

    parities = {o.id: o.parity_bit for o in universe.orbits}
    actions = {o.id: o.action for o in universe.orbits}
    algebra = ChainAlgebra(parities, actions, {})
    boundaries: Dict[str, Element] = {}
    for (positive, negative), value in sorted(counts.entries().items()):
        _, word = algebra.normalize(negative)
        if word is None:
            logger.warning(f"count {positive} -> {list(negative)} lands on a vanishing word")
            continue
        # the value is the coefficient of the canonically ordered word
        target = boundaries.setdefault(positive, {})
        target[word] = target.get(word, Fraction(0)) + value
    algebra.boundaries = boundaries

    index = {tuple(w): i for i, w in enumerate(basis)}
    entries: List[MatrixEntry] = []
    truncated: List[TruncatedTerm] = []
    for column, word in enumerate(basis):
        image = algebra.apply({tuple(word): Fraction(1)})
        for target, value in sorted(image.items()):
            if target in index:
                entries.append(MatrixEntry(row=index[target], column=column, value=value))
            else:
                truncated.append(TruncatedTerm(source=list(word), target=list(target), value=value))
    if truncated:
        logger.info(f"{len(truncated)} differential terms fall outside the truncated basis")

    return RationalComplex(
        basis=[list(w) for w in basis],
        parity=[_word_parity(w, parities) for w in basis],
        action=[_word_action(w, actions) for w in basis],
        entries=entries,
        truncated=truncated,
        orbit_parities=parities,
        orbit_actions=actions,
        boundaries=[
            GeneratorBoundary(
                orbit=orbit_id,
                terms=[Term(word=list(w), value=v) for w, v in sorted(terms.items())],
            )
            for orbit_id, terms in sorted(boundaries.items())
        ],
    )


def _columns(c: RationalComplex) -> Dict[int, Dict[int, Fraction]]:
    columns: Dict[int, Dict[int, Fraction]] = {}
    for entry in c.entries:
        columns.setdefault(entry.column, {})[entry.row] = entry.value
    return columns


def check_boundary_squared(c: RationalComplex) -> BoundaryReport:
    """Compare ∂∘∂ computed on the basis matrix with ∂∘∂ computed without truncation.

    Exact terms on basis words are failures. Exact terms on truncated words, and matrix
    terms that disagree with the exact ones, are inconclusive.
    """
    algebra = ChainAlgebra.from_complex(c)
    columns = _columns(c)
    failures: List[BoundaryFailure] = []
    inconclusive: List[BoundaryFailure] = []
    in_basis = {tuple(word) for word in c.basis}

    for column, word in enumerate(c.basis):
        exact = algebra.apply(algebra.apply({tuple(word): Fraction(1)}))
        for target, value in sorted(exact.items()):
            failure = BoundaryFailure(word=word, target=list(target), value=value)
            (failures if target in in_basis else inconclusive).append(failure)

        # the same composite through the truncated matrix
        squared: Dict[int, Fraction] = {}
        for middle, first in columns.get(column, {}).items():
            for row, second in columns.get(middle, {}).items():
                squared[row] = squared.get(row, Fraction(0)) + first * second
        for row, value in sorted(squared.items()):
            target = tuple(c.basis[row])
            if value != 0 and exact.get(target, Fraction(0)) != value:
                inconclusive.append(BoundaryFailure(word=word, target=list(target), value=value))

    report = BoundaryReport(
        success=not failures and not inconclusive, failures=failures, inconclusive=inconclusive
    )
    logger.info(
        f"boundary squared check: {len(failures)} failures, {len(inconclusive)} inconclusive"
    )
    return report


def _rank(columns: Dict[int, Dict[int, Fraction]], rows: List[int], cols: List[int]) -> int:
    if not rows or not cols:
        return 0
    row_index = {r: i for i, r in enumerate(rows)}
    data: Dict[int, Dict[int, object]] = {}
    for j, column in enumerate(cols):
        for row, value in columns.get(column, {}).items():
            if row in row_index and value != 0:
                data.setdefault(row_index[row], {})[j] = QQ(value.numerator, value.denominator)
    if not data:
        return 0
    _, pivots = SDM(data, (len(rows), len(cols)), QQ).rref()
    return len(pivots)


def homology_ranks(c: RationalComplex) -> HomologyRanks:
    """Ranks of ∂ per parity and the Betti numbers of the truncated complex."""
    report = check_boundary_squared(c)
    if not report.success:
        diagnostics = [
            f"∂∂({' '.join(f.word) or '1'}) has {f.value} at {' '.join(f.target) or '1'}"
            for f in report.failures
        ] + [
            f"truncated ∂∂({' '.join(f.word) or '1'}) has {f.value} at {' '.join(f.target) or '1'}"
            for f in report.inconclusive
        ]
        raise ComputationRefused("the boundary does not square to zero", diagnostics=diagnostics)

    columns = _columns(c)
    even = [i for i, p in enumerate(c.parity) if p == 0]
    odd = [i for i, p in enumerate(c.parity) if p == 1]
    rank_even = _rank(columns, odd, even)
    rank_odd = _rank(columns, even, odd)
    ranks = HomologyRanks(
        dim_even=len(even),
        dim_odd=len(odd),
        rank_even=rank_even,
        rank_odd=rank_odd,
        rank_d=rank_even + rank_odd,
        betti_even=len(even) - rank_even - rank_odd,
        betti_odd=len(odd) - rank_odd - rank_even,
        truncated_terms=len(c.truncated),
    )
    logger.info(f"homology ranks: even {ranks.betti_even}, odd {ranks.betti_odd}")
    return ranks


def euler_characteristic(c: RationalComplex) -> int:
    even, odd = c.dimensions()
    return even - odd


def word_grading(word: Sequence[str], universe: OrbitUniverse, n: int) -> Optional[int]:
    """Σ (μ_CZ + n - 3) over the word, when every CZ index is known."""
    orbits = universe.by_id()
    if any(orbits[o].cz_index is None for o in word):
        return None
    return sum(orbits[o].cz_index + n - 3 for o in word)
