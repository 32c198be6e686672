import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import nextprime

from sftkit.exceptions import ComputationError, InputValidationError
from sftkit.models.cobordism import CobordismTree
from sftkit.models.grading import ApproximationReport, IndexData, IndexResult, NodeSide, NodeType
from sftkit.models.orbits import OrbitUniverse, ReebOrbit
from sftkit.models.trees import DecoratedTree, Direction
from sftkit.utils.rationals import lcm_of_denominators

logger = logging.getLogger(__name__)

SYMPLECTIZATION = "symplectization"
MARKED = "marked"
COBORDISM = "cobordism"


def integral_rescaling(actions: Sequence[Fraction]) -> Tuple[int, List[int]]:
    """Smallest positive integer multiplier making every action integral."""
    if not actions:
        raise InputValidationError("integral rescaling needs at least one action")
    for position, action in enumerate(actions):
        if action <= 0:
            raise InputValidationError(f"action must be positive, got {action}", pointer=f"/{position}")
    multiplier = lcm_of_denominators(actions)
    scaled = [int(Fraction(a) * multiplier) for a in actions]
    return multiplier, scaled


def choose_primes(
    approx_actions_plus: Iterable[int], approx_actions_minus: Iterable[int]
) -> Tuple[int, int]:
    """(p-, p+): p- just above the positive action sum, p+ far above p-."""
    plus = list(approx_actions_plus)
    minus = list(approx_actions_minus)
    if any(a <= 0 for a in plus + minus):
        raise InputValidationError("approximate actions must be positive integers")
    p_minus = int(nextprime(sum(plus)))
    p_plus = int(nextprime(p_minus * (1 + sum(plus) + sum(minus))))
    logger.debug(f"chose primes p- = {p_minus}, p+ = {p_plus}")
    return p_minus, p_plus


def _approx(approx_actions: Dict[str, int], orbit_id: str) -> int:
    if orbit_id not in approx_actions:
        raise InputValidationError(f"no approximate action for orbit {orbit_id}")
    value = approx_actions[orbit_id]
    if Fraction(value).denominator != 1:
        raise InputValidationError(f"approximate action of {orbit_id} is not integral: {value}")
    return int(value)


def _puncture_orbits(t: DecoratedTree, vertex_id: str) -> Tuple[List[str], List[str]]:
    """Orbits at the positive and negative punctures of the curve at vertex_id."""
    positive = [e.orbit for e in t.internal_edges if e.target == vertex_id]
    negative = [e.orbit for e in t.internal_edges if e.source == vertex_id]
    positive += [e.orbit for e in t.exterior_at(vertex_id) if e.direction is Direction.IN]
    negative += [e.orbit for e in t.exterior_at(vertex_id) if e.direction is Direction.OUT]
    return positive, negative


def framing_degrees(t: DecoratedTree, p: int, approx_actions: Dict[str, int]) -> Dict[str, int]:
    """d_v = |D_v| - 2 + p(ΣÃ at positive punctures - ΣÃ at negative punctures), all positive."""
    if p < 1:
        raise InputValidationError(f"p must be a positive integer, got {p}")
    degrees: Dict[str, int] = {}
    for vertex_id in sorted(t.vertex_ids()):
        positive, negative = _puncture_orbits(t, vertex_id)
        energy = sum(_approx(approx_actions, o) for o in positive) - sum(
            _approx(approx_actions, o) for o in negative
        )
        degree = t.valence(vertex_id) - 2 + p * energy
        if degree <= 0:
            raise ComputationError(f"framing degree at vertex {vertex_id} is {degree}, must be positive")
        degrees[vertex_id] = degree
    return degrees


def cobordism_framing_degrees(
    c: CobordismTree, p_plus: int, p_minus: int, approx_actions: Dict[str, int]
) -> Dict[str, int]:
    """Framing degrees weighting each end by the prime of the piece it lies in."""
    primes = {0: p_plus, 1: p_minus}
    degrees: Dict[str, int] = {}
    for vertex_id in sorted(c.tree.vertex_ids()):
        positive, negative = _puncture_orbits(c.tree, vertex_id)
        upper = primes[c.vertex_star_plus[vertex_id]] * sum(_approx(approx_actions, o) for o in positive)
        lower = primes[c.vertex_star_minus[vertex_id]] * sum(_approx(approx_actions, o) for o in negative)
        degree = c.tree.valence(vertex_id) - 2 + upper - lower
        if degree <= 0:
            raise ComputationError(f"framing degree at vertex {vertex_id} is {degree}, must be positive")
        degrees[vertex_id] = degree
    return degrees


def auxiliary_degree(
    gamma_plus: Sequence[str],
    gamma_minus: Sequence[str],
    p: int,
    approx_actions: Dict[str, int],
    convention: str = SYMPLECTIZATION,
) -> int:
    """d = d' - 2 (symplectization) or d = d' + |Γ+| + |Γ-| - 2 (marked), d' = p(ΣÃ+ - ΣÃ-)."""
    d_prime = p * (
        sum(_approx(approx_actions, o) for o in gamma_plus)
        - sum(_approx(approx_actions, o) for o in gamma_minus)
    )
    if convention == SYMPLECTIZATION:
        return d_prime - 2
    if convention == MARKED:
        return d_prime + len(gamma_plus) + len(gamma_minus) - 2
    raise InputValidationError(f"unknown degree convention {convention!r}")


def check_integral_approximation(
    actions: Dict[str, Fraction],
    approx_actions: Dict[str, int],
    pairs: Iterable[Tuple[Sequence[str], Sequence[str]]],
) -> ApproximationReport:
    """Every pair with positive action difference keeps a positive approximate difference."""
    diagnostics: List[str] = []
    for position, (plus, minus) in enumerate(pairs):
        exact = sum((actions[o] for o in plus), Fraction(0)) - sum((actions[o] for o in minus), Fraction(0))
        approx = sum(_approx(approx_actions, o) for o in plus) - sum(_approx(approx_actions, o) for o in minus)
        if exact > 0 and approx <= 0:
            diagnostics.append(
                f"pair {position}: action difference {exact} but approximate difference {approx}"
            )
    return ApproximationReport(valid=not diagnostics, diagnostics=diagnostics)


def _corrected(side: NodeSide, p_plus: int, p_minus: int, with_omega: bool) -> int:
    value = side.degree - p_plus * sum(side.plus_weights) + p_minus * sum(side.minus_weights)
    if with_omega:
        value -= side.omega_degree
    return value


def node_type(
    side_0: NodeSide,
    side_1: NodeSide,
    p: Optional[int] = None,
    variant: str = SYMPLECTIZATION,
    p_plus: Optional[int] = None,
    p_minus: Optional[int] = None,
) -> NodeType:
    """Type and order of a separating node from the data on its two sides."""
    if variant == SYMPLECTIZATION:
        if p is None:
            raise InputValidationError("the symplectization node type needs p")
        first = _corrected(side_0, p, p, with_omega=True)
        second = _corrected(side_1, p, p, with_omega=True)
    elif variant == COBORDISM:
        if p_plus is None or p_minus is None:
            raise InputValidationError("the cobordism node type needs p+ and p-")
        first = _corrected(side_0, p_plus, p_minus, with_omega=False)
        second = _corrected(side_1, p_plus, p_minus, with_omega=False)
    else:
        raise InputValidationError(f"unknown node type variant {variant!r}")
    d_x = first - second
    return NodeType(node_type=0 if d_x == 0 else 1, order=abs(d_x), d_x=d_x)


def fredholm_index(d: IndexData) -> IndexResult:
    """nχ - n(#CZ+ + #CZ-) + 2c1 + ΣCZ+ - ΣCZ-, with vdim after the translation quotient."""
    punctures = len(d.cz_plus) + len(d.cz_minus)
    index = d.n * d.euler_char - d.n * punctures + 2 * d.c1 + sum(d.cz_plus) - sum(d.cz_minus)
    vdim = index + d.domain_dimension if d.cobordism else index - 1 + d.domain_dimension
    return IndexResult(index=index, vdim=vdim)


def energy(
    gamma_plus: Sequence[str], gamma_minus: Sequence[str], universe: OrbitUniverse
) -> Fraction:
    """𝒜(Γ+) - 𝒜(Γ-)."""
    orbits = universe.by_id()
    total = Fraction(0)
    for sign, side in ((1, gamma_plus), (-1, gamma_minus)):
        for orbit_id in side:
            if orbit_id not in orbits:
                raise InputValidationError(f"unknown orbit {orbit_id}")
            total += sign * orbits[orbit_id].action
    return total


def classify_goodness(gamma: ReebOrbit, universe: OrbitUniverse) -> bool:
    """False exactly for even covers of a simple orbit with an odd count of eigenvalues in (-1, 0)."""
    if not universe.has(gamma.simple_id):
        raise InputValidationError(f"simple orbit {gamma.simple_id} of {gamma.id} is not in the universe")
    simple = universe.get(gamma.simple_id)
    return not (gamma.multiplicity % 2 == 0 and simple.odd_neg_eigenvalues)


def good_orbits(universe: OrbitUniverse) -> List[ReebOrbit]:
    return [o for o in universe.within_bound() if classify_goodness(o, universe)]


def integer_grading(gamma: ReebOrbit, n: int) -> Optional[int]:
    """μ_CZ + n - 3 when the CZ index is known."""
    if gamma.cz_index is None:
        return None
    return gamma.cz_index + n - 3


def parity_consistency(gamma: ReebOrbit, n: int) -> Optional[str]:
    """Warn when the declared parity differs from μ_CZ + n - 3 mod 2."""
    grading = integer_grading(gamma, n)
    if grading is None or grading % 2 == gamma.parity_bit:
        return None
    message = (
        f"orbit {gamma.id}: declared parity {gamma.parity.value} differs from "
        f"cz + n - 3 = {grading}"
    )
    logger.warning(message)
    return message
