import itertools
import logging
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx

from sftkit.config import config
from sftkit.exceptions import ComputationError, InputValidationError
from sftkit.models.counts import CountTable
from sftkit.models.flows import (
    Breaking,
    NormEntry,
    OrbitSequence,
    Partition,
    PrecedenceReport,
    StratumLabel,
)
from sftkit.models.orbits import OrbitUniverse

logger = logging.getLogger(__name__)

Multiset = Tuple[str, ...]
Chain = Tuple[Tuple[int, ...], ...]
BreakingIndex = Dict[str, Set[Multiset]]

MINUS = "minus"
PLUS = "plus"


def _actions(universe: OrbitUniverse) -> Dict[str, Fraction]:
    return {o.id: o.action for o in universe.within_bound()}


def _action(orbits: Iterable[str], actions: Dict[str, Fraction]) -> Fraction:
    return sum((actions[o] for o in orbits), Fraction(0))


def validate_sequence(seq: OrbitSequence, universe: OrbitUniverse) -> None:
    actions = _actions(universe)
    for position, orbit_id in enumerate(seq.orbits):
        if orbit_id not in actions:
            raise InputValidationError(
                f"orbit {orbit_id} is unknown or above the action bound", pointer=f"/orbits/{position}"
            )


def _breaking_index(
    breakings: Optional[Sequence[Breaking]], actions: Dict[str, Fraction]
) -> Optional[BreakingIndex]:
    if breakings is None:
        return None
    index: BreakingIndex = {}
    for position, breaking in enumerate(breakings):
        involved = [breaking.positive] + list(breaking.negative)
        unknown = sorted({o for o in involved if o not in actions})
        if unknown:
            raise InputValidationError(
                f"breaking uses unknown orbit {', '.join(unknown)}", pointer=f"/breakings/{position}"
            )
        if _action(breaking.negative, actions) >= actions[breaking.positive]:
            raise InputValidationError(
                f"breaking {breaking.positive} -> {breaking.negative} has nonpositive energy",
                pointer=f"/breakings/{position}",
            )
        positive, negative = breaking.key()
        index.setdefault(positive, set()).add(negative)
    return index


def _fiber(lower: Sequence[str], assignment: Sequence[int], position: int) -> Multiset:
    return tuple(sorted(lower[i] for i, image in enumerate(assignment) if image == position))


def _step_admissible(
    lower: Sequence[str],
    upper: Sequence[str],
    assignment: Sequence[int],
    index: Optional[BreakingIndex],
    actions: Dict[str, Fraction],
) -> bool:
    """Every fiber is a trivial cylinder or a breaking, and at least one fiber is not trivial.

    Without declared breakings any fiber of strictly smaller action counts as a breaking.
    """
    nontrivial = False
    for position, gamma in enumerate(upper):
        fiber = _fiber(lower, assignment, position)
        if fiber == (gamma,):
            continue
        nontrivial = True
        if index is None:
            if _action(fiber, actions) >= actions[gamma]:
                return False
        elif fiber not in index.get(gamma, ()):
            return False
    return nontrivial


def enumerate_partitions(
    gm: OrbitSequence,
    gp: OrbitSequence,
    universe: Optional[OrbitUniverse] = None,
    energy_filter: bool = False,
) -> List[Partition]:
    """All functions Γ- → Γ+ in lexicographic order of their image lists.

    With energy_filter, keep only partitions where every fiber has action strictly below its target.
    """
    if energy_filter and universe is None:
        raise InputValidationError("the energy filter needs an orbit universe")
    actions = _actions(universe) if universe is not None else {}
    if universe is not None:
        validate_sequence(gm, universe)
        validate_sequence(gp, universe)

    partitions: List[Partition] = []
    for images in itertools.product(range(len(gp)), repeat=len(gm)):
        if energy_filter and any(
            _action(_fiber(gm.orbits, images, j), actions) >= actions[gamma]
            for j, gamma in enumerate(gp.orbits)
        ):
            continue
        partitions.append(Partition(assignment=list(images), targets=len(gp)))
    logger.debug(f"{len(partitions)} partitions from {gm.render()} to {gp.render()}")
    return partitions


def _multisets(universe: OrbitUniverse, max_length: int) -> List[Multiset]:
    ids = sorted(o.id for o in universe.within_bound())
    result: List[Multiset] = []
    for length in range(max_length + 1):
        result.extend(itertools.combinations_with_replacement(ids, length))
    return result


def breakings_from_counts(counts: CountTable) -> List[Breaking]:
    """The support of a count table as declared breakings."""
    keys = sorted({entry.key for entry in counts.counts})
    return [Breaking(positive=positive, negative=list(negative)) for positive, negative in keys]


def adjacency_from_breakings(
    universe: OrbitUniverse,
    breakings: Sequence[Breaking],
    max_length: Optional[int] = None,
) -> List[Tuple[Multiset, Multiset]]:
    """Pairs Γ ≺ Γ' of sorted sequences joined in one step of declared breakings."""
    if max_length is None:
        max_length = config.complex.max_sequence_length
    actions = _actions(universe)
    index = _breaking_index(breakings, actions)

    relations: Set[Tuple[Multiset, Multiset]] = set()
    for upper in _multisets(universe, max_length):
        options = [[((gamma,), False)] + [(b, True) for b in sorted(index.get(gamma, ()))] for gamma in upper]
        for choice in itertools.product(*options):
            if not any(nontrivial for _, nontrivial in choice):
                continue
            lower = tuple(sorted(o for fiber, _ in choice for o in fiber))
            if len(lower) <= max_length:
                relations.add((lower, upper))
    logger.info(f"{len(relations)} adjacent pairs from {len(breakings)} breakings")
    return sorted(relations, key=lambda r: (_action(r[1], actions), r[1], _action(r[0], actions), r[0]))


def precedence_and_norm(
    universe: OrbitUniverse, adjacency: Iterable[Tuple[Sequence[str], Sequence[str]]]
) -> PrecedenceReport:
    """The declared order ≺ with ‖(Γ, Γ')‖ the longest chain Γ = Γ0 ≺ ... ≺ Γk ≺ Γ'."""
    actions = _actions(universe)
    graph = nx.DiGraph()
    for position, (lower, upper) in enumerate(adjacency):
        lower_key, upper_key = tuple(sorted(lower)), tuple(sorted(upper))
        unknown = sorted({o for o in lower_key + upper_key if o not in actions})
        if unknown:
            raise InputValidationError(
                f"adjacency uses unknown orbit {', '.join(unknown)}", pointer=f"/adjacency/{position}"
            )
        graph.add_edge(lower_key, upper_key)

    if not nx.is_directed_acyclic_graph(graph):
        cycle = nx.find_cycle(graph)
        raise ComputationError(
            f"adjacency is cyclic and violates energy monotonicity: "
            f"{' -> '.join('(' + ','.join(u) + ')' for u, _ in cycle)}"
        )
    for lower, upper in graph.edges:
        if _action(upper, actions) <= _action(lower, actions):
            raise InputValidationError(
                f"adjacent pair ({','.join(lower)}) < ({','.join(upper)}) has nonpositive energy"
            )

    order = list(nx.lexicographical_topological_sort(graph))
    norms: List[NormEntry] = []
    for source in order:
        # longest path lengths in edges, by relaxation in topological order
        dist: Dict[Multiset, int] = {source: 0}
        for node in order:
            reached = [dist[u] + 1 for u in graph.pred[node] if u in dist]
            if reached and node != source:
                dist[node] = max(reached)
        for target, length in dist.items():
            if target != source:
                norms.append(NormEntry(lower=list(source), upper=list(target), norm=length - 1))

    def node_key(node: Multiset) -> Tuple[Fraction, Multiset]:
        return _action(node, actions), node

    nodes = sorted(graph.nodes, key=node_key)
    report = PrecedenceReport(
        nodes=[list(n) for n in nodes],
        relations=[(list(u), list(v)) for u, v in sorted(graph.edges, key=lambda e: (node_key(e[0]), node_key(e[1])))],
        norms=sorted(norms, key=lambda e: (node_key(tuple(e.lower)), node_key(tuple(e.upper)))),
    )
    logger.info(f"precedence order on {len(nodes)} sequences with {len(report.norms)} comparable pairs")
    return report


def _admissible_chains(
    sequences: Sequence[Multiset], index: Optional[BreakingIndex], actions: Dict[str, Fraction]
) -> Iterator[Chain]:
    """All partition chains through fixed sequences whose every step is admissible."""
    if len(sequences) < 2:
        yield ()
        return
    lower, upper = sequences[0], sequences[1]
    for images in itertools.product(range(len(upper)), repeat=len(lower)):
        if not _step_admissible(lower, upper, images, index, actions):
            continue
        for rest in _admissible_chains(sequences[1:], index, actions):
            yield (images,) + rest


def _check_permutation(sigma: Sequence[int], size: int) -> None:
    if sorted(sigma) != list(range(size)):
        raise InputValidationError(f"{list(sigma)} is not a permutation of {size} positions")


def _act_on_chain(
    sequences: Sequence[Multiset], partitions: Chain, position: int, sigma: Sequence[int]
) -> Tuple[Tuple[Multiset, ...], Chain]:
    """Move entry i of sequence `position` to sigma[i], relabeling the adjacent partitions."""
    new_sequences = list(sequences)
    new_partitions = list(partitions)
    reordered = [""] * len(sigma)
    for i, orbit_id in enumerate(sequences[position]):
        reordered[sigma[i]] = orbit_id
    new_sequences[position] = tuple(reordered)
    if position > 0:
        new_partitions[position - 1] = tuple(sigma[a] for a in partitions[position - 1])
    if position < len(partitions):
        outgoing = [0] * len(sigma)
        for i, image in enumerate(partitions[position]):
            outgoing[sigma[i]] = image
        new_partitions[position] = tuple(outgoing)
    return tuple(new_sequences), tuple(new_partitions)


def _orbit(sequences: Sequence[Multiset], partitions: Chain) -> Set[Tuple[Tuple[Multiset, ...], Chain]]:
    """Images under permutations of every intermediate sequence."""
    inner = range(1, len(sequences) - 1)
    choices = [list(itertools.permutations(range(len(sequences[i])))) for i in inner]
    images = set()
    for sigmas in itertools.product(*choices):
        current = (tuple(sequences), tuple(partitions))
        for position, sigma in zip(inner, sigmas):
            current = _act_on_chain(current[0], current[1], position, sigma)
        images.add(current)
    return images


def _canonical(sequences: Sequence[Multiset], partitions: Chain) -> Tuple[Tuple[Multiset, ...], Chain]:
    return min(_orbit(sequences, partitions))


def _to_label(sequences: Sequence[Multiset], partitions: Chain) -> StratumLabel:
    return StratumLabel(
        sequences=[OrbitSequence(orbits=list(s)) for s in sequences],
        partitions=[
            Partition(assignment=list(p), targets=len(sequences[i + 1])) for i, p in enumerate(partitions)
        ],
    )


def _from_label(label: StratumLabel) -> Tuple[Tuple[Multiset, ...], Chain]:
    return tuple(s.key() for s in label.sequences), tuple(p.key() for p in label.partitions)


def _compose_chain(partitions: Chain, start: int) -> Tuple[int, ...]:
    current = tuple(range(start))
    for p in partitions:
        current = tuple(p[i] for i in current)
    return current


def boundary_strata(
    gm: OrbitSequence,
    gp: OrbitSequence,
    lam: Partition,
    depth: int,
    universe: OrbitUniverse,
    breakings: Optional[Sequence[Breaking]] = None,
    max_length: Optional[int] = None,
) -> List[StratumLabel]:
    """Codimension-`depth` strata of the morphism space from Γ- to Γ+ over Λ, up to the symmetric action on intermediates."""
    if depth < 1:
        raise InputValidationError(f"boundary strata have depth at least 1, got {depth}")
    if len(lam.assignment) != len(gm) or lam.targets != len(gp):
        raise InputValidationError(f"partition {lam.assignment} does not map {gm.render()} to {gp.render()}")
    validate_sequence(gm, universe)
    validate_sequence(gp, universe)
    if max_length is None:
        max_length = config.complex.max_sequence_length

    actions = _actions(universe)
    index = _breaking_index(breakings, actions)
    low, high = _action(gm.orbits, actions), _action(gp.orbits, actions)
    candidates = sorted(
        (m for m in _multisets(universe, max_length) if low < _action(m, actions) < high),
        key=lambda m: (_action(m, actions), m),
    )

    found: Dict[Tuple[Tuple[Multiset, ...], Chain], StratumLabel] = {}
    for intermediates in itertools.combinations(candidates, depth):
        levels = [_action(m, actions) for m in intermediates]
        if any(a >= b for a, b in zip(levels, levels[1:])):
            continue
        sequences = (gm.key(),) + intermediates + (gp.key(),)
        for partitions in _admissible_chains(sequences, index, actions):
            if _compose_chain(partitions, len(gm)) != lam.key():
                continue
            canonical = _canonical(sequences, partitions)
            if canonical not in found:
                found[canonical] = _to_label(*canonical)
    strata = [found[k] for k in sorted(found)]
    logger.info(f"{len(strata)} codimension-{depth} strata from {gm.render()} to {gp.render()}")
    return strata


def check_composition_associativity(
    gm: OrbitSequence,
    mid1: OrbitSequence,
    mid2: OrbitSequence,
    gp: OrbitSequence,
    universe: OrbitUniverse,
    breakings: Optional[Sequence[Breaking]] = None,
    max_length: Optional[int] = None,
) -> bool:
    """Compare (gm→mid1→mid2)∘(mid2→gp) with (gm→mid1)∘(mid1→mid2→gp).

    Each bracketing composes the codimension-one strata of its two-step factor with the
    admissible one-step factor. Both are grouped by composite partition and compared up to
    the symmetric action on intermediates. Strata whose intermediate falls outside
    `max_length` are missing from one side, so truncation can break agreement.
    """
    for seq in (gm, mid1, mid2, gp):
        validate_sequence(seq, universe)
    if max_length is None:
        max_length = max(len(mid1), len(mid2))
    actions = _actions(universe)
    index = _breaking_index(breakings, actions)
    sequences = (gm.key(), mid1.key(), mid2.key(), gp.key())

    def strata_through(
        lower: OrbitSequence, upper: OrbitSequence, middle: OrbitSequence
    ) -> Iterator[Tuple[Tuple[Multiset, ...], Chain]]:
        for images in itertools.product(range(len(upper)), repeat=len(lower)):
            lam = Partition(assignment=list(images), targets=len(upper))
            for label in boundary_strata(lower, upper, lam, 1, universe, breakings, max_length):
                chain_sequences, partitions = _from_label(label)
                if tuple(sorted(chain_sequences[1])) == middle.multiset():
                    yield chain_sequences, partitions

    def grouped(chains: Iterator[Tuple[Tuple[Multiset, ...], Chain]]) -> Dict[Tuple[int, ...], Set]:
        groups: Dict[Tuple[int, ...], Set] = {}
        for chain_sequences, partitions in chains:
            lam = _compose_chain(partitions, len(gm))
            groups.setdefault(lam, set()).add(_canonical(chain_sequences, partitions))
        return groups

    def left_chains() -> Iterator[Tuple[Tuple[Multiset, ...], Chain]]:
        last_steps = list(_admissible_chains([mid2.key(), gp.key()], index, actions))
        for (low, inner, _), partitions in strata_through(gm, mid2, mid1):
            for step in last_steps:
                yield (low, inner) + sequences[2:], partitions + step

    def right_chains() -> Iterator[Tuple[Tuple[Multiset, ...], Chain]]:
        first_steps = list(_admissible_chains([gm.key(), mid1.key()], index, actions))
        for (_, inner, high), partitions in strata_through(mid1, gp, mid2):
            for step in first_steps:
                yield sequences[:2] + (inner, high), step + partitions

    left, right = grouped(left_chains()), grouped(right_chains())
    agree = left == right
    if not agree:
        differing = sorted(lam for lam in set(left) | set(right) if left.get(lam) != right.get(lam))
        logger.warning(
            f"associativity fails through {mid1.render()} and {mid2.render()} "
            f"for composite partitions {[list(lam) for lam in differing]}"
        )
    return agree


def symmetric_action(
    sigma: Sequence[int],
    target: Union[Partition, StratumLabel],
    side: Union[str, int] = MINUS,
) -> Union[Partition, StratumLabel]:
    """Relabel by σ acting on Γ- (`minus`), Γ+ (`plus`) or, for strata, the sequence at an index.

    Entry i moves to position σ[i].
    """
    if isinstance(target, Partition):
        if side == MINUS:
            _check_permutation(sigma, len(target.assignment))
            moved = [0] * len(sigma)
            for i, image in enumerate(target.assignment):
                moved[sigma[i]] = image
            return Partition(assignment=moved, targets=target.targets)
        if side == PLUS:
            _check_permutation(sigma, target.targets)
            return Partition(assignment=[sigma[a] for a in target.assignment], targets=target.targets)
        raise InputValidationError(f"a partition has sides {MINUS!r} and {PLUS!r}, got {side!r}")

    sequences, partitions = _from_label(target)
    if side == MINUS:
        position = 0
    elif side == PLUS:
        position = len(sequences) - 1
    elif isinstance(side, int) and 0 <= side < len(sequences):
        position = side
    else:
        raise InputValidationError(f"no sequence {side!r} in a stratum of length {len(sequences)}")
    _check_permutation(sigma, len(sequences[position]))
    return _to_label(*_act_on_chain(sequences, partitions, position, sigma))


def stratum_orbit(label: StratumLabel) -> List[StratumLabel]:
    """The orbit [β] of a stratum under permutations of its intermediate sequences."""
    return [_to_label(*image) for image in sorted(_orbit(*_from_label(label)))]


def stratum_energy(label: StratumLabel, universe: OrbitUniverse) -> Tuple[List[Fraction], Fraction]:
    """Energies of the pieces of a chain and of the whole; the pieces add up to the whole."""
    actions = _actions(universe)
    levels = [_action(s.orbits, actions) for s in label.sequences]
    pieces = [b - a for a, b in zip(levels, levels[1:])]
    return pieces, levels[-1] - levels[0]
