import itertools
import logging
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx
from sympy import Matrix, Rational as SympyRational
from sympy.solvers.simplex import linprog

from sftkit.config import config
from sftkit.exceptions import ComputationError, InputValidationError
from sftkit.levels import (
    brute_force_level_functions,
    enumerate_maximal_levels,
    pre_level,
    require_valid_level,
)
from sftkit.models.levels import LeveledForest, LeveledTree, LevelFunction
from sftkit.models.monoids import CoverageReport, FreeMonoid, Refinement, SmoothnessCertificate
from sftkit.models.orbits import ReebOrbit
from sftkit.models.posets import FaceElement, FacePoset
from sftkit.models.trees import DecoratedForest, DecoratedTree, Direction, ExteriorEdge
from sftkit.trees import contract, ghost_edges, ghost_join, to_digraph

logger = logging.getLogger(__name__)


def _edge_order(t: DecoratedTree, edge_order: Optional[Sequence[str]]) -> List[str]:
    keys = t.edge_keys()
    if edge_order is None:
        return keys
    if sorted(edge_order) != sorted(keys):
        raise InputValidationError(
            f"edge order {list(edge_order)} is not a permutation of the interior edges {keys}"
        )
    return list(edge_order)


def _check_rank(rank: int) -> None:
    if rank > config.limits.max_cone_rank:
        raise ComputationError(f"cone rank {rank} exceeds the limit {config.limits.max_cone_rank}")


def cut_vector(t: DecoratedTree, upper: Set[str], coordinates: Sequence[str]) -> List[int]:
    """Indicator vector of the interior edges leaving the vertex set upper."""
    by_key = t.edges_by_key()
    return [
        1 if by_key[k].source in upper and by_key[k].target not in upper else 0
        for k in coordinates
    ]


def leveled_monoid(lt: LeveledTree, edge_order: Optional[Sequence[str]] = None) -> FreeMonoid:
    """The cone of a maximal level function, generated by its level cuts.

    The m-th generator is the sum of the edges (v, w) with ℓ(v) < m ≤ ℓ(w), so a
    point of the cone assigns each edge the total length of the level gaps it spans.
    """
    t = lt.tree
    require_valid_level(t, lt.level)
    if not lt.level.is_maximal():
        raise ComputationError("leveled monoids are defined for maximal level functions only")
    coordinates = _edge_order(t, edge_order)
    _check_rank(len(coordinates))

    levels = lt.level.levels
    generators = []
    for m in range(2, lt.size + 1):
        upper = {v for v, level in levels.items() if level < m}
        generators.append(cut_vector(t, upper, coordinates))
    return FreeMonoid(coordinates=coordinates, generators=generators)


def base_monoid(t: DecoratedTree, edge_order: Optional[Sequence[str]] = None) -> FreeMonoid:
    """σ_T, freely generated by the interior edges."""
    coordinates = _edge_order(t, edge_order)
    identity = [[1 if i == j else 0 for j in range(len(coordinates))] for i in range(len(coordinates))]
    return FreeMonoid(coordinates=coordinates, generators=identity)


def build_refinement(t: DecoratedTree, edge_order: Optional[Sequence[str]] = None) -> Refinement:
    """Refinement of σ_T generated by the leveled monoids of all maximal level functions."""
    base = base_monoid(t, edge_order)
    _check_rank(base.dimension)
    maximal = enumerate_maximal_levels(t)
    cones = [leveled_monoid(LeveledTree(tree=t, level=l), base.coordinates) for l in maximal]
    logger.info(f"built refinement with {len(cones)} maximal cones in rank {base.dimension}")
    return Refinement(base=base, maximal_cones=cones, levels=maximal)


def _to_fractions(matrix: Matrix) -> List[List[Fraction]]:
    return [
        [Fraction(int(entry.p), int(entry.q)) for entry in matrix.row(i)]
        for i in range(matrix.rows)
    ]


def _coordinates_in(inverse: List[List[Fraction]], point: Sequence[Union[int, Fraction]]) -> List[Fraction]:
    return [sum((row[j] * point[j] for j in range(len(point))), Fraction(0)) for row in inverse]


def _intersection_witness(a: FreeMonoid, b: FreeMonoid) -> Optional[List[Fraction]]:
    """A point of a ∩ b outside the cone of their common generators, if one exists."""
    common = set(map(tuple, a.generators)) & set(map(tuple, b.generators))
    outside = [j for j, g in enumerate(a.generators) if tuple(g) not in common]
    if not outside:
        return None
    n = a.rank
    to_b = b.matrix().inv() * a.matrix()

    # maximise the weight off the common face over a ∩ b, normalised by Σy ≤ 1
    objective = [-1 if j in outside else 0 for j in range(n)]
    rows = [[-to_b[i, j] for j in range(n)] for i in range(to_b.rows)]
    rows.append([1] * n)
    bounds = [0] * to_b.rows + [1]
    value, solution = linprog(objective, Matrix(rows), Matrix(bounds))
    if value >= 0:
        return None
    point = a.matrix() * Matrix(solution)
    return [Fraction(int(SympyRational(x).p), int(SympyRational(x).q)) for x in point]


def _facets(cone: FreeMonoid) -> List[FrozenSet[Tuple[int, ...]]]:
    generators = [tuple(g) for g in cone.generators]
    return [frozenset(generators[:i] + generators[i + 1:]) for i in range(len(generators))]


def is_smooth_refinement(r: Refinement) -> SmoothnessCertificate:
    """Certify unimodularity, face-to-face intersections and covering of the base cone."""
    diagnostics: List[str] = []
    determinants: List[int] = []
    dimension = r.base.dimension
    _check_rank(dimension)
    if dimension == 0:
        # A corolla: the only cone is the origin
        single = len(r.maximal_cones) == 1
        return SmoothnessCertificate(
            smooth=single,
            determinants=[1] * len(r.maximal_cones),
            diagnostics=[] if single else [f"expected one cone in rank 0, got {len(r.maximal_cones)}"],
        )

    # Unimodular maximal cones
    invertible: List[bool] = []
    for index, cone in enumerate(r.maximal_cones):
        if cone.rank != dimension:
            diagnostics.append(f"cone {index} has {cone.rank} generators in rank {dimension}")
            determinants.append(0)
            invertible.append(False)
            continue
        det = int(cone.matrix().det())
        determinants.append(det)
        invertible.append(det != 0)
        if abs(det) != 1:
            diagnostics.append(f"cone {index} has determinant {det}")

    canonical = [cone.canonical() for cone in r.maximal_cones]
    for i, j in itertools.combinations(range(len(canonical)), 2):
        if canonical[i] == canonical[j]:
            diagnostics.append(f"cones {i} and {j} coincide")

    # Face-to-face intersections
    counterexample: Optional[List[Fraction]] = None
    for i, j in itertools.combinations(range(len(r.maximal_cones)), 2):
        if not (invertible[i] and invertible[j]) or canonical[i] == canonical[j]:
            continue
        witness = _intersection_witness(r.maximal_cones[i], r.maximal_cones[j])
        if witness is not None:
            diagnostics.append(f"cones {i} and {j} meet outside a common face")
            counterexample = counterexample or witness

    # Covering: cones inside the base, every interior facet shared by exactly two cones
    base_inverse = _to_fractions(r.base.matrix().inv())
    for index, cone in enumerate(r.maximal_cones):
        for generator in cone.generators:
            coords = _coordinates_in(base_inverse, generator)
            if any(c < 0 for c in coords):
                diagnostics.append(f"cone {index} leaves the base cone along {generator}")
    for generator in r.base.generators:
        if not any(generator in cone.generators for cone in r.maximal_cones):
            diagnostics.append(f"base generator {generator} is not a ray of the refinement")

    facet_count: Dict[FrozenSet[Tuple[int, ...]], int] = {}
    for cone in r.maximal_cones:
        for facet in _facets(cone):
            facet_count[facet] = facet_count.get(facet, 0) + 1
    for facet, count in sorted(facet_count.items(), key=lambda item: sorted(item[0])):
        zero_sets = [
            {k for k, c in enumerate(_coordinates_in(base_inverse, g)) if c == 0} for g in facet
        ]
        # The apex of a ray lies on the boundary
        on_boundary = bool(set.intersection(*zero_sets)) if zero_sets else True
        if on_boundary and count == 1:
            continue
        if not on_boundary and count == 2:
            continue
        diagnostics.append(
            f"facet {sorted(facet)} lies in {count} cones"
            + (" on the boundary" if on_boundary else " in the interior")
        )

    smooth = not diagnostics
    logger.debug(f"refinement smoothness check: {'ok' if smooth else '; '.join(diagnostics)}")
    return SmoothnessCertificate(
        smooth=smooth,
        determinants=determinants,
        counterexample=counterexample,
        diagnostics=diagnostics,
    )


def box_coverage(r: Refinement, side: int = 5) -> CoverageReport:
    """Check every integer combination of base generators with coefficients below side."""
    if r.base.dimension == 0:
        return CoverageReport(side=side, points_checked=1)
    inverses: List[Optional[List[List[Fraction]]]] = []
    for cone in r.maximal_cones:
        square = cone.rank == cone.dimension and cone.matrix().det() != 0
        inverses.append(_to_fractions(cone.matrix().inv()) if square else None)
    generator_sets = [set(map(tuple, cone.generators)) for cone in r.maximal_cones]

    uncovered: List[List[int]] = []
    overlaps: List[List[int]] = []
    checked = 0
    for coefficients in itertools.product(range(side), repeat=r.base.rank):
        point = [
            sum(c * g[k] for c, g in zip(coefficients, r.base.generators))
            for k in range(r.base.dimension)
        ]
        checked += 1
        supports = []
        for index, inverse in enumerate(inverses):
            if inverse is None:
                continue
            coords = _coordinates_in(inverse, point)
            if all(c >= 0 for c in coords):
                gens = r.maximal_cones[index].generators
                supports.append((index, {tuple(gens[k]) for k, c in enumerate(coords) if c > 0}))
        if not supports:
            uncovered.append(point)
            continue
        for (i, support_i), (j, _) in itertools.combinations(supports, 2):
            if not support_i <= (generator_sets[i] & generator_sets[j]):
                overlaps.append(point)
                break
    return CoverageReport(side=side, points_checked=checked, uncovered=uncovered, overlaps=overlaps)


def down_sets(t: DecoratedTree) -> List[FrozenSet[str]]:
    """Nonempty proper vertex sets closed under taking parents, in canonical order."""
    graph = to_digraph(t)
    ids = sorted(graph.nodes)
    closed: List[FrozenSet[str]] = []
    for size in range(1, len(ids)):
        for subset in itertools.combinations(ids, size):
            chosen = set(subset)
            if all(set(graph.predecessors(v)) <= chosen for v in chosen):
                closed.append(frozenset(chosen))
    return closed


def _chains(sets: List[FrozenSet[str]]) -> List[Tuple[FrozenSet[str], ...]]:
    chains: List[Tuple[FrozenSet[str], ...]] = [()]
    frontier: List[Tuple[FrozenSet[str], ...]] = [()]
    while frontier:
        extended = []
        for chain in frontier:
            for s in sets:
                if not chain or (chain[-1] < s):
                    extended.append(chain + (s,))
        chains.extend(extended)
        frontier = extended
    return chains


def _chain_label(t: DecoratedTree, chain: Tuple[FrozenSet[str], ...]) -> Tuple[List[str], LeveledTree, List[List[str]]]:
    """Collapsed edges and leveled contraction of t described by a chain of down-sets."""
    ids = set(t.vertex_ids())
    bounds = list(chain) + [frozenset(ids)]
    block_of: Dict[str, int] = {}
    blocks: List[List[str]] = []
    previous: FrozenSet[str] = frozenset()
    for index, bound in enumerate(bounds):
        block = sorted(bound - previous)
        blocks.append(block)
        for vertex_id in block:
            block_of[vertex_id] = index
        previous = bound

    collapsed = sorted(
        e.key for e in t.internal_edges if block_of[e.source] == block_of[e.target]
    )
    contraction = contract(t, collapsed)
    levels = {contraction.vertex_map[v]: block_of[v] + 1 for v in ids}
    leveled = LeveledTree(
        tree=contraction.target, level=LevelFunction(levels=dict(sorted(levels.items())))
    )
    return collapsed, leveled, blocks


def refinement_face_poset(t: DecoratedTree, edge_order: Optional[Sequence[str]] = None) -> FacePoset:
    """All faces of the refinement of σ_T, each labeled by the leveled contraction it stands for.

    A face is a chain of down-sets; its generators are their cut vectors, its rank
    is the number of generators and its label has rank + 1 levels.
    """
    pre_level(t)
    coordinates = _edge_order(t, edge_order)
    _check_rank(len(coordinates))
    chains = _chains(down_sets(t))
    chains.sort(key=lambda chain: (len(chain), [sorted(s) for s in chain]))
    index = {chain: i for i, chain in enumerate(chains)}

    elements = []
    for i, chain in enumerate(chains):
        collapsed, leveled, blocks = _chain_label(t, chain)
        generators = sorted(cut_vector(t, set(s), coordinates) for s in chain)
        elements.append(
            FaceElement(
                index=i,
                rank=len(chain),
                name="/".join(",".join(block) for block in blocks),
                generators=generators,
                collapsed=collapsed,
                leveled=leveled,
            )
        )
    covers = []
    for chain, j in index.items():
        for k in range(len(chain)):
            covers.append((index[chain[:k] + chain[k + 1:]], j))
    logger.info(f"refinement face poset with {len(elements)} faces")
    return FacePoset(elements=elements, covers=sorted(covers))


def brute_force_leveled_structures(t: DecoratedTree) -> List[LeveledTree]:
    """Every contraction of t with every stable level function on it, found exhaustively."""
    pre_level(t)
    keys = t.edge_keys()
    structures: List[LeveledTree] = []
    for size in range(len(keys) + 1):
        for collapsed in itertools.combinations(keys, size):
            target = contract(t, collapsed).target
            for l in brute_force_level_functions(target):
                structures.append(LeveledTree(tree=target, level=l))
    return structures


def disconnected_face_poset(f: DecoratedForest, gamma0: Union[ReebOrbit, str]) -> FacePoset:
    """Faces of the ghost-joined refinement lying on the stratum where every ghost edge is broken.

    Labels are leveled forests: the ghost is removed, its edges become incoming
    exterior edges again and every level drops by one.
    """
    joined = ghost_join(f, gamma0)
    ghost_keys = ghost_edges(joined)
    ghost = joined.edges_by_key()[ghost_keys[0]].source
    full = refinement_face_poset(joined)
    coordinates = joined.edge_keys()
    ghost_cut = cut_vector(joined, {ghost}, coordinates)

    kept = [e for e in full.elements if ghost_cut in e.generators]
    renumber = {e.index: i for i, e in enumerate(kept)}
    elements = []
    for i, element in enumerate(kept):
        elements.append(
            FaceElement(
                index=i,
                rank=element.rank - 1,
                name=element.name.split("/", 1)[1],
                generators=element.generators,
                collapsed=element.collapsed,
                forest=_forest_label(element.leveled, ghost),
            )
        )
    covers = [
        (renumber[i], renumber[j]) for i, j in full.covers if i in renumber and j in renumber
    ]
    logger.info(f"disconnected face poset with {len(elements)} faces")
    return FacePoset(elements=elements, covers=sorted(covers))


def _forest_label(leveled: LeveledTree, ghost: str) -> LeveledForest:
    tree = leveled.tree
    graph = to_digraph(tree)
    graph.remove_node(ghost)
    restored = {e.target: e.orbit for e in tree.internal_edges if e.source == ghost}

    components = []
    for vertex_set in sorted(nx.weakly_connected_components(graph), key=lambda s: sorted(s)):
        exterior = [
            ExteriorEdge(vertex=v, direction=Direction.IN, orbit=restored[v])
            for v in sorted(vertex_set)
            if v in restored
        ]
        exterior += [e for e in tree.exterior_edges if e.vertex in vertex_set]
        components.append(
            DecoratedTree(
                vertices=[v for v in tree.vertices if v.id in vertex_set],
                internal_edges=[
                    e for e in tree.internal_edges
                    if e.source in vertex_set and e.target in vertex_set
                ],
                exterior_edges=exterior,
            )
        )
    levels = {v: l - 1 for v, l in leveled.level.levels.items() if v != ghost}
    return LeveledForest(
        forest=DecoratedForest(components=components),
        level=LevelFunction(levels=levels),
    )


def _stellar_subdivision(
    complex_: Set[FrozenSet[str]], face: FrozenSet[str], new_facet: str
) -> Set[FrozenSet[str]]:
    """Truncate the face with facet set `face` in a complex of facet sets."""
    kept = {s for s in complex_ if not face <= s}
    added = {
        s | {new_facet}
        for s in complex_
        if not face <= s and (s | face) in complex_
    }
    return kept | added


def blowup_simplex(n: int) -> FacePoset:
    """Face poset of the n-simplex with every face of dimension 0..n−2 blown up in order of dimension.

    Faces are recorded by the set of facets containing them, the empty set being the
    whole polytope; elements are ranked by dimension.
    """
    if n < 0:
        raise InputValidationError(f"n must be nonnegative, got {n}")
    cap = config.limits.max_simplex_dim
    if n > cap:
        raise ComputationError(f"blowup_simplex is capped at n = {cap}, got {n}")

    facets = [f"f{i}" for i in range(n + 1)]
    complex_: Set[FrozenSet[str]] = {
        frozenset(s) for size in range(n + 1) for s in itertools.combinations(facets, size)
    }
    for dimension in range(0, n - 1):
        size = n - dimension
        for face in itertools.combinations(facets, size):
            new_facet = "b[" + ",".join(face) + "]"
            complex_ = _stellar_subdivision(complex_, frozenset(face), new_facet)
        logger.debug(f"blew up all {dimension}-faces, {len(complex_)} faces now")

    ordered = sorted(complex_, key=lambda s: (-len(s), sorted(s)))
    index = {s: i for i, s in enumerate(ordered)}
    elements = [
        FaceElement(
            index=i,
            rank=n - len(s),
            name="{" + ",".join(sorted(s)) + "}",
            facets=sorted(s),
        )
        for i, s in enumerate(ordered)
    ]
    covers = [
        (index[s], index[s - {h}]) for s in ordered for h in s if (s - {h}) in index
    ]
    logger.info(f"blown-up {n}-simplex has f-vector {f_vector(FacePoset(elements=elements))}")
    return FacePoset(elements=elements, covers=sorted(covers))


def f_vector(poset: FacePoset) -> List[int]:
    """Number of elements of each rank, from rank 0 to the top rank."""
    counts = poset.rank_counts()
    if not counts:
        return []
    return [counts.get(rank, 0) for rank in range(0, max(counts) + 1)]


def is_eulerian(poset: FacePoset, add_bottom: bool = True) -> bool:
    """Every nontrivial interval has as many elements of even rank as of odd rank."""
    size = len(poset)
    rank = {e.index: e.rank for e in poset.elements}
    graph = nx.DiGraph()
    graph.add_nodes_from(rank)
    graph.add_edges_from(poset.covers)

    # down-closures as bitsets, filled in topological order
    masks: Dict[int, int] = {}
    for node in nx.topological_sort(graph):
        mask = 1 << node
        for lower in graph.predecessors(node):
            mask |= masks[lower]
        masks[node] = mask

    ups = {low: sum(1 << i for i in range(size) if (masks[i] >> low) & 1) for low in range(size)}

    bottom_rank = min(rank.values(), default=0) - 1
    even_mask = sum(1 << i for i, r in rank.items() if r % 2 == 0)
    for top in range(size):
        for low in range(size):
            if low == top or not (masks[top] >> low) & 1:
                continue
            interval = masks[top] & ups[low]
            even = bin(interval & even_mask).count("1")
            if 2 * even != bin(interval).count("1"):
                return False
        if add_bottom:
            # interval from an added bottom element to top
            even = bin(masks[top] & even_mask).count("1") + (1 if bottom_rank % 2 == 0 else 0)
            if 2 * even != bin(masks[top]).count("1") + 1:
                return False
    return True
