import functools
import logging
import math
from typing import Dict, FrozenSet, List, Optional

import networkx as nx

from sftkit.config import config
from sftkit.exceptions import ComputationError
from sftkit.models.levels import LeveledTree, LevelFunction, LevelReport
from sftkit.models.trees import DecoratedTree, ExteriorEdge, InternalEdge, TreeVertex
from sftkit.trees import require_valid_tree, to_digraph

logger = logging.getLogger(__name__)


def _ordered_graph(t: DecoratedTree) -> nx.DiGraph:
    """Directed graph of t after checking that some level function exists."""
    require_valid_tree(t)
    graph = to_digraph(t)
    for vertex_id in sorted(graph.nodes):
        if graph.in_degree(vertex_id) == 0 and not t.inputs_at(vertex_id):
            raise ComputationError(
                f"no level function exists: vertex {vertex_id} has no parent and no incoming exterior edge"
            )
    return graph


def pre_level(t: DecoratedTree) -> LevelFunction:
    """The pointwise minimal level function: 1 + longest directed path ending at v."""
    graph = _ordered_graph(t)
    levels: Dict[str, int] = {}
    for vertex_id in nx.lexicographical_topological_sort(graph):
        parents = [levels[p] for p in graph.predecessors(vertex_id)]
        levels[vertex_id] = 1 + max(parents, default=0)
    return LevelFunction(levels=dict(sorted(levels.items())))


def validate_level(t: DecoratedTree, l: LevelFunction) -> LevelReport:
    """Check the three level axioms and report every violation."""
    diagnostics: List[str] = []
    ids = set(t.vertex_ids())
    assigned = set(l.levels)

    for vertex_id in sorted(ids - assigned):
        diagnostics.append(f"vertex {vertex_id} has no level")
    for vertex_id in sorted(assigned - ids):
        diagnostics.append(f"level assigned to unknown vertex {vertex_id}")
    if diagnostics:
        return LevelReport(valid=False, diagnostics=diagnostics)

    # Level 1 only at inputs
    for vertex_id in sorted(ids):
        if l.levels[vertex_id] == 1 and not t.inputs_at(vertex_id):
            diagnostics.append(f"vertex {vertex_id} is on level 1 without an incoming exterior edge")

    # Strict increase along edges
    for edge in t.internal_edges:
        if l.levels[edge.target] < l.levels[edge.source] + 1:
            diagnostics.append(
                f"edge {edge.key} does not increase the level "
                f"({l.levels[edge.source]} -> {l.levels[edge.target]})"
            )

    # No empty levels
    occupied = set(l.levels.values())
    for level in range(1, l.size + 1):
        if level not in occupied:
            diagnostics.append(f"level {level} is empty")

    return LevelReport(valid=not diagnostics, diagnostics=diagnostics)


def require_valid_level(t: DecoratedTree, l: LevelFunction) -> None:
    report = validate_level(t, l)
    if not report.valid:
        raise ComputationError("invalid level function: " + "; ".join(report.diagnostics))


def trivial_vertex_id(source: str, target: str, position: int) -> str:
    return f"{source}~{target}~{position}"


def insert_trivial_vertices(lt: LeveledTree) -> DecoratedTree:
    """Subdivide each edge spanning g > 0 empty levels by a chain of g trivial vertices."""
    t = lt.tree
    require_valid_level(t, lt.level)
    levels = lt.level.levels

    vertices = list(t.vertices)
    edges: List[InternalEdge] = []
    for edge in t.internal_edges:
        gap = levels[edge.target] - levels[edge.source] - 1
        chain = [edge.source]
        for position in range(1, gap + 1):
            inserted = trivial_vertex_id(edge.source, edge.target, position)
            vertices.append(TreeVertex(id=inserted))
            chain.append(inserted)
        chain.append(edge.target)
        for upper, lower in zip(chain, chain[1:]):
            edges.append(InternalEdge(source=upper, target=lower, orbit=edge.orbit))

    exterior = [
        ExteriorEdge(vertex=e.vertex, direction=e.direction, orbit=e.orbit)
        for e in t.exterior_edges
    ]
    return DecoratedTree(vertices=vertices, internal_edges=edges, exterior_edges=exterior)


def insert_trivial_levels(lt: LeveledTree) -> LevelFunction:
    """Level function on insert_trivial_vertices(lt): inserted vertices fill the gaps."""
    levels = dict(lt.level.levels)
    for edge in lt.tree.internal_edges:
        base = levels[edge.source]
        gap = lt.level.levels[edge.target] - base - 1
        for position in range(1, gap + 1):
            levels[trivial_vertex_id(edge.source, edge.target, position)] = base + position
    return LevelFunction(levels=dict(sorted(levels.items())))


def enumerate_maximal_levels(t: DecoratedTree) -> List[LevelFunction]:
    """All maximally leveled structures on t, built by repeated k-maximalization.

    A prefix of singleton levels is fixed; the minimal completion of the prefix
    puts every vertex whose parents are placed on the next level, and each of
    those vertices in turn is moved alone onto that level while the rest shift up.
    """
    graph = _ordered_graph(t)
    order: Dict[str, int] = {}
    results: List[LevelFunction] = []

    def extend(remaining_parents: Dict[str, int]) -> None:
        if len(order) == graph.number_of_nodes():
            results.append(LevelFunction(levels=dict(sorted(order.items()))))
            return
        next_level = sorted(v for v, count in remaining_parents.items() if count == 0)
        for vertex_id in next_level:
            order[vertex_id] = len(order) + 1
            updated = {v: c for v, c in remaining_parents.items() if v != vertex_id}
            for child in graph.successors(vertex_id):
                updated[child] -= 1
            extend(updated)
            del order[vertex_id]

    extend({v: graph.in_degree(v) for v in graph.nodes})
    results.sort(key=lambda l: l.vector())
    logger.info(f"enumerated {len(results)} maximal level functions on {graph.number_of_nodes()} vertices")
    return results


def count_maximal_levels(t: DecoratedTree) -> int:
    """N_T, the number of maximally leveled structures on t."""
    return len(enumerate_maximal_levels(t))


def brute_force_level_functions(
    t: DecoratedTree, max_level: Optional[int] = None, singleton_only: bool = False
) -> List[LevelFunction]:
    """Exhaustive search for all stable level functions with at most max_level levels."""
    require_valid_tree(t)
    ids = sorted(t.vertex_ids())
    cap = config.limits.brute_force_max_vertices
    if len(ids) > cap:
        raise ComputationError(f"brute-force level search is capped at {cap} vertices")
    top = len(ids) if max_level is None else max_level

    graph = to_digraph(t)
    topological = list(nx.lexicographical_topological_sort(graph))
    assignment: Dict[str, int] = {}
    found: List[LevelFunction] = []

    def search(position: int) -> None:
        if position == len(topological):
            candidate = LevelFunction(levels=dict(sorted(assignment.items())))
            if singleton_only and not candidate.is_maximal():
                return
            if validate_level(t, candidate).valid:
                found.append(candidate)
            return
        vertex_id = topological[position]
        lowest = max((assignment[p] + 1 for p in graph.predecessors(vertex_id)), default=1)
        if lowest == 1 and not t.inputs_at(vertex_id):
            lowest = 2
        for level in range(lowest, top + 1):
            assignment[vertex_id] = level
            search(position + 1)
            del assignment[vertex_id]

    search(0)
    found.sort(key=lambda l: l.vector())
    logger.debug(f"brute force found {len(found)} level functions on {len(ids)} vertices")
    return found


def pre_level_factorial_count(t: DecoratedTree) -> int:
    """Number of maximal level functions, built level by level from the pre-level.

    Each step places the vertices whose parents are all placed. When none of them has a
    child they are independent and contribute (#ready)!; otherwise one of them is split
    off onto its own level and the count branches. The result equals N_T for every tree.
    """
    graph = _ordered_graph(t)
    parents = {v: frozenset(graph.predecessors(v)) for v in graph.nodes}

    @functools.lru_cache(maxsize=None)
    def count(placed: FrozenSet[str]) -> int:
        ready = sorted(v for v in parents if v not in placed and parents[v] <= placed)
        if not ready:
            return 1
        if not any(graph.out_degree(v) for v in ready):
            return math.factorial(len(ready)) * count(placed | frozenset(ready))
        return sum(count(placed | {v}) for v in ready)

    total = count(frozenset())
    logger.debug(f"{total} maximal level functions on {graph.number_of_nodes()} vertices")
    return total
