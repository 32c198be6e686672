import itertools
import logging
from collections import Counter
from fractions import Fraction
from typing import AbstractSet, Dict, Iterable, List, Optional, Set, Union

import networkx as nx
from networkx.algorithms import isomorphism

from sftkit.config import config
from sftkit.exceptions import ComputationError, InputValidationError
from sftkit.models.orbits import OrbitUniverse, ReebOrbit
from sftkit.models.posets import FaceElement, FacePoset
from sftkit.models.trees import (
    Contraction,
    DecoratedForest,
    DecoratedTree,
    Direction,
    ExteriorEdge,
    InternalEdge,
    TreeReport,
    TreeVertex,
    edge_key,
)

logger = logging.getLogger(__name__)

GHOST_ID = "ghost"


def to_digraph(t: DecoratedTree) -> nx.DiGraph:
    """Directed graph of the interior structure, with vertex and edge labels."""
    graph = nx.DiGraph()
    for vertex in t.vertices:
        graph.add_node(vertex.id, degree=vertex.degree)
    for edge in t.internal_edges:
        graph.add_edge(edge.source, edge.target, orbit=edge.orbit, key=edge.key)
    return graph


def merged_vertex_id(vertex_ids: Iterable[str], taken: AbstractSet[str] = frozenset()) -> str:
    """Id of the vertex obtained by merging the given vertices.

    Atoms are joined with "+"; a "#k" suffix is added when that id is already in `taken`.
    """
    atoms: Set[str] = set()
    for vertex_id in vertex_ids:
        atoms.update(vertex_id.split("+"))
    base = "+".join(sorted(atoms))
    merged, suffix = base, 1
    while merged in taken:
        merged = f"{base}#{suffix}"
        suffix += 1
    return merged


def is_trivial_vertex(t: DecoratedTree, vertex_id: str) -> bool:
    """Degree zero with exactly two adjacent edges carrying the same orbit."""
    degree = t.degrees()[vertex_id]
    if degree != 0:
        return False
    labels = [e.orbit for e in t.internal_edges if vertex_id in (e.source, e.target)]
    labels += [e.orbit for e in t.exterior_at(vertex_id)]
    return len(labels) == 2 and labels[0] == labels[1]


def validate_tree(t: DecoratedTree, universe: Optional[OrbitUniverse] = None) -> TreeReport:
    """Check tree-ness, label integrity and stability, with located diagnostics."""
    diagnostics: List[str] = []
    ids = t.vertex_ids()
    known = set(ids)

    # Vertex ids
    duplicates = sorted({v for v in ids if ids.count(v) > 1})
    for vertex_id in duplicates:
        diagnostics.append(f"vertices: duplicate vertex id {vertex_id}")
    if not ids:
        diagnostics.append("vertices: tree has no vertices")

    # Edge endpoints
    structure_ok = not duplicates and bool(ids)
    for i, edge in enumerate(t.internal_edges):
        for end in (edge.source, edge.target):
            if end not in known:
                diagnostics.append(f"internal_edges/{i}: unknown vertex {end}")
                structure_ok = False
        if edge.source == edge.target:
            diagnostics.append(f"internal_edges/{i}: loop at {edge.source}")
            structure_ok = False
    for i, edge in enumerate(t.exterior_edges):
        if edge.vertex not in known:
            diagnostics.append(f"exterior_edges/{i}: unknown vertex {edge.vertex}")
            structure_ok = False

    # Tree shape
    is_tree = False
    if structure_ok:
        undirected = nx.MultiGraph()
        undirected.add_nodes_from(ids)
        undirected.add_edges_from((e.source, e.target) for e in t.internal_edges)
        if len(t.internal_edges) != len(ids) - 1:
            if not nx.is_connected(undirected):
                diagnostics.append("tree is disconnected")
            else:
                cycle = nx.cycle_basis(nx.Graph(undirected)) or [[]]
                diagnostics.append(f"tree contains a cycle through {sorted(cycle[0])}")
        elif not nx.is_connected(undirected):
            diagnostics.append("tree is disconnected")
        else:
            is_tree = True

    # Orbit labels
    labels_ok = True
    if universe is not None:
        for i, edge in enumerate(t.internal_edges):
            if not universe.has(edge.orbit):
                diagnostics.append(f"internal_edges/{i}: unknown orbit {edge.orbit}")
                labels_ok = False
        for i, edge in enumerate(t.exterior_edges):
            if not universe.has(edge.orbit):
                diagnostics.append(f"exterior_edges/{i}: unknown orbit {edge.orbit}")
                labels_ok = False

    # Stability
    trivial = sorted(v for v in known if structure_ok and is_trivial_vertex(t, v))
    for vertex_id in trivial:
        diagnostics.append(f"vertex {vertex_id} is trivial")
    stable = structure_ok and not trivial

    return TreeReport(
        valid=is_tree and labels_ok,
        is_tree=is_tree,
        labels_ok=labels_ok,
        stable=stable,
        trivial_vertices=trivial,
        diagnostics=diagnostics,
    )


def require_valid_tree(t: DecoratedTree, universe: Optional[OrbitUniverse] = None) -> None:
    report = validate_tree(t, universe)
    if not report.valid:
        raise InputValidationError("invalid decorated tree", diagnostics=report.diagnostics)


def contract(t: DecoratedTree, edges: Iterable[str]) -> Contraction:
    """Collapse exactly the given interior edges (by key)."""
    collapse = set(edges)
    by_key = t.edges_by_key()
    unknown = sorted(collapse - set(by_key))
    if unknown:
        raise InputValidationError(
            f"cannot collapse edges that are not interior edges: {', '.join(unknown)}"
        )

    # Fibers are the connected components of the collapsed edges
    fibers = nx.Graph()
    fibers.add_nodes_from(t.vertex_ids())
    fibers.add_edges_from((by_key[k].source, by_key[k].target) for k in collapse)
    # Uncollapsed vertices keep their ids and merged ids avoid them
    components = sorted((sorted(c) for c in nx.connected_components(fibers)), key=lambda c: c[0])
    vertex_map: Dict[str, str] = {c[0]: c[0] for c in components if len(c) == 1}
    taken = set(vertex_map)
    for component in components:
        if len(component) == 1:
            continue
        merged = merged_vertex_id(component, taken)
        taken.add(merged)
        for vertex_id in component:
            vertex_map[vertex_id] = merged

    # Degree tags add over fibers
    degrees: Dict[str, Fraction] = {}
    for vertex in t.vertices:
        target_id = vertex_map[vertex.id]
        degrees[target_id] = degrees.get(target_id, Fraction(0)) + vertex.degree
    target_vertices = [TreeVertex(id=v, degree=d) for v, d in sorted(degrees.items())]

    edge_map: Dict[str, Optional[str]] = {}
    target_edges: List[InternalEdge] = []
    for edge in t.internal_edges:
        if edge.key in collapse:
            edge_map[edge.key] = None
            continue
        image = InternalEdge(
            source=vertex_map[edge.source], target=vertex_map[edge.target], orbit=edge.orbit
        )
        edge_map[edge.key] = image.key
        target_edges.append(image)

    target_exterior = [
        ExteriorEdge(vertex=vertex_map[e.vertex], direction=e.direction, orbit=e.orbit)
        for e in t.exterior_edges
    ]
    target = DecoratedTree(
        vertices=target_vertices,
        internal_edges=target_edges,
        exterior_edges=target_exterior,
    )
    return Contraction(source=t, target=target, edge_map=edge_map, vertex_map=vertex_map)


def compose(first: Contraction, second: Contraction) -> Contraction:
    """The contraction second∘first."""
    vertex_map = {v: second.vertex_map[w] for v, w in first.vertex_map.items()}
    edge_map: Dict[str, Optional[str]] = {}
    for key, image in first.edge_map.items():
        edge_map[key] = None if image is None else second.edge_map[image]
    return Contraction(
        source=first.source, target=second.target, edge_map=edge_map, vertex_map=vertex_map
    )


def contraction_poset(t: DecoratedTree) -> FacePoset:
    """All contractions of t indexed by collapsed edge subsets, ordered by inclusion."""
    require_valid_tree(t)
    keys = t.edge_keys()
    subsets: List[frozenset] = []
    for size in range(len(keys) + 1):
        subsets.extend(frozenset(c) for c in itertools.combinations(keys, size))
    index = {s: i for i, s in enumerate(subsets)}

    elements = [
        FaceElement(
            index=i,
            rank=len(s),
            name="{" + ",".join(sorted(s)) + "}",
            collapsed=sorted(s),
        )
        for i, s in enumerate(subsets)
    ]
    covers = [
        (index[s], index[s | {k}]) for s in subsets for k in keys if k not in s
    ]
    logger.debug(f"contraction poset with {len(elements)} elements")
    return FacePoset(elements=elements, covers=sorted(covers))


def _vertex_signature(t: DecoratedTree, vertex_id: str) -> tuple:
    exterior = Counter((e.direction.value, e.orbit) for e in t.exterior_at(vertex_id))
    return (t.degrees()[vertex_id], tuple(sorted(exterior.items())))


def relative_automorphisms(c: Contraction) -> List[Dict[str, str]]:
    """Label-, direction- and degree-preserving automorphisms σ of the source with c∘σ = c."""
    source = c.source
    if len(source.vertices) > config.limits.max_automorphism_vertices:
        raise ComputationError(
            f"automorphism search is capped at {config.limits.max_automorphism_vertices} vertices"
        )
    graph = to_digraph(source)
    for vertex_id in graph.nodes:
        graph.nodes[vertex_id]["signature"] = _vertex_signature(source, vertex_id)
        graph.nodes[vertex_id]["image"] = c.vertex_map[vertex_id]
    for u, v, data in graph.edges(data=True):
        data["collapsed"] = c.edge_map[edge_key(u, v)] is None

    matcher = isomorphism.DiGraphMatcher(
        graph,
        graph,
        node_match=lambda a, b: a["signature"] == b["signature"] and a["image"] == b["image"],
        edge_match=lambda a, b: a["orbit"] == b["orbit"] and a["collapsed"] == b["collapsed"],
    )
    automorphisms = [dict(sorted(m.items())) for m in matcher.isomorphisms_iter()]
    automorphisms.sort(key=lambda m: tuple(m.values()))
    logger.debug(f"found {len(automorphisms)} relative automorphisms")
    return automorphisms


def automorphism_group_order(t: DecoratedTree) -> int:
    return len(relative_automorphisms(contract(t, [])))


def _component_root(component: DecoratedTree, position: int) -> ExteriorEdge:
    inputs = [e for e in component.exterior_edges if e.direction is Direction.IN]
    if len(inputs) != 1:
        raise InputValidationError(
            f"component {position} has {len(inputs)} incoming exterior edges, expected 1",
            pointer=f"/components/{position}",
        )
    return inputs[0]


def ghost_join(f: DecoratedForest, gamma0: Union[ReebOrbit, str]) -> DecoratedTree:
    """Join the components below a new degree-zero ghost root fed by gamma0."""
    gamma0_id = gamma0 if isinstance(gamma0, str) else gamma0.id
    ids = {v for component in f.components for v in component.vertex_ids()}
    ghost = GHOST_ID
    while ghost in ids:
        ghost = f"_{ghost}"

    vertices = [TreeVertex(id=ghost, degree=Fraction(0))]
    internal: List[InternalEdge] = []
    exterior = [ExteriorEdge(vertex=ghost, direction=Direction.IN, orbit=gamma0_id)]
    for position, component in enumerate(f.components):
        root_input = _component_root(component, position)
        vertices.extend(component.vertices)
        internal.extend(component.internal_edges)
        internal.append(
            InternalEdge(source=ghost, target=root_input.vertex, orbit=root_input.orbit)
        )
        exterior.extend(e for e in component.exterior_edges if e is not root_input)
    return DecoratedTree(vertices=vertices, internal_edges=internal, exterior_edges=exterior)


def ghost_edges(t: DecoratedTree) -> List[str]:
    """Interior edges leaving the ghost root of a ghost-joined tree."""
    roots = [v for v in t.vertex_ids() if v.lstrip("_") == GHOST_ID]
    if not roots:
        return []
    ghost = max(roots, key=len)
    return [e.key for e in t.internal_edges if e.source == ghost]


def ghost_contraction(f: DecoratedForest, gamma0: Union[ReebOrbit, str]) -> Contraction:
    """Contraction collapsing every ghost edge of the ghost-joined tree."""
    joined = ghost_join(f, gamma0)
    return contract(joined, ghost_edges(joined))


def tree_dimension(t: DecoratedTree, d: int) -> int:
    """2(d−3) + 2(d+1)d + 3(#Γ⁻ + #Γ⁺) − #E^int."""
    if d < 0:
        raise InputValidationError(f"d must be nonnegative, got {d}")
    exterior = len(t.exterior_edges)
    return 2 * (d - 3) + 2 * (d + 1) * d + 3 * exterior - len(t.internal_edges)
