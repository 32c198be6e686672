import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import networkx as nx
from sympy import isprime

from sftkit.exceptions import ComputationError, InputValidationError
from sftkit.levels import brute_force_level_functions, validate_level
from sftkit.models.cobordism import (
    CobordismContraction,
    CobordismLevels,
    CobordismReport,
    CobordismTree,
    GluingAssignment,
    GluingConstraintSystem,
    GluingEquation,
    GluingStratum,
    LeveledCobordismTree,
    StarLabels,
)
from sftkit.models.levels import LevelFunction
from sftkit.models.trees import DecoratedTree, Direction
from sftkit.trees import contract, is_trivial_vertex, to_digraph, validate_tree

logger = logging.getLogger(__name__)

COBORDISM_TYPE = (0, 1)
UPPER_TYPE = (0, 0)
LOWER_TYPE = (1, 1)


def validate_cobordism_tree(c: CobordismTree) -> CobordismReport:
    """Check the star-label axioms and stability of a cobordism tree."""
    tree_report = validate_tree(c.tree)
    diagnostics = list(tree_report.diagnostics)
    if not tree_report.valid:
        return CobordismReport(valid=False, stable=False, diagnostics=diagnostics)
    diagnostics = [d for d in diagnostics if "is trivial" not in d]

    ids = set(c.tree.vertex_ids())
    for name, labels in (("vstar_plus", c.vertex_star_plus), ("vstar_minus", c.vertex_star_minus)):
        for vertex_id in sorted(ids - set(labels)):
            diagnostics.append(f"{name}: missing label for vertex {vertex_id}")
        for vertex_id in sorted(set(labels) - ids):
            diagnostics.append(f"{name}: unknown vertex {vertex_id}")
    keys = set(c.tree.edge_keys())
    for key in sorted(keys - set(c.edge_star)):
        diagnostics.append(f"edge_star: missing label for edge {key}")
    for key in sorted(set(c.edge_star) - keys):
        diagnostics.append(f"edge_star: unknown edge {key}")
    if diagnostics:
        return CobordismReport(valid=False, stable=False, diagnostics=diagnostics)

    # Vertex ordering
    for vertex_id in sorted(ids):
        plus, minus = c.vertex_type(vertex_id)
        if plus > minus:
            diagnostics.append(f"vertex {vertex_id} has star_plus {plus} > star_minus {minus}")

    # Exterior edges live in the ends
    for edge in c.tree.exterior_edges:
        if edge.direction is Direction.IN and c.vertex_star_plus[edge.vertex] != 0:
            diagnostics.append(f"incoming exterior edge at {edge.vertex} requires star_plus 0")
        if edge.direction is Direction.OUT and c.vertex_star_minus[edge.vertex] != 1:
            diagnostics.append(f"outgoing exterior edge at {edge.vertex} requires star_minus 1")

    # Interior edges: the orbit lies in a single end
    for edge in c.tree.internal_edges:
        star = c.edge_star[edge.key]
        lower = c.vertex_star_minus[edge.source]
        upper = c.vertex_star_plus[edge.target]
        if not star == lower == upper:
            diagnostics.append(
                f"edge {edge.key} has star {star} but star_minus({edge.source}) = {lower} "
                f"and star_plus({edge.target}) = {upper}"
            )

    unstable = [
        v for v in sorted(ids)
        if c.vertex_star_plus[v] == c.vertex_star_minus[v] and is_trivial_vertex(c.tree, v)
    ]
    for vertex_id in unstable:
        diagnostics.append(f"symplectization vertex {vertex_id} is trivial")

    return CobordismReport(valid=not diagnostics, stable=not unstable, diagnostics=diagnostics)


def require_valid_cobordism_tree(c: CobordismTree) -> None:
    report = validate_cobordism_tree(c)
    if not report.valid:
        raise InputValidationError("invalid cobordism tree", diagnostics=report.diagnostics)


def cobordism_tree_from_labels(
    t: DecoratedTree, vstar_plus: Dict[str, int], vstar_minus: Dict[str, int]
) -> CobordismTree:
    """Cobordism tree whose edge stars are read off the negative end of each edge's source."""
    edge_star = {edge.key: vstar_minus[edge.source] for edge in t.internal_edges}
    return CobordismTree(
        tree=t,
        edge_star=edge_star,
        vertex_star_plus=dict(vstar_plus),
        vertex_star_minus=dict(vstar_minus),
    )


def _linear_extensions(graph: nx.DiGraph, vertex_ids: List[str]) -> List[List[str]]:
    if not vertex_ids:
        return [[]]
    return [list(order) for order in nx.all_topological_sorts(graph.subgraph(vertex_ids))]


def enumerate_maximal_levels_cob(c: CobordismTree) -> CobordismLevels:
    """All level functions with singleton levels away from the cobordism level.

    Upper vertices take levels 1..a one at a time, every cobordism vertex sits on
    level a + 1 and lower vertices follow one per level.
    """
    require_valid_cobordism_tree(c)
    upper = c.vertices_of_type(*UPPER_TYPE)
    middle = c.vertices_of_type(*COBORDISM_TYPE)
    lower = c.vertices_of_type(*LOWER_TYPE)

    if not middle and lower:
        return CobordismLevels(
            note="no admissible level function: every vertex maps to the negative end, "
            "so no level lies below the cobordism level"
        )

    graph = to_digraph(c.tree)
    cob_level = len(upper) + 1
    leveled: List[LeveledCobordismTree] = []
    for upper_order in _linear_extensions(graph, upper):
        for lower_order in _linear_extensions(graph, lower):
            levels = {v: i + 1 for i, v in enumerate(upper_order)}
            levels.update({v: cob_level for v in middle})
            offset = cob_level + 1 if middle else cob_level
            levels.update({v: offset + i for i, v in enumerate(lower_order)})
            level = LevelFunction(levels=dict(sorted(levels.items())))
            # Level 1 must still carry an incoming exterior edge
            if validate_level(c.tree, level).valid:
                leveled.append(LeveledCobordismTree(cob=c, level=level, cob_level=cob_level))
    leveled.sort(key=lambda lt: lt.level.vector())
    logger.info(f"enumerated {len(leveled)} maximally leveled cobordism trees")
    if not leveled:
        return CobordismLevels(
            note="no admissible level function: a vertex on level 1 has no incoming exterior edge"
        )
    return CobordismLevels(leveled=leveled)


def cobordism_level_admissible(c: CobordismTree, l: LevelFunction) -> Optional[int]:
    """Smallest cobordism level making (c, l) a maximally leveled cobordism tree, if any."""
    middle = set(c.vertices_of_type(*COBORDISM_TYPE))
    upper = c.vertices_of_type(*UPPER_TYPE)
    lower = c.vertices_of_type(*LOWER_TYPE)
    if middle:
        candidates = {l.levels[v] for v in middle}
        if len(candidates) != 1:
            return None
        cob_level = candidates.pop()
        if set(l.level_sets()[cob_level]) != middle:
            return None
    else:
        cob_level = l.size + 1
    if any(l.levels[v] >= cob_level for v in upper):
        return None
    if any(l.levels[v] <= cob_level for v in lower):
        return None
    for level, vertices in l.level_sets().items():
        if level != cob_level and len(vertices) > 1:
            return None
    return cob_level


def brute_force_cobordism_levels(c: CobordismTree) -> CobordismLevels:
    """Exhaustive oracle for enumerate_maximal_levels_cob."""
    require_valid_cobordism_tree(c)
    leveled: List[LeveledCobordismTree] = []
    for l in brute_force_level_functions(c.tree):
        cob_level = cobordism_level_admissible(c, l)
        if cob_level is not None:
            leveled.append(LeveledCobordismTree(cob=c, level=l, cob_level=cob_level))
    return CobordismLevels(leveled=leveled)


def _divisibility_verdict(value: int, p_plus: int, p_minus: int) -> Optional[Tuple[int, int]]:
    by_plus = value % p_plus == 0
    by_minus = value % p_minus == 0
    if by_plus and by_minus:
        raise ComputationError(
            f"ambiguous star label: {value} is divisible by both p+ = {p_plus} and p- = {p_minus}"
        )
    if by_plus:
        return UPPER_TYPE
    if by_minus:
        return LOWER_TYPE
    return None


def infer_star_labels(
    t: DecoratedTree,
    framing_degrees: Dict[str, int],
    omega_degrees: Dict[str, int],
    node_orders: Dict[str, int],
    p_plus: int,
    p_minus: int,
) -> StarLabels:
    """Star labels from divisibility of degree differences by the primes p+ and p-."""
    if p_plus == p_minus or not isprime(p_plus) or not isprime(p_minus):
        raise InputValidationError(
            f"p+ and p- must be distinct primes, got {p_plus} and {p_minus}"
        )

    plus: Dict[str, int] = {}
    minus: Dict[str, int] = {}
    for vertex_id in sorted(t.vertex_ids()):
        difference = framing_degrees[vertex_id] - omega_degrees[vertex_id]
        if difference != 0:
            verdict = _divisibility_verdict(difference, p_plus, p_minus)
        else:
            # Decide by the type-1 nodes on the component
            verdicts = set()
            for edge in t.internal_edges:
                if vertex_id not in (edge.source, edge.target):
                    continue
                order = abs(node_orders.get(edge.key, 0))
                if order == 0:
                    continue
                found = _divisibility_verdict(order, p_plus, p_minus)
                if found is not None:
                    verdicts.add(found)
            if len(verdicts) > 1:
                raise ComputationError(
                    f"ambiguous star label at {vertex_id}: adjacent node orders disagree"
                )
            verdict = verdicts.pop() if verdicts else None
        star_plus, star_minus = verdict or COBORDISM_TYPE
        plus[vertex_id] = star_plus
        minus[vertex_id] = star_minus
        logger.debug(f"vertex {vertex_id}: difference {difference}, labels ({star_plus}, {star_minus})")
    return StarLabels(vertex_star_plus=plus, vertex_star_minus=minus)


def gluing_constraints(c: CobordismTree) -> GluingConstraintSystem:
    """Equations g_v = g_e + g_v' for every edge e = (v, v') leaving an upper vertex v."""
    require_valid_cobordism_tree(c)
    upper = set(c.vertices_of_type(*UPPER_TYPE))
    equations = [
        GluingEquation(
            vertex=edge.source,
            edge=edge.key,
            child=edge.target if edge.target in upper else None,
        )
        for edge in sorted(c.tree.internal_edges, key=lambda e: e.key)
        if edge.source in upper
    ]
    return GluingConstraintSystem(
        edge_variables=sorted(c.tree.edge_keys()),
        vertex_variables=sorted(upper),
        equations=equations,
    )


def _add(a: Optional[Fraction], b: Optional[Fraction]) -> Optional[Fraction]:
    if a is None or b is None:
        return None
    return a + b


def contract_cobordism(
    c: CobordismTree, edges: Iterable[str], flipped: Iterable[str] = ()
) -> CobordismContraction:
    """Contract edges after moving the given upper vertices into the cobordism level.

    Merged vertices take the smallest star_plus and the largest star_minus of their fiber.
    """
    flipped = sorted(set(flipped))
    upper = set(c.vertices_of_type(*UPPER_TYPE))
    not_upper = [v for v in flipped if v not in upper]
    if not_upper:
        raise InputValidationError(
            f"only (0, 0)-vertices can be moved into the cobordism level: {', '.join(not_upper)}"
        )

    contraction = contract(c.tree, edges)
    star_minus_before = dict(c.vertex_star_minus)
    for vertex_id in flipped:
        star_minus_before[vertex_id] = 1

    plus: Dict[str, int] = {}
    minus: Dict[str, int] = {}
    for vertex_id, image in contraction.vertex_map.items():
        plus[image] = min(plus.get(image, 1), c.vertex_star_plus[vertex_id])
        minus[image] = max(minus.get(image, 0), star_minus_before[vertex_id])

    edge_star = {
        image: c.edge_star[key]
        for key, image in contraction.edge_map.items()
        if image is not None
    }
    target = CobordismTree(
        tree=contraction.target,
        edge_star=edge_star,
        vertex_star_plus=dict(sorted(plus.items())),
        vertex_star_minus=dict(sorted(minus.items())),
    )
    return CobordismContraction(
        contraction=contraction,
        target=target,
        flipped=flipped,
        report=validate_cobordism_tree(target),
    )


def apply_gluing_assignment(
    c: CobordismTree, system: GluingConstraintSystem, assignment: GluingAssignment
) -> GluingStratum:
    """Check the gluing equations with infinite values allowed and return the resulting stratum."""
    diagnostics: List[str] = []
    for name in system.edge_variables:
        if name not in assignment.edges:
            diagnostics.append(f"edges/{name}: missing gluing parameter")
    for name in system.vertex_variables:
        if name not in assignment.vertices:
            diagnostics.append(f"vertices/{name}: missing gluing parameter")
    for group, values in (("edges", assignment.edges), ("vertices", assignment.vertices)):
        for name, value in values.items():
            if value is not None and value < 0:
                diagnostics.append(f"{group}/{name}: gluing parameter must be nonnegative")
    if diagnostics:
        raise InputValidationError("invalid gluing assignment", diagnostics=diagnostics)

    for equation in system.equations:
        child = Fraction(0) if equation.child is None else assignment.vertices[equation.child]
        expected = _add(assignment.edges[equation.edge], child)
        if assignment.vertices[equation.vertex] != expected:
            diagnostics.append(f"violated: {equation.render()}")
    if diagnostics:
        raise InputValidationError("gluing assignment violates the constraints", diagnostics=diagnostics)

    contracted = sorted(k for k, v in assignment.edges.items() if v is not None)
    flipped = sorted(k for k, v in assignment.vertices.items() if v is not None)
    result = contract_cobordism(c, contracted, flipped)
    return GluingStratum(contracted_edges=contracted, flipped_vertices=flipped, result=result)
