import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from sftkit.blowup import (
    box_coverage,
    build_refinement,
    blowup_simplex,
    f_vector,
    is_eulerian,
    is_smooth_refinement,
    refinement_face_poset,
)
from sftkit.cobordism import enumerate_maximal_levels_cob
from sftkit.exceptions import InputValidationError
from sftkit.flowcat import (
    adjacency_from_breakings,
    boundary_strata,
    breakings_from_counts,
    precedence_and_norm,
    stratum_energy,
)
from sftkit.grading import (
    choose_primes,
    cobordism_framing_degrees,
    framing_degrees,
    fredholm_index,
    integral_rescaling,
    parity_consistency,
)
from sftkit.homology import (
    build_differential,
    build_generators,
    check_boundary_squared,
    euler_characteristic,
    homology_ranks,
    require_valid_counts,
)
from sftkit.levels import enumerate_maximal_levels, pre_level
from sftkit.models.flows import Breaking, OrbitSequence, Partition
from sftkit.models.grading import IndexData
from sftkit.models.orbits import OrbitUniverse
from sftkit.models.project import CommandParams, CommandReport, ProjectInput, TreeEntry
from sftkit.models.trees import DecoratedTree, Direction
from sftkit.services.project_service import project_service
from sftkit.utils.dot import poset_to_dot, precedence_to_dot
from sftkit.utils.rationals import format_rational

logger = logging.getLogger(__name__)

COMMANDS = ("levels", "refine", "poset", "degrees", "index", "ch", "strata", "norm", "simplex")


def _levels_row(levels: Dict[str, int]) -> str:
    return " ".join(f"{v}:{levels[v]}" for v in sorted(levels))


def _sequence(orbits: Sequence[str]) -> str:
    return "(" + ",".join(orbits) + ")"


class CommandService:
    """Dispatches CLI commands to the computation modules and shapes their reports."""

    def __init__(self):
        self._handlers: Dict[str, Callable[[Optional[ProjectInput], CommandParams], CommandReport]] = {
            "levels": self._levels,
            "refine": self._refine,
            "poset": self._poset,
            "degrees": self._degrees,
            "index": self._index,
            "ch": self._ch,
            "strata": self._strata,
            "norm": self._norm,
            "simplex": self._simplex,
        }

    def run_command(
        self, project: Optional[ProjectInput], command: str, params: Optional[CommandParams] = None
    ) -> CommandReport:
        """Run one command on a loaded project."""
        if command not in self._handlers:
            raise InputValidationError(f"unknown command {command!r}, expected one of {', '.join(COMMANDS)}")
        params = params or CommandParams()
        if project is None and command != "simplex":
            raise InputValidationError(f"command {command} needs an input file")
        logger.info(f"running {command}")
        return self._handlers[command](project, params)

    # Helpers

    def _entry(self, project: ProjectInput, params: CommandParams) -> TreeEntry:
        try:
            return project.tree(params.tree)
        except KeyError as e:
            raise InputValidationError(f"unknown tree: {e.args[0]}", pointer="/trees")

    def _approx_actions(self, universe: OrbitUniverse) -> Dict[str, int]:
        """Declared integral approximations, or the exact actions rescaled to integers."""
        orbits = universe.orbits
        if orbits and all(o.approx_action is not None for o in orbits):
            approx = {o.id: o.approx_action for o in orbits}
            for orbit_id, value in approx.items():
                if value.denominator != 1:
                    raise InputValidationError(f"approx_action of {orbit_id} is not an integer")
            return {k: int(v) for k, v in approx.items()}
        _, scaled = integral_rescaling([o.action for o in orbits])
        return {o.id: value for o, value in zip(orbits, scaled)}

    def _primes(
        self, tree: DecoratedTree, approx: Dict[str, int], params: CommandParams, project: ProjectInput
    ) -> Tuple[int, int]:
        """(p+, p-) from the parameters, the project options or choose_primes."""
        p_plus = params.p_plus or project.options.p_plus
        p_minus = params.p_minus or project.options.p_minus
        if p_plus is None or p_minus is None:
            chosen_minus, chosen_plus = choose_primes(
                [approx[o] for o in tree.positive_orbits()], [approx[o] for o in tree.negative_orbits()]
            )
            p_minus = p_minus or chosen_minus
            p_plus = p_plus or chosen_plus
        return p_plus, p_minus

    # Commands

    def _levels(self, project: ProjectInput, params: CommandParams) -> CommandReport:
        entry = self._entry(project, params)
        if entry.is_cobordism:
            result = enumerate_maximal_levels_cob(project_service.cobordism(entry))
            rows = [[str(i + 1), _levels_row(lt.level.levels), str(lt.cob_level)] for i, lt in enumerate(result.leveled)]
            payload = {
                "tree": entry.name,
                "count": result.count,
                "levels": [{"levels": lt.level.levels, "cob_level": lt.cob_level} for lt in result.leveled],
            }
            if result.note:
                payload["note"] = result.note
            return CommandReport(command="levels", payload=payload, columns=["#", "levels", "cobordism level"], rows=rows)

        minimal = pre_level(entry.tree)
        maximal = enumerate_maximal_levels(entry.tree)
        return CommandReport(
            command="levels",
            payload={
                "tree": entry.name,
                "pre_level": minimal.levels,
                "count": len(maximal),
                "levels": [l.levels for l in maximal],
            },
            columns=["#", "levels"],
            rows=[[str(i + 1), _levels_row(l.levels)] for i, l in enumerate(maximal)],
        )

    def _refine(self, project: ProjectInput, params: CommandParams) -> CommandReport:
        entry = self._entry(project, params)
        refinement = build_refinement(entry.tree)
        certificate = is_smooth_refinement(refinement)
        coverage = box_coverage(refinement, params.side)
        payload = {
            "tree": entry.name,
            "coordinates": refinement.base.coordinates,
            "base": refinement.base.generators,
            "cones": [
                {"generators": cone.generators, "levels": level.levels}
                for cone, level in zip(refinement.maximal_cones, refinement.levels)
            ],
            "certificate": certificate.to_json_dict(),
            "coverage": {**coverage.to_json_dict(), "ok": coverage.ok},
        }
        rows = [
            [str(i + 1), _levels_row(level.levels), " ".join(str(g) for g in cone.generators)]
            for i, (cone, level) in enumerate(zip(refinement.maximal_cones, refinement.levels))
        ]
        return CommandReport(command="refine", payload=payload, columns=["#", "levels", "generators"], rows=rows)

    def _poset(self, project: ProjectInput, params: CommandParams) -> CommandReport:
        entry = self._entry(project, params)
        poset = refinement_face_poset(entry.tree)
        payload = {
            "tree": entry.name,
            "f_vector": f_vector(poset),
            "faces": [
                {"index": e.index, "rank": e.rank, "name": e.name, "collapsed": e.collapsed}
                for e in poset.elements
            ],
            "covers": [list(c) for c in poset.covers],
        }
        rows = [[str(e.index), str(e.rank), e.name] for e in poset.elements]
        return CommandReport(
            command="poset", payload=payload, columns=["index", "rank", "face"], rows=rows, dot=poset_to_dot(poset)
        )

    def _degrees(self, project: ProjectInput, params: CommandParams) -> CommandReport:
        entry = self._entry(project, params)
        approx = self._approx_actions(project.universe)
        if entry.is_cobordism:
            p_plus, p_minus = self._primes(entry.tree, approx, params, project)
            degrees = cobordism_framing_degrees(project_service.cobordism(entry), p_plus, p_minus, approx)
            primes = {"p_plus": p_plus, "p_minus": p_minus}
        else:
            p = params.p or project.options.p
            if p is None:
                p, _ = choose_primes(
                    [approx[o] for o in entry.tree.positive_orbits()],
                    [approx[o] for o in entry.tree.negative_orbits()],
                )
            degrees = framing_degrees(entry.tree, p, approx)
            primes = {"p": p}
        return CommandReport(
            command="degrees",
            payload={"tree": entry.name, **primes, "approx_actions": approx, "degrees": degrees},
            columns=["vertex", "degree"],
            rows=[[v, str(d)] for v, d in sorted(degrees.items())],
        )

    def _index(self, project: ProjectInput, params: CommandParams) -> CommandReport:
        entry = self._entry(project, params)
        n = params.n or project.options.n
        if n is None:
            raise InputValidationError("the index command needs n (dim Y = 2n - 1)", pointer="/options/n")
        orbits = project.universe.by_id()
        t = entry.tree
        for orbit_id in set(t.positive_orbits() + t.negative_orbits() + [e.orbit for e in t.internal_edges]):
            if orbits[orbit_id].cz_index is None:
                raise InputValidationError(f"orbit {orbit_id} has no CZ index")
        warnings = [w for w in (parity_consistency(o, n) for o in project.universe.orbits) if w]
        cob = project_service.cobordism(entry)

        vertices = []
        for vertex_id in sorted(t.vertex_ids()):
            positive = [e.orbit for e in t.internal_edges if e.target == vertex_id]
            positive += [e.orbit for e in t.exterior_at(vertex_id) if e.direction is Direction.IN]
            negative = [e.orbit for e in t.internal_edges if e.source == vertex_id]
            negative += [e.orbit for e in t.exterior_at(vertex_id) if e.direction is Direction.OUT]
            in_cobordism = cob is not None and cob.vertex_type(vertex_id) == (0, 1)
            result = fredholm_index(
                IndexData(
                    n=n,
                    cz_plus=[orbits[o].cz_index for o in positive],
                    cz_minus=[orbits[o].cz_index for o in negative],
                    cobordism=in_cobordism,
                )
            )
            vertices.append({"vertex": vertex_id, "index": result.index, "vdim": result.vdim})

        whole = fredholm_index(
            IndexData(
                n=n,
                cz_plus=[orbits[o].cz_index for o in t.positive_orbits()],
                cz_minus=[orbits[o].cz_index for o in t.negative_orbits()],
                cobordism=cob is not None,
            )
        )
        total = sum(v["index"] for v in vertices)
        payload = {
            "tree": entry.name,
            "n": n,
            "vertices": vertices,
            "index": whole.index,
            "vdim": whole.vdim,
            "additive": total == whole.index,
            "warnings": warnings,
        }
        rows = [[v["vertex"], str(v["index"]), str(v["vdim"])] for v in vertices]
        rows.append(["(whole)", str(whole.index), str(whole.vdim)])
        return CommandReport(command="index", payload=payload, columns=["vertex", "index", "vdim"], rows=rows)

    def _ch(self, project: ProjectInput, params: CommandParams) -> CommandReport:
        if project.counts is None:
            raise InputValidationError("the ch command needs a count table", pointer="/counts")
        require_valid_counts(project.universe, project.counts, project.options.n)
        cutoff_action = params.cutoff_action if params.cutoff_action is not None else project.options.cutoff_action
        cutoff_length = params.cutoff_length if params.cutoff_length is not None else project.options.cutoff_length
        basis = build_generators(project.universe, max_action=cutoff_action, max_length=cutoff_length)
        complex_ = build_differential(basis, project.counts, project.universe)
        boundary = check_boundary_squared(complex_)
        ranks = homology_ranks(complex_)
        payload = {
            "cutoff": {
                "action": format_rational(cutoff_action) if cutoff_action is not None else None,
                "length": cutoff_length,
            },
            "basis": [list(w) for w in basis],
            "ranks": ranks.to_json_dict(),
            "euler_characteristic": euler_characteristic(complex_),
            "boundary_squared": boundary.to_json_dict(),
            "truncated": [t.to_json_dict() for t in complex_.truncated],
        }
        rows = [
            ["even", str(ranks.dim_even), str(ranks.rank_even), str(ranks.betti_even)],
            ["odd", str(ranks.dim_odd), str(ranks.rank_odd), str(ranks.betti_odd)],
        ]
        return CommandReport(command="ch", payload=payload, columns=["parity", "dim", "rank ∂", "betti"], rows=rows)

    def _breakings(self, project: ProjectInput) -> Optional[List[Breaking]]:
        if project.breakings is not None:
            return project.breakings
        if project.counts is not None:
            return breakings_from_counts(project.counts)
        return None

    def _strata(self, project: ProjectInput, params: CommandParams) -> CommandReport:
        gm = OrbitSequence(orbits=params.minus)
        gp = OrbitSequence(orbits=params.plus)
        if not gp.orbits:
            raise InputValidationError("the strata command needs a nonempty positive sequence")
        assignment = params.partition if params.partition is not None else [0] * len(gm)
        try:
            lam = Partition(assignment=assignment, targets=len(gp))
        except ValueError as e:
            raise InputValidationError(f"bad partition {assignment}: {e}")
        strata = boundary_strata(
            gm, gp, lam, params.depth, project.universe, self._breakings(project), params.max_length
        )
        payload = {
            "minus": gm.orbits,
            "plus": gp.orbits,
            "partition": lam.assignment,
            "depth": params.depth,
            "strata": [
                {
                    "chain": s.to_json_dict(),
                    "energies": [format_rational(e) for e in stratum_energy(s, project.universe)[0]],
                }
                for s in strata
            ],
        }
        rows = [[str(i + 1), s.render()] for i, s in enumerate(strata)]
        return CommandReport(command="strata", payload=payload, columns=["#", "stratum"], rows=rows)

    def _norm(self, project: ProjectInput, params: CommandParams) -> CommandReport:
        breakings = self._breakings(project)
        if breakings is None:
            raise InputValidationError("the norm command needs breakings or a count table")
        adjacency = adjacency_from_breakings(project.universe, breakings, params.max_length)
        report = precedence_and_norm(project.universe, adjacency)
        rows = [[_sequence(e.lower), _sequence(e.upper), str(e.norm)] for e in report.norms]
        return CommandReport(
            command="norm",
            payload=report.to_json_dict(),
            columns=["lower", "upper", "norm"],
            rows=rows,
            dot=precedence_to_dot(report),
        )

    def _simplex(self, project: Optional[ProjectInput], params: CommandParams) -> CommandReport:
        if params.n is None:
            raise InputValidationError("the simplex command needs n")
        poset = blowup_simplex(params.n)
        vector = f_vector(poset)
        payload = {"n": params.n, "f_vector": vector, "eulerian": is_eulerian(poset)}
        return CommandReport(
            command="simplex",
            payload=payload,
            columns=["rank", "faces"],
            rows=[[str(rank), str(count)] for rank, count in enumerate(vector)],
            dot=poset_to_dot(poset, name="simplex"),
        )


# Create a singleton instance
command_service = CommandService()
