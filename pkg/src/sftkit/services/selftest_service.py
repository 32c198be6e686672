import itertools
import logging
import random
from collections import Counter
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

from sympy import Matrix

from sftkit.blowup import (
    brute_force_leveled_structures,
    build_refinement,
    is_smooth_refinement,
    refinement_face_poset,
)
from sftkit.config import config
from sftkit.flowcat import check_composition_associativity, stratum_energy
from sftkit.grading import fredholm_index
from sftkit.homology import build_differential, build_generators, check_boundary_squared, homology_ranks
from sftkit.levels import brute_force_level_functions, enumerate_maximal_levels, pre_level_factorial_count
from sftkit.models.counts import CountEntry, CountTable
from sftkit.models.flows import Breaking, OrbitSequence, Partition, StratumLabel
from sftkit.models.grading import IndexData
from sftkit.models.orbits import OrbitUniverse, Parity, ReebOrbit
from sftkit.models.project import CheckResult, SelftestReport
from sftkit.models.signs import LineWord
from sftkit.models.trees import DecoratedTree, Direction, ExteriorEdge, InternalEdge, TreeVertex
from sftkit.signs import line, reorder_sign
from sftkit.trees import is_trivial_vertex

logger = logging.getLogger(__name__)


def random_tree(rng: random.Random, vertices: int, orbits: Sequence[str] = ("a", "b")) -> DecoratedTree:
    """A random stable decorated tree; every vertex without a parent gets an input."""
    ids = [f"v{i}" for i in range(vertices)]
    internal: List[InternalEdge] = []
    for i in range(1, vertices):
        other = ids[rng.randrange(i)]
        upper, lower = (other, ids[i]) if rng.random() < 0.5 else (ids[i], other)
        internal.append(InternalEdge(source=upper, target=lower, orbit=rng.choice(orbits)))
    exterior: List[ExteriorEdge] = []
    for vertex_id in ids:
        if not any(e.target == vertex_id for e in internal):
            exterior.append(ExteriorEdge(vertex=vertex_id, direction=Direction.IN, orbit=rng.choice(orbits)))
        if rng.random() < 0.5:
            exterior.append(ExteriorEdge(vertex=vertex_id, direction=Direction.OUT, orbit=rng.choice(orbits)))
    vertices_ = [TreeVertex(id=v, degree=rng.choice([0, 1])) for v in ids]
    tree = DecoratedTree(vertices=vertices_, internal_edges=internal, exterior_edges=exterior)

    # stabilize trivial cylinders by giving them a degree
    trivial = {v for v in ids if is_trivial_vertex(tree, v)}
    if trivial:
        vertices_ = [TreeVertex(id=v.id, degree=1 if v.id in trivial else v.degree) for v in vertices_]
        tree = DecoratedTree(vertices=vertices_, internal_edges=internal, exterior_edges=exterior)
    return tree


def random_universe(rng: random.Random, size: int) -> OrbitUniverse:
    """Simple orbits g0, g1, ... with distinct integer actions and random parities."""
    actions = sorted(rng.sample(range(1, 3 * size + 1), size))
    orbits = [
        ReebOrbit(id=f"g{i}", action=a, parity=rng.choice([Parity.EVEN, Parity.ODD]))
        for i, a in enumerate(actions)
    ]
    return OrbitUniverse(action_bound=max(actions), orbits=orbits)


class SelftestService:
    """Randomized property checks of the computation modules, reproducible from a seed."""

    def __init__(self):
        self._checks: Dict[str, Callable[[random.Random], Optional[str]]] = {
            "levels": self._check_levels,
            "refinement": self._check_refinement,
            "stratification": self._check_stratification,
            "index": self._check_index,
            "energy": self._check_energy,
            "signs": self._check_signs,
            "homology": self._check_homology,
            "associativity": self._check_associativity,
        }

    def check_names(self) -> List[str]:
        return list(self._checks)

    def run(
        self, seed: Optional[int] = None, trials: Optional[int] = None, only: Optional[Sequence[str]] = None
    ) -> SelftestReport:
        seed = config.selftest.seed if seed is None else seed
        trials = config.selftest.trials if trials is None else trials
        results: List[CheckResult] = []
        for name, check in self._checks.items():
            if only and name not in only:
                continue
            rng = random.Random(f"{seed}:{name}")
            failures = []
            for trial in range(trials):
                failure = check(rng)
                if failure:
                    failures.append(f"trial {trial}: {failure}")
            results.append(CheckResult(name=name, passed=not failures, trials=trials, failures=failures))
            logger.info(f"selftest {name}: {trials - len(failures)}/{trials} passed")
        return SelftestReport(seed=seed, trials=trials, checks=results)

    # Checks; each returns a failure message or None

    def _check_levels(self, rng: random.Random) -> Optional[str]:
        cap = min(6, config.limits.brute_force_max_vertices)
        tree = random_tree(rng, rng.randint(1, cap))
        enumerated = [l.vector() for l in enumerate_maximal_levels(tree)]
        brute = [l.vector() for l in brute_force_level_functions(tree, singleton_only=True)]
        if enumerated != brute:
            return f"{len(enumerated)} maximal levels enumerated, {len(brute)} found by brute force"
        inductive = pre_level_factorial_count(tree)
        if inductive != len(enumerated):
            return f"level-by-level count gives {inductive}, enumeration gives {len(enumerated)}"
        return None

    def _check_refinement(self, rng: random.Random) -> Optional[str]:
        tree = random_tree(rng, rng.randint(1, 4))
        refinement = build_refinement(tree)
        count = len(enumerate_maximal_levels(tree))
        if len(refinement.maximal_cones) != count:
            return f"{len(refinement.maximal_cones)} maximal cones but N_T = {count}"
        certificate = is_smooth_refinement(refinement)
        if not certificate.smooth:
            return "; ".join(certificate.diagnostics) or "refinement is not smooth"
        return None

    def _check_stratification(self, rng: random.Random) -> Optional[str]:
        tree = random_tree(rng, rng.randint(1, 4))
        faces = refinement_face_poset(tree).rank_counts()
        structures = dict(sorted(Counter(lt.size - 1 for lt in brute_force_leveled_structures(tree)).items()))
        if faces != structures:
            return f"faces by rank {faces} against leveled structures {structures}"
        return None

    def _check_index(self, rng: random.Random) -> Optional[str]:
        tree = random_tree(rng, rng.randint(1, 6), orbits=("a", "b", "c"))
        cz = {o: rng.randint(-3, 5) for o in ("a", "b", "c")}
        n = rng.randint(1, 4)
        c1 = {v: rng.randint(-2, 2) for v in tree.vertex_ids()}
        total = 0
        for vertex_id in tree.vertex_ids():
            plus = [e.orbit for e in tree.internal_edges if e.target == vertex_id]
            plus += [e.orbit for e in tree.inputs_at(vertex_id)]
            minus = [e.orbit for e in tree.internal_edges if e.source == vertex_id]
            minus += [e.orbit for e in tree.outputs_at(vertex_id)]
            total += fredholm_index(
                IndexData(n=n, c1=c1[vertex_id], cz_plus=[cz[o] for o in plus], cz_minus=[cz[o] for o in minus])
            ).index
        whole = fredholm_index(
            IndexData(
                n=n,
                c1=sum(c1.values()),
                cz_plus=[cz[o] for o in tree.positive_orbits()],
                cz_minus=[cz[o] for o in tree.negative_orbits()],
            )
        ).index
        if total != whole:
            return f"vertex indices add to {total}, glued index is {whole}"
        return None

    def _check_energy(self, rng: random.Random) -> Optional[str]:
        universe = random_universe(rng, rng.randint(1, 5))
        ids = [o.id for o in universe.orbits]
        lengths = [rng.randint(1, 3) for _ in range(rng.randint(2, 4))]
        sequences = [OrbitSequence(orbits=[rng.choice(ids) for _ in range(k)]) for k in lengths]
        partitions = [
            Partition(assignment=[rng.randrange(len(b)) for _ in a.orbits], targets=len(b))
            for a, b in zip(sequences, sequences[1:])
        ]
        label = StratumLabel(sequences=sequences, partitions=partitions)
        pieces, whole = stratum_energy(label, universe)
        if sum(pieces, Fraction(0)) != whole:
            return f"piece energies add to {sum(pieces)}, whole chain has {whole}"
        return None

    def _check_signs(self, rng: random.Random) -> Optional[str]:
        size = rng.randint(1, 6)
        w = LineWord(factors=[line(f"L{i}", rng.randint(-2, 3)) for i in range(size)])
        sigma = rng.sample(range(size), size)
        tau = rng.sample(range(size), size)
        # the word at k after both steps is the original factor sigma[tau[k]]
        twice = reorder_sign(reorder_sign(w, sigma), tau)
        once = reorder_sign(w, [sigma[t] for t in tau])
        if twice != once:
            return f"{twice.render()} against {once.render()}"
        return None

    def _closed_counts(self, rng: random.Random, universe: OrbitUniverse) -> CountTable:
        """Counts whose targets are products of cycles, so that ∂∂ = 0 by construction."""
        orbits = sorted(universe.orbits, key=lambda o: o.action)
        cycles = orbits[: max(1, len(orbits) // 2)]
        entries: List[CountEntry] = []
        for orbit in orbits[len(cycles):]:
            options = []
            for length in (1, 2):
                for word in itertools.combinations_with_replacement(cycles, length):
                    parity = sum(o.parity_bit for o in word) % 2
                    repeated_odd = any(word.count(o) > 1 and o.parity_bit for o in word)
                    if (
                        parity != orbit.parity_bit
                        and not repeated_odd
                        and sum(o.action for o in word) < orbit.action
                    ):
                        options.append(word)
            for word in rng.sample(options, min(len(options), 2)):
                entries.append(
                    CountEntry(
                        positive=orbit.id,
                        negative=[o.id for o in word],
                        value=Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 2, 3])),
                        vdim=0,
                    )
                )
        return CountTable(counts=entries)

    def _check_homology(self, rng: random.Random) -> Optional[str]:
        universe = random_universe(rng, rng.randint(1, 6))
        counts = self._closed_counts(rng, universe)
        basis = build_generators(universe, max_length=2)
        complex_ = build_differential(basis, counts, universe)
        if not check_boundary_squared(complex_).success:
            return "boundary does not square to zero on a closed table"
        ranks = homology_ranks(complex_)

        # dense elimination over sympy rationals
        size = len(basis)
        dense = Matrix.zeros(size, size)
        for entry in complex_.entries:
            dense[entry.row, entry.column] = entry.value
        even = [i for i, p in enumerate(complex_.parity) if p == 0]
        odd = [i for i, p in enumerate(complex_.parity) if p == 1]
        rank_even = dense.extract(list(range(size)), even).rank() if even and size else 0
        rank_odd = dense.extract(list(range(size)), odd).rank() if odd and size else 0
        expected = (len(even) - rank_even - rank_odd, len(odd) - rank_odd - rank_even)
        if (ranks.betti_even, ranks.betti_odd) != expected:
            return f"betti {ranks.betti_even}, {ranks.betti_odd} against dense {expected}"
        if ranks.betti_even - ranks.betti_odd != len(even) - len(odd):
            return "Euler characteristic changed under homology"
        return None

    def _check_associativity(self, rng: random.Random) -> Optional[str]:
        universe = random_universe(rng, rng.randint(2, 5))
        orbits = sorted(universe.orbits, key=lambda o: o.action)
        breakings: List[Breaking] = []
        for orbit in orbits:
            lower = [o for o in orbits if o.action < orbit.action]
            for length in (0, 1, 2):
                for word in itertools.combinations_with_replacement(lower, length):
                    if sum(o.action for o in word) < orbit.action and rng.random() < 0.5:
                        breakings.append(Breaking(positive=orbit.id, negative=[o.id for o in word]))

        ids = [o.id for o in orbits]
        lengths = [rng.randint(0, 2), rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 2)]
        sequences = [OrbitSequence(orbits=[rng.choice(ids) for _ in range(k)]) for k in lengths]
        if not check_composition_associativity(*sequences, universe=universe, breakings=breakings):
            return "bracketings disagree through " + " ".join(s.render() for s in sequences)
        return None


# Create a singleton instance
selftest_service = SelftestService()
