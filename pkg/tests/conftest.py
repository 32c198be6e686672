import json
import os
import sys
from pathlib import Path

import pytest

# Add the src directory to the Python path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

# Set environment variables for testing
os.environ["LOG_LEVEL"] = "DEBUG"
os.environ["LOG_TO_FILE"] = "false"
os.environ["LOG_USE_COLOR"] = "false"
os.environ["SFT_SELFTEST_TRIALS"] = "5"
os.environ["SFT_SELFTEST_SEED"] = "7"
os.environ["SFT_OUTPUT_FORMAT"] = "json"

from sftkit.models.orbits import OrbitUniverse, Parity, ReebOrbit  # noqa: E402
from sftkit.models.trees import (  # noqa: E402
    DecoratedTree,
    Direction,
    ExteriorEdge,
    InternalEdge,
    TreeVertex,
)


def make_tree(vertices, internal=(), inputs=(), outputs=()):
    """Build a tree from (id, degree) pairs, (from, to, orbit) edges and (vertex, orbit) punctures."""
    return DecoratedTree(
        vertices=[TreeVertex(id=v, degree=d) for v, d in vertices],
        internal_edges=[InternalEdge(source=s, target=t, orbit=o) for s, t, o in internal],
        exterior_edges=[ExteriorEdge(vertex=v, direction=Direction.IN, orbit=o) for v, o in inputs]
        + [ExteriorEdge(vertex=v, direction=Direction.OUT, orbit=o) for v, o in outputs],
    )


@pytest.fixture
def universe():
    """Three simple orbits a, b, c of actions 1, 2, 3."""
    return OrbitUniverse(
        action_bound=3,
        orbits=[
            ReebOrbit(id="a", action=1, parity=Parity.EVEN),
            ReebOrbit(id="b", action=2, parity=Parity.EVEN),
            ReebOrbit(id="c", action=3, parity=Parity.ODD),
        ],
    )


@pytest.fixture
def corolla():
    """One vertex of degree 1 with input a and outputs a, b."""
    return make_tree([("r", 1)], inputs=[("r", "a")], outputs=[("r", "a"), ("r", "b")])


@pytest.fixture
def two_children():
    """Root r fed by c with leaf children x and y."""
    return make_tree(
        [("r", 0), ("x", 1), ("y", 1)],
        internal=[("r", "x", "a"), ("r", "y", "b")],
        inputs=[("r", "c")],
    )


@pytest.fixture
def three_children():
    return make_tree(
        [("r", 0), ("x", 1), ("y", 1), ("z", 1)],
        internal=[("r", "x", "a"), ("r", "y", "a"), ("r", "z", "b")],
        inputs=[("r", "c")],
    )


@pytest.fixture
def chain():
    """Directed chain r -> a -> b."""
    return make_tree(
        [("r", 1), ("a", 1), ("b", 1)],
        internal=[("r", "a", "b"), ("a", "b", "a")],
        inputs=[("r", "c")],
        outputs=[("b", "a")],
    )


@pytest.fixture
def build_tree():
    return make_tree


@pytest.fixture
def project_data():
    """A complete input document: orbits a, b, c with CZ data, one tree, counts and breakings."""
    return {
        "schema_version": 1,
        "universe": {
            "L": "3",
            "orbits": [
                {"id": "a", "action": "1", "parity": "even", "cz": 3},
                {"id": "b", "action": "2", "parity": "even", "cz": 3},
                {"id": "c", "action": "3", "parity": "odd", "cz": 2},
            ],
        },
        "trees": [
            {
                "name": "fork",
                "tree": {
                    "vertices": [{"id": "r", "degree": 0}, {"id": "x", "degree": 1}, {"id": "y", "degree": 1}],
                    "internal_edges": [
                        {"from": "r", "to": "x", "orbit": "a"},
                        {"from": "r", "to": "y", "orbit": "b"},
                    ],
                    "exterior_edges": [{"vertex": "r", "dir": "in", "orbit": "c"}],
                },
            }
        ],
        "counts": {"counts": [{"positive": "c", "negative": ["a"], "value": "1", "vdim": 0}]},
        "breakings": [
            {"positive": "b", "negative": ["a"]},
            {"positive": "c", "negative": ["b"]},
        ],
        "options": {"cutoff_length": 1, "n": 2},
    }


@pytest.fixture
def project_file(tmp_path, project_data):
    """The project document written to a temporary file."""
    path = tmp_path / "project.json"
    path.write_text(json.dumps(project_data), encoding="utf-8")
    return path
