import re

from sftkit.blowup import blowup_simplex, refinement_face_poset
from sftkit.flowcat import precedence_and_norm
from sftkit.utils.dot import poset_to_dot, precedence_to_dot


def test_poset_to_dot(two_children):
    """Test one node per face and one arrow per cover relation."""
    poset = refinement_face_poset(two_children)

    text = poset_to_dot(poset)
    lines = text.splitlines()

    assert lines[0] == "digraph faces {"
    assert lines[-1] == "}"
    assert sum("shape=box" in line for line in lines) == len(poset.elements)
    assert sum(bool(re.fullmatch(r"  n\d+ -> n\d+;", line)) for line in lines) == len(poset.covers)


def test_poset_to_dot_name():
    assert poset_to_dot(blowup_simplex(1), name="simplex").startswith("digraph simplex {")


def test_precedence_to_dot(universe):
    report = precedence_and_norm(universe, [(["a"], ["b"]), (["b"], ["c"])])

    text = precedence_to_dot(report)

    assert '"(a)" [shape=ellipse];' in text
    assert '"(a)" -> "(b)";' in text
    assert '"(b)" -> "(c)";' in text
    assert '"(a)" -> "(c)";' not in text
