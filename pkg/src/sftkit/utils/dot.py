from typing import List

from sftkit.models.flows import PrecedenceReport
from sftkit.models.posets import FacePoset


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def poset_to_dot(poset: FacePoset, name: str = "faces") -> str:
    """Hasse diagram of a face poset, arrows pointing from a face to the faces covering it."""
    lines: List[str] = [f"digraph {name} {{", "  rankdir=BT;"]
    for element in poset.elements:
        label = f"{element.name}\\nrank {element.rank}"
        lines.append(f"  n{element.index} [shape=box,label={_quote(label)}];")
    for lower, upper in poset.covers:
        lines.append(f"  n{lower} -> n{upper};")
    lines.append("}")
    return "\n".join(lines)


def precedence_to_dot(report: PrecedenceReport, name: str = "precedence") -> str:
    """The ≺ relation on sequences, edges from lower to upper action."""
    lines: List[str] = [f"digraph {name} {{", "  rankdir=BT;"]
    for node in report.nodes:
        label = "(" + ",".join(node) + ")"
        lines.append(f"  {_quote(label)} [shape=ellipse];")
    for lower, upper in report.relations:
        lines.append(f"  {_quote('(' + ','.join(lower) + ')')} -> {_quote('(' + ','.join(upper) + ')')};")
    lines.append("}")
    return "\n".join(lines)
