"""Graphviz export of closed-testing decision trees."""

from __future__ import annotations

from typing import Dict, Optional, Tuple

import graphviz

from .closure import ClosureResult

__all__ = ["REJECTED_ATTRIBUTES", "export_tree", "node_name"]

NODE_ATTRIBUTES: Dict[str, str] = {"shape": "box", "fontname": "Helvetica"}

REJECTED_ATTRIBUTES: Dict[str, str] = {
    "style": "filled,bold",
    "fillcolor": "lightgrey",
    "penwidth": "2",
}
"""Attributes of nodes rejected by the closed test."""


def node_name(subset: Tuple[int, ...]) -> str:
    return "H" + "_".join(str(i) for i in subset)


def export_tree(
    result: ClosureResult, alpha: Optional[float] = None
) -> str:
    """Render the hypothesis lattice of a closure result as a DOT document.

    Each node is labeled with its group labels and local p-value; edges
    run from every subset to each superset with one more treatment. Nodes
    rejected by the closed test at ``alpha`` (default: the result's own
    level) get `REJECTED_ATTRIBUTES`.

    Parameters
    ----------
    result : `ClosureResult`
        The closure to draw.
    alpha : `float`, optional
        Level used for styling rejected nodes.

    Returns
    -------
    source : `str`
        The DOT source.
    """
    if alpha is not None:
        result = result.with_alpha(alpha)
    rejected = set(result.rejected_nodes())
    dot = graphviz.Digraph(
        name=f"closure_{result.method.value.replace('-', '_')}",
        comment=f"{result.method.value} {result.side.value}",
        graph_attr={"rankdir": "BT"},
        node_attr=NODE_ATTRIBUTES,
    )

    subsets = [node.subset for node in result.nodes]
    for node in result.nodes:
        members = ", ".join(result.labels[i] for i in node.subset)
        label = f"{{{members}}}\\np = {node.local_p:.4f}"
        attributes = REJECTED_ATTRIBUTES if node.subset in rejected else {}
        dot.node(node_name(node.subset), label=label, **attributes)

    present = set(subsets)
    for subset in subsets:
        for extra in range(1, result.k + 1):
            if extra in subset:
                continue
            parent = tuple(sorted(subset + (extra,)))
            if parent in present:
                dot.edge(node_name(subset), node_name(parent))
    return dot.source
