# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import networkx as nx

from ..syntax.terms import Participant
from .arena import Tag, TreeHandle, participants


def avoiding_graph(g: TreeHandle, r: Participant) -> nx.DiGraph:
    """Subgraph of nodes reachable from `g` whose edges do not leave a communication involving `r`.

    Args:
        g (TreeHandle): Global tree.
        r (Participant): Participant to avoid.

    Returns:
        nx.DiGraph: Node ids; communications involving `r` and end nodes have no successors.
    """
    arena = g.arena
    graph = nx.DiGraph()
    for node_id in arena.reachable(g):
        graph.add_node(node_id)
        node = arena.nodes[node_id]
        if node.tag is Tag.COMM and r in node.parties:
            continue
        for _, _, child in node.branches:
            graph.add_edge(node_id, child)
    return graph


def balanced(g: TreeHandle) -> bool:
    """Decide balancedness of a global tree.

    For every reachable subtree and every participant of that subtree, the part of the tree
    reachable without meeting that participant must be finite, i.e. the avoiding subgraph
    reachable from the subtree is acyclic.

    Args:
        g (TreeHandle): Global tree.

    Returns:
        bool: True iff `g` is balanced.
    """
    arena = g.arena
    for r in sorted(participants(g)):
        graph = avoiding_graph(g, r)
        cyclic = set()
        for component in nx.strongly_connected_components(graph):
            if len(component) > 1 or any(graph.has_edge(n, n) for n in component):
                cyclic.update(component)
        if not cyclic:
            continue
        reaching = set(cyclic)
        for node_id in cyclic:
            reaching.update(nx.ancestors(graph, node_id))
        if any(r in participants(arena.handle(node_id)) for node_id in reaching):
            return False
    return True


def balanced_by_paths(g: TreeHandle) -> bool:
    """ Reference check: enumerate avoiding paths from every subtree and look for a repeated node """
    arena = g.arena

    def has_cycle(start: int, r: Participant) -> bool:
        stack = [(start, (start,))]
        while stack:
            node_id, path = stack.pop()
            node = arena.nodes[node_id]
            if node.tag is Tag.COMM and r in node.parties:
                continue
            for _, _, child in node.branches:
                if child in path:
                    return True
                stack.append((child, path + (child,)))
        return False

    for node_id in arena.reachable(g):
        for r in participants(arena.handle(node_id)):
            if has_cycle(node_id, r):
                return False
    return True


def parties_persist(g: TreeHandle) -> bool:
    """ Whether both parties of every reachable communication occur in each of its unfinished continuations """
    arena = g.arena
    for node_id in arena.reachable(g):
        node = arena.nodes[node_id]
        if node.tag is not Tag.COMM:
            continue
        for _, _, child in node.branches:
            handle = arena.handle(child)
            if not handle.is_end and not set(node.parties) <= participants(handle):
                return False
    return True
