# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from typing import Callable, Iterable, Optional

import networkx as nx

from .arena import Tag, TreeHandle


def _quote(text: str) -> str:
    return '"' + text.replace('"', "'") + '"'


def tree_graph(h: TreeHandle) -> nx.DiGraph:
    """ Reachable node graph of a tree, annotated for display """
    arena = h.arena
    graph = nx.DiGraph(name='tree')
    for node_id in arena.reachable(h):
        node = arena.nodes[node_id]
        if node.tag is Tag.END:
            text = 'end'
        elif node.tag is Tag.COMM:
            text = f'{node.parties[0]} -> {node.parties[1]}'
        else:
            text = f'{node.parties[0]} {"(+)" if node.tag is Tag.SEND else "&"}'
        graph.add_node(f'n{node_id}', label=_quote(text), shape='box' if node_id == h.node_id else 'ellipse')
        for lbl, srt, child in node.branches:
            graph.add_edge(f'n{node_id}', f'n{child}', label=_quote(f'l{lbl}({srt.value})'))
    return graph


def to_dot(graph: nx.DiGraph) -> str:
    """ Serialise a graph in DOT format """
    return nx.nx_pydot.to_pydot(graph).to_string()


def labelled_graph(edges: Iterable, describe_state: Callable, describe_label: Callable,
                   highlight: Optional[set] = None, initial=None) -> nx.DiGraph:
    """Build a display graph from (source, label, target) triples.

    Args:
        edges (Iterable): Transition triples.
        describe_state (Callable): Text of a state.
        describe_label (Callable): Text of a label.
        highlight (set, optional): Triples drawn in red.
        initial: State drawn with a double border.

    Returns:
        nx.DiGraph: Multi-edge graph ready for `to_dot`.
    """
    graph = nx.MultiDiGraph(name='lts')
    names = {}

    def name(state):
        if state not in names:
            names[state] = f's{len(names)}'
            graph.add_node(names[state], label=_quote(describe_state(state)),
                           peripheries=2 if state == initial else 1)
        return names[state]

    if initial is not None:
        name(initial)
    highlight = highlight or set()
    for source, label, target in edges:
        attrs = {'label': _quote(describe_label(label))}
        if (source, label, target) in highlight:
            attrs['color'] = 'red'
        graph.add_edge(name(source), name(target), **attrs)
    return graph
