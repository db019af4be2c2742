# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from typing import Dict, FrozenSet, Tuple

import networkx as nx

from .equirec.arena import Tag, TreeHandle, TreeKind, unfold_head
from .errors import KindMismatch
from .projection import TypeEnv
from .syntax.processes import (Choice, Inact, Lit, PIte, PRec, PRecv, PSend, PVar, Process, RecvBranch,
                               SessionForm)
from .syntax.terms import Sort, Value, canonical_value

CHOICES = ('all', 'first')

_COIN = Choice(Lit(Value(Sort.BOOL, True)), Lit(Value(Sort.BOOL, False)))

# node ids of the enclosing nodes that may bind a recursion variable, outermost first
Binders = Tuple[int, ...]


def cyclic_nodes(t: TreeHandle) -> FrozenSet[int]:
    """ Node ids reachable from `t` that lie on a cycle """
    arena = t.arena
    graph = nx.DiGraph()
    for node_id in arena.reachable(t):
        graph.add_node(node_id)
        graph.add_edges_from((node_id, child) for _, _, child in arena.nodes[node_id].branches)
    cyclic = set()
    for component in nx.strongly_connected_components(graph):
        if len(component) > 1 or any(graph.has_edge(n, n) for n in component):
            cyclic.update(component)
    return frozenset(cyclic)


class _Realizer:
    """Builds a process from a local tree.

    Results depend on a node and on the binders above it, never on the rest of the path, so
    both passes are memoised on that pair and shared subtrees are visited once per binder stack.
    """

    def __init__(self, t: TreeHandle, choice: str):
        self.choice = choice
        self.cyclic = cyclic_nodes(t)
        self.loops: FrozenSet[int] = frozenset()
        self._targets: Dict[Tuple[int, Binders], FrozenSet[int]] = {}
        self._built: Dict[Tuple[int, Binders], Process] = {}

    @staticmethod
    def _push(h: TreeHandle, binders: Binders, candidates: FrozenSet[int]) -> Binders:
        return binders + (h.node_id,) if h.node_id in candidates else binders

    def find_loops(self, h: TreeHandle, binders: Binders = ()) -> FrozenSet[int]:
        """ Nodes that some path from `h` reaches a second time """
        key = (h.node_id, binders)
        if key not in self._targets:
            if h.node_id in binders:
                found = frozenset([h.node_id])
            else:
                inner = self._push(h, binders, self.cyclic)
                found = frozenset().union(*(self.find_loops(child, inner)
                                            for _, (_, child) in sorted(unfold_head(h).branches.items())))
            self._targets[key] = found
        return self._targets[key]

    def build(self, h: TreeHandle, binders: Binders = ()) -> Process:
        key = (h.node_id, binders)
        if key not in self._built:
            if h.node_id in binders:
                result = PVar(len(binders) - 1 - binders.index(h.node_id), 'X')
            else:
                body = self._body(h, self._push(h, binders, self.loops))
                result = PRec(body, 'X') if h.node_id in self.loops else body
            self._built[key] = result
        return self._built[key]

    def _body(self, h: TreeHandle, binders: Binders) -> Process:
        head = unfold_head(h)
        if head.tag is Tag.END:
            return Inact()
        if head.tag is Tag.RECV:
            return PRecv(head.peer, tuple(RecvBranch(lbl, 'x', self.build(child, binders))
                                          for lbl, (_, child) in sorted(head.branches.items())))
        labels = sorted(head.branches)
        if self.choice == 'first':
            labels = labels[:1]
        sends = [PSend(head.peer, lbl, Lit(canonical_value(head.branches[lbl][0])),
                       self.build(head.branches[lbl][1], binders)) for lbl in labels]
        result = sends[-1]
        for send in reversed(sends[:-1]):
            result = PIte(_COIN, send, result)
        return result


def synthesize_process(t: TreeHandle, choice: str = 'all') -> Process:
    """Build a process that type-checks against a local type.

    Sends carry the smallest literal of their sort, receives handle every label and recursion
    binders appear where the tree loops back.

    Args:
        t (TreeHandle): Local type.
        choice (str, optional): 'all' chooses among every send label with a non-deterministic
            conditional; 'first' always sends the smallest label.

    Raises:
        KindMismatch: `t` is a global tree.

    Returns:
        Process: A closed, guarded process.
    """
    if t.kind is not TreeKind.LOCAL:
        raise KindMismatch('realizers are built from local trees')
    if choice not in CHOICES:
        raise ValueError(f'unknown choice mode {choice!r}')
    realizer = _Realizer(t, choice)
    realizer.loops = realizer.find_loops(t)
    return realizer.build(t)


def synthesize_session(env: TypeEnv, choice: str = 'all') -> SessionForm:
    """ A session running a synthesized process for every entry of `env` """
    return SessionForm({p: synthesize_process(t, choice) for p, t in env.items()})
