# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from typing import Dict, List, Optional, Set

from ..equirec.arena import Tag, TreeHandle, TreeKind, participants, unfold_head
from ..errors import KindMismatch
from .labels import Comm


class _NoStep(Exception):
    pass


def global_step(g: TreeHandle, a: Comm) -> Optional[TreeHandle]:
    """Reduce a global tree by a communication.

    At a node between the sender and receiver of `a` the chosen branch is taken. A node whose
    participants are disjoint from those of `a` steps in every branch at once, provided its own
    participants occur in every branch. Cycles of such nodes step corecursively.

    Args:
        g (TreeHandle): Global tree.
        a (Comm): Communication.

    Returns:
        Optional[TreeHandle]: The reduct, or None when no rule applies.
    """
    if g.kind is not TreeKind.GLOBAL:
        raise KindMismatch('global steps are defined on global trees')
    arena = g.arena
    specs: Dict[int, tuple] = {}
    started: Set[int] = set()
    subjects = {a.sender, a.receiver}

    def step(h: TreeHandle):
        head = unfold_head(h)
        if head.tag is Tag.END:
            raise _NoStep()
        if head.parties == (a.sender, a.receiver):
            if a.label not in head.branches:
                raise _NoStep()
            return head.branches[a.label][1]
        if subjects & set(head.parties):
            raise _NoStep()
        for _, child in head.branches.values():
            if not set(head.parties) <= participants(child):
                raise _NoStep()
        if h.node_id not in started:
            started.add(h.node_id)
            children = tuple((lbl, srt, step(child)) for lbl, (srt, child) in sorted(head.branches.items()))
            specs[h.node_id] = (TreeKind.GLOBAL, Tag.COMM, head.parties, children)
        return h.node_id

    try:
        result = step(g)
    except _NoStep:
        return None
    if isinstance(result, TreeHandle):
        return result
    return arena.intern_graph(specs)[result]


def global_candidates(g: TreeHandle) -> List[Comm]:
    """ Every communication label occurring in `g` """
    labels = set()
    for node_id in g.arena.reachable(g):
        node = g.arena.nodes[node_id]
        if node.tag is Tag.COMM:
            labels.update(Comm(node.parties[0], node.parties[1], lbl) for lbl, _, _ in node.branches)
    return sorted(labels, key=Comm.sort_key)


def global_enabled(g: TreeHandle) -> List[Comm]:
    """ Communications for which `g` has a step """
    return [a for a in global_candidates(g) if global_step(g, a) is not None]
