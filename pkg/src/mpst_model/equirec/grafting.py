# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

from ..errors import EmptyBranchSet, MissingHole, NotAParticipant, NotBalanced, SelfCommunication
from ..syntax.terms import Branch, Participant, branch_tuple
from .arena import Tag, TreeArena, TreeHandle, TreeKind, default_arena, participants, unfold_head
from .balance import balanced


class GContext:
    """ Finite global tree prefix with numbered holes """
    pass


@dataclass(frozen=True)
class Hole(GContext):
    index: int


@dataclass(frozen=True)
class CtxComm(GContext):
    sender: Participant
    receiver: Participant
    branches: Tuple[Branch, ...]

    def __post_init__(self):
        if not self.branches:
            raise EmptyBranchSet('context communication without branches')
        if self.sender == self.receiver:
            raise SelfCommunication(f'{self.sender} communicates with itself')


HoleAssignment = Dict[int, TreeHandle]


def holes(c: GContext) -> List[int]:
    """ Distinct hole indices in breadth-first order """
    found: Dict[int, None] = {}
    seen = set()
    queue = deque([c])
    while queue:
        item = queue.popleft()
        if id(item) in seen:
            continue
        seen.add(id(item))
        if isinstance(item, Hole):
            found.setdefault(item.index)
        else:
            queue.extend(b.cont for b in item.branches)
    return list(found)


def context_participants(c: GContext) -> FrozenSet[Participant]:
    if isinstance(c, Hole):
        return frozenset()
    result = {c.sender, c.receiver}
    for b in c.branches:
        result |= context_participants(b.cont)
    return frozenset(result)


def context_height(c: GContext) -> int:
    """ Length of the longest path from the root to a hole """
    if isinstance(c, Hole):
        return 0
    return 1 + max(context_height(b.cont) for b in c.branches)


def graft(c: GContext, assignment: HoleAssignment, arena: Optional[TreeArena] = None) -> TreeHandle:
    """Fill the holes of a context.

    Args:
        c (GContext): Context.
        assignment (HoleAssignment): Tree for every hole index.
        arena (TreeArena, optional): Arena for the result; defaults to the arena of the assigned trees.

    Raises:
        MissingHole: A hole of `c` has no assigned tree.

    Returns:
        TreeHandle: The grafted global tree.
    """
    for index in holes(c):
        if index not in assignment:
            raise MissingHole(index)
    if isinstance(c, Hole):
        return assignment[c.index]
    if arena is None:
        arena = next(iter(assignment.values())).arena if assignment else default_arena()
    specs = {}
    keys: Dict[int, int] = {}

    def visit(item):
        if isinstance(item, Hole):
            return assignment[item.index]
        # contexts share subcontexts; one spec per object
        if id(item) in keys:
            return keys[id(item)]
        key = keys[id(item)] = len(keys)
        specs[key] = (TreeKind.GLOBAL, Tag.COMM, (item.sender, item.receiver),
                      tuple((b.label, b.sort, visit(b.cont)) for b in item.branches))
        return key

    root = visit(c)
    return arena.intern_graph(specs)[root]


def p_grafting(g: TreeHandle, r: Participant) -> Tuple[GContext, HoleAssignment]:
    """Split a balanced tree into an `r`-free context and trees starting with `r` or end.

    The cut is the shallowest one: it stops at the first node on each path that involves `r`
    or is end. Holes are numbered breadth-first, and a subtree cut on several paths gets a single hole.

    Args:
        g (TreeHandle): Balanced global tree.
        r (Participant): A participant of `g`.

    Raises:
        NotBalanced: `g` is not balanced.
        NotAParticipant: `r` does not occur in `g`.

    Returns:
        Tuple[GContext, HoleAssignment]: Context and assignment whose graft is `g`.
    """
    if not balanced(g):
        raise NotBalanced('p-grafting needs a balanced global tree')
    if r not in participants(g):
        raise NotAParticipant(r)
    cut: Dict[int, TreeHandle] = {}
    seen = {g.node_id}
    queue = deque([g])
    while queue:
        h = queue.popleft()
        head = unfold_head(h)
        if head.tag is Tag.END or head.involves(r):
            cut[h.node_id] = h
            continue
        for _, (_, child) in sorted(head.branches.items()):
            if child.node_id not in seen:
                seen.add(child.node_id)
                queue.append(child)
    index = {node_id: i for i, node_id in enumerate(cut)}
    built: Dict[int, GContext] = {}

    def build(h: TreeHandle) -> GContext:
        if h.node_id not in built:
            if h.node_id in index:
                built[h.node_id] = Hole(index[h.node_id])
            else:
                head = unfold_head(h)
                built[h.node_id] = CtxComm(head.sender, head.receiver,
                                           branch_tuple((lbl, srt, build(child))
                                                        for lbl, (srt, child) in head.branches.items()))
        return built[h.node_id]

    return build(g), {i: h for i, h in enumerate(cut.values())}
