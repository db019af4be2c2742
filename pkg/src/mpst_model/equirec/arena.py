# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import logging
from collections import deque
from enum import Enum
from itertools import count
from typing import Dict, FrozenSet, Hashable, List, Mapping, NamedTuple, Optional, Tuple, Union

from ..errors import KindMismatch
from ..syntax.terms import (Branch, GComm, GEnd, GRec, GVar, LEnd, LRec, LRecv, LSend, LVar, Participant, Sort,
                            SynType, unfold_syntax)

logger = logging.getLogger(__name__)


class TreeKind(Enum):
    GLOBAL = 'global'
    LOCAL = 'local'


class Tag(Enum):
    END = 'end'
    COMM = 'comm'
    SEND = 'send'
    RECV = 'recv'


class Node(NamedTuple):
    kind: TreeKind
    tag: Tag
    parties: Tuple[Participant, ...]            # (sender, receiver) for COMM, (peer,) for SEND/RECV
    branches: Tuple[Tuple[int, Sort, int], ...]  # (label, sort, child node id), sorted by label

    @property
    def shape(self):
        return (self.kind, self.tag, self.parties, tuple((lbl, srt) for lbl, srt, _ in self.branches))


class TreeHandle:
    """ A regular tree: a canonical node of an arena. Equal handles denote bisimilar trees. """
    __slots__ = ('arena', 'node_id')

    def __init__(self, arena: 'TreeArena', node_id: int):
        self.arena = arena
        self.node_id = node_id

    def __eq__(self, other) -> bool:
        return isinstance(other, TreeHandle) and other.arena is self.arena and other.node_id == self.node_id

    def __hash__(self) -> int:
        return hash(self.node_id)

    def __repr__(self):
        return f'TreeHandle({self.node_id})'

    @property
    def node(self) -> Node:
        return self.arena.nodes[self.node_id]

    @property
    def kind(self) -> TreeKind:
        return self.node.kind

    @property
    def is_end(self) -> bool:
        return self.node.tag is Tag.END

    def head(self) -> 'Head':
        return unfold_head(self)


class Head:
    """Head view of a tree: End, Comm(sender, receiver, branches) or Send/Recv(peer, branches).

    Branches map each label to its payload sort and continuation handle.
    """

    def __init__(self, tag: Tag, parties: Tuple[Participant, ...], branches: Dict[int, Tuple[Sort, TreeHandle]]):
        self.tag = tag
        self.parties = parties
        self.branches = branches

    @property
    def sender(self) -> Participant:
        return self.parties[0]

    @property
    def receiver(self) -> Participant:
        return self.parties[1]

    @property
    def peer(self) -> Participant:
        return self.parties[0]

    @property
    def labels(self) -> FrozenSet[int]:
        return frozenset(self.branches)

    def involves(self, r: Participant) -> bool:
        return r in self.parties

    def __repr__(self):
        inner = ', '.join(f'l{lbl}: ({srt.value}, {h!r})' for lbl, (srt, h) in sorted(self.branches.items()))
        return f'{self.tag.value.title()}({", ".join(map(str, self.parties))}{"; " if self.parties else ""}{inner})'


# A graph to intern: key -> (kind, tag, parties, ((label, sort, ref), ...)) where ref is a key or a handle
NodeSpec = Tuple[TreeKind, Tag, Tuple[Participant, ...], Tuple[Tuple[int, Sort, Union[Hashable, TreeHandle]], ...]]


class TreeArena:
    def __init__(self):
        """Tree Arena

        Hash-consed store of minimal regular-tree automata. Every interned graph is minimised
        and each state is identified by the canonical breadth-first form of the automaton it
        roots, so two handles are equal exactly when their trees are bisimilar.
        """
        self.nodes: List[Node] = []
        self._forms: Dict[tuple, int] = {}
        self._participants: Dict[int, FrozenSet[Participant]] = {}
        # projection results by (node, participant); None when the node is not projectable
        self.projections: Dict[Tuple[int, Participant], Optional[int]] = {}

    def __len__(self) -> int:
        return len(self.nodes)

    def handle(self, node_id: int) -> TreeHandle:
        return TreeHandle(self, node_id)

    def end(self, kind: TreeKind) -> TreeHandle:
        return self.intern_graph({0: (kind, Tag.END, (), ())})[0]

    def intern(self, term: SynType) -> TreeHandle:
        """ Intern a closed, guarded type """
        specs, root = _term_specs(term)
        return self.intern_graph(specs)[root]

    def intern_graph(self, specs: Mapping[Hashable, NodeSpec]) -> Dict[Hashable, TreeHandle]:
        """Intern a finite graph of tree nodes.

        Args:
            specs (Mapping[Hashable, NodeSpec]): Nodes by key. Children refer to other keys or to
                handles already in this arena.

        Returns:
            Dict[Hashable, TreeHandle]: Canonical handle of every key.
        """
        shape: Dict[tuple, tuple] = {}
        succ: Dict[tuple, List[tuple]] = {}
        expand = deque()

        def state_of(ref) -> tuple:
            if isinstance(ref, TreeHandle):
                if ref.arena is not self:
                    raise ValueError('handle belongs to another arena')
                state = ('h', ref.node_id)
                if state not in shape:
                    shape[state] = None
                    expand.append(ref.node_id)
                return state
            return ('k', ref)

        for key, (kind, tag, parties, branches) in specs.items():
            state = ('k', key)
            shape[state] = (kind, tag, tuple(parties), tuple((lbl, srt) for lbl, srt, _ in branches))
            succ[state] = [state_of(ref) for _, _, ref in branches]
        while expand:
            node_id = expand.popleft()
            node = self.nodes[node_id]
            shape[('h', node_id)] = node.shape
            succ[('h', node_id)] = [state_of(self.handle(child)) for _, _, child in node.branches]
        for state, children in succ.items():
            for child in children:
                if child not in shape:
                    raise KeyError(f'dangling reference {child[1]!r}')

        block = _refine(shape, succ)

        # Quotient automaton
        class_shape: Dict[int, tuple] = {}
        class_succ: Dict[int, List[int]] = {}
        for state, b in block.items():
            if b not in class_shape:
                class_shape[b] = shape[state]
                class_succ[b] = [block[c] for c in succ[state]]

        forms = {b: _canonical_form(b, class_shape, class_succ) for b in class_shape}
        class_id: Dict[int, int] = {}
        fresh = []
        for b in sorted(class_shape):
            node_id = self._forms.get(forms[b])
            if node_id is None:
                node_id = len(self.nodes)
                self.nodes.append(None)
                self._forms[forms[b]] = node_id
                fresh.append(b)
            class_id[b] = node_id
        for b in fresh:
            kind, tag, parties, labels = class_shape[b]
            children = tuple((lbl, srt, class_id[c]) for (lbl, srt), c in zip(labels, class_succ[b]))
            self.nodes[class_id[b]] = Node(kind, tag, parties, children)
        if fresh:
            logger.debug('interned %d new nodes (arena size %d)', len(fresh), len(self.nodes))
        return {key: self.handle(class_id[block[('k', key)]]) for key in specs}

    def reachable(self, h: TreeHandle) -> List[int]:
        """ Node ids reachable from `h`, in breadth-first order """
        seen = {h.node_id: None}
        queue = deque([h.node_id])
        while queue:
            for _, _, child in self.nodes[queue.popleft()].branches:
                if child not in seen:
                    seen[child] = None
                    queue.append(child)
        return list(seen)

    def participants(self, h: TreeHandle) -> FrozenSet[Participant]:
        cached = self._participants.get(h.node_id)
        if cached is None:
            parties = set()
            for node_id in self.reachable(h):
                node = self.nodes[node_id]
                if node.tag is Tag.COMM:
                    parties.update(node.parties)
            cached = self._participants[h.node_id] = frozenset(parties)
        return cached


def _refine(shape: Mapping[tuple, tuple], succ: Mapping[tuple, List[tuple]]) -> Dict[tuple, int]:
    """ Moore partition refinement; returns the block number of every state """
    numbering: Dict[object, int] = {}
    block = {s: numbering.setdefault(shape[s], len(numbering)) for s in sorted(shape, key=repr)}
    while True:
        numbering = {}
        refined = {}
        for s in sorted(shape, key=repr):
            signature = (block[s], tuple(block[c] for c in succ[s]))
            refined[s] = numbering.setdefault(signature, len(numbering))
        if len(numbering) == len(set(block.values())):
            return refined
        block = refined


def _canonical_form(root: int, class_shape, class_succ) -> tuple:
    order = [root]
    index = {root: 0}
    for b in order:
        for c in class_succ[b]:
            if c not in index:
                index[c] = len(order)
                order.append(c)
    return tuple((class_shape[b], tuple(index[c] for c in class_succ[b])) for b in order)


def _term_specs(term: SynType):
    specs: Dict[int, NodeSpec] = {}
    alias: Dict[tuple, Hashable] = {}
    keys = count()

    def visit(t, binders: Tuple[Hashable, ...]):
        if isinstance(t, (GVar, LVar)):
            return binders[t.index]
        if isinstance(t, (GRec, LRec)):
            a = ('rec', next(keys))
            alias[a] = visit(t.body, (a,) + binders)
            return a
        key = next(keys)
        if isinstance(t, GEnd):
            specs[key] = (TreeKind.GLOBAL, Tag.END, (), ())
        elif isinstance(t, LEnd):
            specs[key] = (TreeKind.LOCAL, Tag.END, (), ())
        elif isinstance(t, GComm):
            specs[key] = (TreeKind.GLOBAL, Tag.COMM, (t.sender, t.receiver), _visit_branches(t, binders))
        elif isinstance(t, LSend):
            specs[key] = (TreeKind.LOCAL, Tag.SEND, (t.peer,), _visit_branches(t, binders))
        elif isinstance(t, LRecv):
            specs[key] = (TreeKind.LOCAL, Tag.RECV, (t.peer,), _visit_branches(t, binders))
        else:
            raise TypeError(f'not a type: {t!r}')
        return key

    def _visit_branches(t, binders):
        return tuple((b.label, b.sort, visit(b.cont, binders)) for b in t.branches)

    def resolve(ref):
        while ref in alias:
            ref = alias[ref]
        return ref

    root = resolve(visit(term, ()))
    resolved = {key: (kind, tag, parties, tuple((lbl, srt, resolve(ref)) for lbl, srt, ref in branches))
                for key, (kind, tag, parties, branches) in specs.items()}
    return resolved, root


_default_arena = TreeArena()


def default_arena() -> TreeArena:
    return _default_arena


def intern(term: SynType, arena: Optional[TreeArena] = None) -> TreeHandle:
    """Intern a closed, guarded global or local type.

    Args:
        term (SynType): Type syntax.
        arena (TreeArena, optional): Arena to intern into. Defaults to the process-wide arena.

    Returns:
        TreeHandle: Handle of the regular tree denoted by `term`.
    """
    return (arena if arena is not None else _default_arena).intern(term)


def end_tree(kind: TreeKind, arena: Optional[TreeArena] = None) -> TreeHandle:
    return (arena if arena is not None else _default_arena).end(kind)


def unfold_head(h: TreeHandle) -> Head:
    node = h.node
    return Head(node.tag, node.parties, {lbl: (srt, h.arena.handle(child)) for lbl, srt, child in node.branches})


def participants(g: TreeHandle) -> FrozenSet[Participant]:
    """ Participants of every communication reachable from `g` """
    return g.arena.participants(g)


def bisim(a: TreeHandle, b: TreeHandle, oracle: bool = False) -> bool:
    """Decide whether two trees are bisimilar.

    Args:
        a (TreeHandle): First tree.
        b (TreeHandle): Second tree, of the same kind.
        oracle (bool, optional): Walk the pair graph instead of comparing ids. Defaults to False.

    Raises:
        KindMismatch: One tree is global and the other local.

    Returns:
        bool: True iff the infinite unfoldings are equal.
    """
    if a.kind is not b.kind:
        raise KindMismatch(f'cannot compare a {a.kind.value} tree with a {b.kind.value} tree')
    if not oracle:
        return a == b
    seen = set()
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if (x, y) in seen:
            continue
        seen.add((x, y))
        hx, hy = unfold_head(x), unfold_head(y)
        if hx.tag is not hy.tag or hx.parties != hy.parties or hx.labels != hy.labels:
            return False
        for lbl, (srt, child) in hx.branches.items():
            other_sort, other_child = hy.branches[lbl]
            if srt is not other_sort:
                return False
            stack.append((child, other_child))
    return True


def bisim_terms(s: SynType, t: SynType) -> bool:
    """ Coinductive bisimilarity on type syntax, by unfolding; independent of the arena """
    seen = set()
    stack = [(s, t)]
    while stack:
        x, y = stack.pop()
        x, y = unfold_syntax(x), unfold_syntax(y)
        if (x, y) in seen:
            continue
        seen.add((x, y))
        if type(x) is not type(y):
            return False
        if isinstance(x, (GEnd, LEnd)):
            continue
        parties_x = (x.sender, x.receiver) if isinstance(x, GComm) else (x.peer,)
        parties_y = (y.sender, y.receiver) if isinstance(y, GComm) else (y.peer,)
        if parties_x != parties_y:
            return False
        if [(b.label, b.sort) for b in x.branches] != [(b.label, b.sort) for b in y.branches]:
            return False
        stack.extend((bx.cont, by.cont) for bx, by in zip(x.branches, y.branches))
    return True


def to_syntax(h: TreeHandle) -> SynType:
    """Read a tree back as closed type syntax.

    Every node on a cycle becomes a recursion binder; binders without a back reference are dropped.

    Args:
        h (TreeHandle): Tree to convert.

    Returns:
        SynType: A term that interns to `h`.
    """
    arena = h.arena

    def build(node_id: int, path: Tuple[int, ...]):
        if node_id in path:
            var = GVar if arena.nodes[node_id].kind is TreeKind.GLOBAL else LVar
            return var(path.index(node_id))
        node = arena.nodes[node_id]
        if node.tag is Tag.END:
            return GEnd() if node.kind is TreeKind.GLOBAL else LEnd()
        inner = (node_id,) + path
        branches = tuple(Branch(lbl, srt, build(child, inner)) for lbl, srt, child in node.branches)
        if node.tag is Tag.COMM:
            body = GComm(node.parties[0], node.parties[1], branches)
            return GRec(body)
        body = (LSend if node.tag is Tag.SEND else LRecv)(node.parties[0], branches)
        return LRec(body)

    return _strip(build(h.node_id, ()))


def _uses(t, index: int) -> bool:
    if isinstance(t, (GVar, LVar)):
        return t.index == index
    if isinstance(t, (GRec, LRec)):
        return _uses(t.body, index + 1)
    if isinstance(t, (GEnd, LEnd)):
        return False
    return any(_uses(b.cont, index) for b in t.branches)


def _lower(t, cutoff: int):
    """ Decrement every variable index above `cutoff` """
    if isinstance(t, (GVar, LVar)):
        return type(t)(t.index - 1 if t.index > cutoff else t.index, t.name)
    if isinstance(t, (GRec, LRec)):
        return type(t)(_lower(t.body, cutoff + 1), t.name)
    if isinstance(t, (GEnd, LEnd)):
        return t
    return _rebuild(t, tuple(Branch(b.label, b.sort, _lower(b.cont, cutoff)) for b in t.branches))


def _rebuild(t, branches):
    if isinstance(t, GComm):
        return GComm(t.sender, t.receiver, branches)
    return type(t)(t.peer, branches)


def _strip(t):
    if isinstance(t, (GRec, LRec)):
        body = _strip(t.body)
        if _uses(body, 0):
            return type(t)(body, t.name)
        return _lower(body, 0)
    if isinstance(t, (GVar, LVar, GEnd, LEnd)):
        return t
    return _rebuild(t, tuple(Branch(b.label, b.sort, _strip(b.cont)) for b in t.branches))
