# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import logging
from typing import Dict, List, Mapping, Optional, Tuple

from .equirec.arena import Tag, TreeArena, TreeHandle, TreeKind, end_tree, intern, participants, unfold_head
from .equirec.balance import balanced
from .errors import KindMismatch, NotBalanced, NotProjectable, PreconditionViolation
from .subtyping import subtype_witness
from .syntax.processes import EnvForm, ParticipantMap
from .syntax.terms import Participant

logger = logging.getLogger(__name__)


class TypeEnv(ParticipantMap[TreeHandle]):
    """Type environment: finite map from participants to local trees.

    Equality is extensional, so environments can be used directly as LTS states.
    """

    def __init__(self, entries: Mapping[Participant, TreeHandle] = None):
        super().__init__(entries)
        for p, h in self._entries:
            if h.kind is not TreeKind.LOCAL:
                raise KindMismatch(f'entry for {p} is not a local tree')

    @classmethod
    def from_form(cls, form: EnvForm, arena: Optional[TreeArena] = None) -> 'TypeEnv':
        return cls({p: intern(t, arena) for p, t in form.items()})

    def sort_key(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((p.id, h.node_id) for p, h in self._entries)


def project(g: TreeHandle, r: Participant) -> Optional[TreeHandle]:
    """Plain-merge projection of a global tree onto a participant.

    Nodes without `r` among their participants project to end. Nodes where `r` sends or receives
    become send/receive nodes. Every other node must have bisimilar projections on all
    branches; chains of such nodes are solved by choosing one determined target per chain and
    checking afterwards that every target of the chain interned to the same tree.

    Args:
        g (TreeHandle): Global tree.
        r (Participant): Participant to project onto.

    Raises:
        KindMismatch: `g` is not a global tree.

    Returns:
        Optional[TreeHandle]: The local tree, or None when the branches cannot be merged.
    """
    if g.kind is not TreeKind.GLOBAL:
        raise KindMismatch('projection is defined on global trees')
    memo = g.arena.projections
    key = (g.node_id, r)
    if key not in memo:
        result = _project(g, r)
        memo[key] = None if result is None else result.node_id
    node_id = memo[key]
    return None if node_id is None else g.arena.handle(node_id)


def _project(g: TreeHandle, r: Participant) -> Optional[TreeHandle]:
    arena = g.arena
    end = end_tree(TreeKind.LOCAL, arena)

    def ref(h: TreeHandle):
        if r not in participants(h):
            return end
        if unfold_head(h).involves(r):
            return ('node', h.node_id)
        return ('merge', h.node_id)

    root = ref(g)
    if root == end:
        return end

    involved: Dict[tuple, Tuple[Tag, Participant, List]] = {}
    merges: Dict[tuple, List] = {}
    pending = [root]
    seen = {root}
    while pending:
        item = pending.pop()
        head = unfold_head(arena.handle(item[1]))
        children = [(lbl, srt, ref(child)) for lbl, (srt, child) in sorted(head.branches.items())]
        if item[0] == 'node':
            if head.sender == r:
                involved[item] = (Tag.SEND, head.receiver, children)
            else:
                involved[item] = (Tag.RECV, head.sender, children)
        else:
            merges[item] = [c for _, _, c in children]
        for _, _, c in children:
            if isinstance(c, tuple) and c not in seen:
                seen.add(c)
                pending.append(c)

    targets = {m: _targets(m, merges) for m in merges}
    representative = {m: min(ts, key=_order) for m, ts in targets.items()}

    def resolve(c):
        return representative[c] if c in merges else c

    specs = {item: (TreeKind.LOCAL, tag, (peer,), tuple((lbl, srt, resolve(c)) for lbl, srt, c in children))
             for item, (tag, peer, children) in involved.items()}
    handles = arena.intern_graph(specs) if specs else {}

    def handle_of(c) -> TreeHandle:
        return c if isinstance(c, TreeHandle) else handles[c]

    for m, ts in targets.items():
        trees = {handle_of(t) for t in ts}
        if len(trees) > 1:
            logger.debug('projection onto %s: branches of node %d do not merge', r, m[1])
            return None
    return handle_of(resolve(root))


def _targets(start: tuple, merges: Mapping[tuple, List]) -> List:
    """ Determined projections reachable from a merge node through other merge nodes """
    found = []
    seen = {start}
    stack = [start]
    while stack:
        for c in merges[stack.pop()]:
            if c in merges:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
            elif c not in found:
                found.append(c)
    return found


def _order(c):
    return (0, 0) if isinstance(c, TreeHandle) else (1, c[1])


def projectable_all(g: TreeHandle) -> bool:
    return all(project(g, r) is not None for r in sorted(participants(g)))


def gamma_proj(g: TreeHandle) -> TypeEnv:
    """Environment of all projections of `g`.

    Raises:
        NotProjectable: Some participant has no projection.
    """
    entries = {}
    for r in sorted(participants(g)):
        t = project(g, r)
        if t is None:
            raise NotProjectable(r)
        entries[r] = t
    return TypeEnv(entries)


class AssociationEntry:
    def __init__(self, participant: Participant, entry: Optional[TreeHandle], projection: Optional[TreeHandle],
                 holds: bool, witness: Optional[Tuple[TreeHandle, TreeHandle]] = None, reason: str = ''):
        """Association Entry

        Args:
            participant (Participant): Participant checked.
            entry (TreeHandle, optional): Its environment entry.
            projection (TreeHandle, optional): Its projection (None for non-participants).
            holds (bool): Whether this participant satisfies association.
            witness (Tuple[TreeHandle, TreeHandle], optional): Failing subtyping pair.
            reason (str, optional): Description of the failure.
        """
        self.participant = participant
        self.entry = entry
        self.projection = projection
        self.holds = holds
        self.witness = witness
        self.reason = reason


class AssociationResult:
    def __init__(self, entries: List[AssociationEntry]):
        self.entries = entries

    @property
    def holds(self) -> bool:
        return all(e.holds for e in self.entries)

    def __bool__(self):
        return self.holds

    def failures(self) -> List[AssociationEntry]:
        return [e for e in self.entries if not e.holds]


def check_association(env: TypeEnv, g: TreeHandle, check_balance: bool = True) -> AssociationResult:
    """Check association of an environment with a global tree, per participant.

    Args:
        env (TypeEnv): Environment.
        g (TreeHandle): Global tree.
        check_balance (bool, optional): Require `g` to be balanced. Defaults to True.

    Raises:
        PreconditionViolation: `g` is unbalanced (when checked) or not projectable.

    Returns:
        AssociationResult: Outcome for every participant of `g` and every entry of `env`.
    """
    if check_balance and not balanced(g):
        raise PreconditionViolation(NotBalanced('global type is not balanced'))
    results = []
    roles = participants(g)
    for r in sorted(roles):
        t = project(g, r)
        if t is None:
            raise PreconditionViolation(NotProjectable(r))
        if r not in env:
            results.append(AssociationEntry(r, None, t, False, reason='missing from environment'))
            continue
        witness = subtype_witness(env[r], t)
        results.append(AssociationEntry(r, env[r], t, witness is None, witness,
                                        '' if witness is None else 'entry is not a subtype of the projection'))
    for p, h in env.items():
        if p not in roles:
            ok = h.is_end
            results.append(AssociationEntry(p, h, None, ok, reason='' if ok else 'non-participant entry is not end'))
    results.sort(key=lambda e: e.participant.id)
    return AssociationResult(results)


def associated(env: TypeEnv, g: TreeHandle, check_balance: bool = True) -> bool:
    """ Whether `env` is associated with `g`; see `check_association` """
    return check_association(env, g, check_balance).holds


__all__ = ['TypeEnv', 'project', 'projectable_all', 'gamma_proj', 'check_association', 'associated']
