# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import logging
import os
import random
from typing import List, Optional

import pandas as pd

from .equirec.arena import Tag, TreeHandle, TreeKind, end_tree, intern, participants, unfold_head
from .equirec.balance import balanced, parties_persist
from .errors import GenerationExhausted, KindMismatch, MpstException, StateBudgetExceeded
from .limits import DEFAULT_GENERATION_ATTEMPTS, DEFAULT_MAX_STATES
from .lts.environment import env_state_graph
from .projection import TypeEnv, gamma_proj, projectable_all
from .realizer import synthesize_session
from .syntax.render import render
from .syntax.terms import (Branch, GComm, GEnd, GRec, GVar, Participant, ParticipantTable, Sort, SynGlobal,
                           default_participants)
from .syntax.validate import validate_type

logger = logging.getLogger(__name__)

ROLE_NAMES = ('p', 'q', 'r', 's', 't', 'u', 'v', 'w')
SORTS = (Sort.NAT, Sort.INT, Sort.BOOL)


class CorpusParams:
    def __init__(self, max_participants: int = 3, max_labels: int = 2, max_depth: int = 3,
                 balanced_only: bool = True):
        """Corpus Parameters

        Args:
            max_participants (int, optional): Participants a protocol may draw from (at least 2).
            max_labels (int, optional): Labels per choice.
            max_depth (int, optional): Communications along the longest path of the protocol body.
            balanced_only (bool, optional): Reject unbalanced protocols.
        """
        if max_participants < 2 or max_labels < 1 or max_depth < 1:
            raise ValueError('corpus parameters must be positive, with at least two participants')
        if max_participants > len(ROLE_NAMES):
            raise ValueError(f'at most {len(ROLE_NAMES)} participants are supported')
        self.max_participants = max_participants
        self.max_labels = max_labels
        self.max_depth = max_depth
        self.balanced_only = balanced_only


class CorpusItem:
    def __init__(self, index: int, syntax: SynGlobal, g: TreeHandle, env: TypeEnv, states: int):
        """Corpus Item

        Args:
            index (int): Position in the corpus.
            syntax (SynGlobal): Generated global type.
            g (TreeHandle): Its tree.
            env (TypeEnv): Environment of its projections.
            states (int): Reachable states of the environment.
        """
        self.index = index
        self.syntax = syntax
        self.g = g
        self.env = env
        self.states = states
        self.session = synthesize_session(env)

    @property
    def name(self) -> str:
        return f'{self.index:04d}'


def random_protocol(rng: random.Random, params: CorpusParams,
                    table: Optional[ParticipantTable] = None) -> SynGlobal:
    """Draw a candidate global type.

    The protocol is a sequence of choices. Each branch of a choice may first exchange one extra
    message between the choosing pair and then continues with the rest of the sequence, so the
    branches only differ for the two participants of the choice. With more than one
    communication of depth the sequence may loop back to its start.

    Args:
        rng (random.Random): Random source.
        params (CorpusParams): Size bounds.
        table (ParticipantTable, optional): Participant names.

    Returns:
        SynGlobal: A candidate; it still has to pass the corpus checks.
    """
    table = table if table is not None else default_participants()
    roles = [table.get(name) for name in ROLE_NAMES[:rng.randint(2, params.max_participants)]]
    blocks = rng.randint(1, params.max_depth)
    spare = params.max_depth - blocks
    recursive = params.max_depth > 1 and rng.random() < 0.5
    cont: SynGlobal = GVar(0) if recursive else GEnd()
    for _ in range(blocks):
        sender, receiver = rng.sample(roles, 2)
        prefixed = spare > 0 and rng.random() < 0.5
        if prefixed:
            spare -= 1
        branches = []
        for label in range(rng.randint(1, params.max_labels)):
            rest = cont
            if prefixed and rng.random() < 0.5:
                rest = _exchange(rng, sender, receiver, label, cont)
            branches.append(Branch(label, rng.choice(SORTS), rest))
        cont = GComm(sender, receiver, tuple(branches))
    return GRec(cont) if recursive else cont


def _exchange(rng: random.Random, a: Participant, b: Participant, label: int, cont: SynGlobal) -> GComm:
    sender, receiver = (a, b) if rng.random() < 0.5 else (b, a)
    return GComm(sender, receiver, (Branch(label, rng.choice(SORTS), cont),))


def accept(g: TreeHandle, params: CorpusParams, max_states: int = DEFAULT_MAX_STATES) -> Optional[int]:
    """ Size of the projected environment's state graph if `g` passes the corpus checks, else None """
    if params.balanced_only and not balanced(g):
        return None
    if not parties_persist(g):
        return None
    if not projectable_all(g):
        return None
    try:
        return len(env_state_graph(gamma_proj(g), max_states))
    except StateBudgetExceeded:
        return None


def gen_corpus(seed: int, count: int, params: Optional[CorpusParams] = None,
               attempts: int = DEFAULT_GENERATION_ATTEMPTS, max_states: int = DEFAULT_MAX_STATES,
               table: Optional[ParticipantTable] = None) -> List[CorpusItem]:
    """Generate protocols by rejection sampling.

    Args:
        seed (int): Random seed; the corpus is a function of the seed and the parameters.
        count (int): Number of protocols.
        params (CorpusParams, optional): Size bounds.
        attempts (int, optional): Candidates drawn per protocol before giving up.
        max_states (int, optional): Bound on the projected environment's state graph.
        table (ParticipantTable, optional): Participant names.

    Raises:
        GenerationExhausted: No acceptable candidate within `attempts` draws.

    Returns:
        List[CorpusItem]: Guarded, projectable (and, unless disabled, balanced) protocols with
        their projected environments and synthesized sessions.
    """
    params = params or CorpusParams()
    rng = random.Random(seed)
    items = []
    for index in range(count):
        for _ in range(attempts):
            syntax = random_protocol(rng, params, table)
            try:
                validate_type(syntax)
            except MpstException:
                continue
            g = intern(syntax)
            states = accept(g, params, max_states)
            if states is not None:
                items.append(CorpusItem(index, syntax, g, gamma_proj(g), states))
                break
        else:
            raise GenerationExhausted(attempts)
    logger.info('generated %d protocols from seed %d', count, seed)
    return items


def perturb(t: TreeHandle, rng: random.Random, rate: float = 0.5) -> TreeHandle:
    """Draw a random subtype of a local type.

    Sends may lose labels (keeping at least one) and narrow int payloads to nat; receives may
    gain a label continuing with end and widen nat payloads to int.

    Args:
        t (TreeHandle): Local type.
        rng (random.Random): Random source.
        rate (float, optional): Probability of each individual change.

    Returns:
        TreeHandle: A subtype of `t`, in the same arena.
    """
    if t.kind is not TreeKind.LOCAL:
        raise KindMismatch('only local trees have subtypes')
    arena = t.arena
    end = end_tree(TreeKind.LOCAL, arena)
    specs = {}
    for node_id in arena.reachable(t):
        head = unfold_head(arena.handle(node_id))
        branches = [(lbl, srt, child.node_id) for lbl, (srt, child) in sorted(head.branches.items())]
        if head.tag is Tag.SEND:
            kept = [b for b in branches if rng.random() >= rate]
            branches = kept or [rng.choice(branches)]
            branches = [(lbl, Sort.NAT if srt is Sort.INT and rng.random() < rate else srt, ref)
                        for lbl, srt, ref in branches]
        elif head.tag is Tag.RECV:
            branches = [(lbl, Sort.INT if srt is Sort.NAT and rng.random() < rate else srt, ref)
                        for lbl, srt, ref in branches]
            if rng.random() < rate:
                branches.append((max(head.labels) + 1, rng.choice(SORTS), end))
        specs[node_id] = (TreeKind.LOCAL, head.tag, head.parties, tuple(branches))
    return arena.intern_graph(specs)[t.node_id]


def perturb_env(env: TypeEnv, rng: random.Random, rate: float = 0.5) -> TypeEnv:
    return TypeEnv({p: perturb(t, rng, rate) for p, t in env.items()})


def corpus_summary(items: List[CorpusItem]) -> pd.DataFrame:
    """ One row per protocol: participants, choices, recursion and environment size """
    rows = []
    for item in items:
        comms = [unfold_head(item.g.arena.handle(n)) for n in item.g.arena.reachable(item.g)]
        rows.append({
            'name': item.name,
            'participants': len(participants(item.g)),
            'choices': sum(1 for h in comms if h.tag is Tag.COMM),
            'max_labels': max((len(h.labels) for h in comms), default=0),
            'recursive': isinstance(item.syntax, GRec),
            'states': item.states,
        })
    return pd.DataFrame(rows, columns=['name', 'participants', 'choices', 'max_labels', 'recursive', 'states'])


def write_corpus(items: List[CorpusItem], directory: str) -> pd.DataFrame:
    """Write each protocol, its projected environment and its synthesized session.

    Files are named after the item index: NNNN.gt, NNNN.env and NNNN.sn, plus summary.csv.

    Returns:
        pd.DataFrame: The summary table.
    """
    os.makedirs(directory, exist_ok=True)
    for item in items:
        for suffix, value in (('gt', item.syntax), ('env', item.env), ('sn', item.session)):
            with open(os.path.join(directory, f'{item.name}.{suffix}'), 'w', encoding='utf-8') as out:
                out.write(render(value) + '\n')
    summary = corpus_summary(items)
    summary.to_csv(os.path.join(directory, 'summary.csv'), index=False)
    return summary
