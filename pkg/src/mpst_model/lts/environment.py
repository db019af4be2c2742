# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import logging
from collections import deque
from typing import Dict, FrozenSet, List, Optional, Tuple

import networkx as nx

from ..equirec.arena import Tag, unfold_head
from ..errors import NotEnabled, StateBudgetExceeded
from ..limits import DEFAULT_MAX_STATES
from ..projection import TypeEnv
from ..subtyping import subsort
from ..syntax.terms import Participant
from .labels import ActionLabel, Comm, Recv, Send

logger = logging.getLogger(__name__)

Pair = Tuple[Participant, Participant]


def env_single_actions(env: TypeEnv) -> List[ActionLabel]:
    """ Send and receive labels offered by the heads of the entries """
    actions = []
    for p, h in env.items():
        head = unfold_head(h)
        if head.tag is Tag.SEND:
            actions.extend(Send(p, head.peer, lbl, srt) for lbl, (srt, _) in sorted(head.branches.items()))
        elif head.tag is Tag.RECV:
            actions.extend(Recv(p, head.peer, lbl, srt) for lbl, (srt, _) in sorted(head.branches.items()))
    return actions


def env_comms(env: TypeEnv) -> List[Comm]:
    """ Communications enabled in `env`, ordered by sender, receiver and label """
    comms = []
    for p, h in env.items():
        head = unfold_head(h)
        if head.tag is not Tag.SEND or head.peer not in env:
            continue
        peer_head = unfold_head(env[head.peer])
        if peer_head.tag is not Tag.RECV or peer_head.peer != p:
            continue
        for lbl, (srt, _) in sorted(head.branches.items()):
            if lbl in peer_head.branches and subsort(srt, peer_head.branches[lbl][0]):
                comms.append(Comm(p, head.peer, lbl))
    return sorted(comms, key=Comm.sort_key)


def env_enabled(env: TypeEnv) -> FrozenSet[ActionLabel]:
    """Labels enabled in a type environment.

    Args:
        env (TypeEnv): Environment.

    Returns:
        FrozenSet[ActionLabel]: One send or receive per branch of every entry's head, plus every
        communication whose send and receive match with a payload subsort.
    """
    return frozenset(env_single_actions(env)) | frozenset(env_comms(env))


def comm_pairs(env: TypeEnv) -> FrozenSet[Pair]:
    return frozenset(c.pair for c in env_comms(env))


def requests(env: TypeEnv) -> FrozenSet[Pair]:
    """ Pairs (sender, receiver) that some enabled send or receive waits for """
    pending = set()
    for action in env_single_actions(env):
        if isinstance(action, Send):
            pending.add((action.subject, action.peer))
        else:
            pending.add((action.peer, action.subject))
    return frozenset(pending)


def env_step(env: TypeEnv, a: Comm) -> TypeEnv:
    """Fire a communication.

    Args:
        env (TypeEnv): Environment.
        a (Comm): Enabled communication.

    Raises:
        NotEnabled: `a` is not enabled in `env`.

    Returns:
        TypeEnv: Environment with sender and receiver advanced.
    """
    if not isinstance(a, Comm) or a not in env_comms(env):
        raise NotEnabled(a)
    _, sender_next = unfold_head(env[a.sender]).branches[a.label]
    _, receiver_next = unfold_head(env[a.receiver]).branches[a.label]
    return env.replace({a.sender: sender_next, a.receiver: receiver_next})


def env_transitions(env: TypeEnv) -> List[Tuple[Comm, TypeEnv]]:
    return [(a, env_step(env, a)) for a in env_comms(env)]


class StateGraph:
    def __init__(self, initial: TypeEnv):
        """State Graph

        Reachable part of the communication LTS of an environment.

        Args:
            initial (TypeEnv): Initial state.
        """
        self.initial = initial
        self.graph = nx.MultiDiGraph()
        self.graph.add_node(initial)
        self.states: List[TypeEnv] = [initial]
        self._parent: Dict[TypeEnv, Optional[Tuple[TypeEnv, Comm]]] = {initial: None}

    def __len__(self) -> int:
        return len(self.states)

    def __contains__(self, state) -> bool:
        return state in self._parent

    def successors(self, state: TypeEnv) -> List[Tuple[Comm, TypeEnv]]:
        edges = [(label, target) for _, target, label in self.graph.out_edges(state, keys=True)]
        return sorted(edges, key=lambda e: e[0].sort_key())

    def edges(self) -> List[Tuple[TypeEnv, Comm, TypeEnv]]:
        return [(s, label, t) for s in self.states for label, t in self.successors(s)]

    @property
    def edge_count(self) -> int:
        return self.graph.number_of_edges()

    def path_to(self, state: TypeEnv) -> List[Tuple[TypeEnv, Comm]]:
        """ Breadth-first (shortest) path from the initial state, as (state, label) steps """
        path = []
        step = self._parent[state]
        while step is not None:
            path.append(step)
            step = self._parent[step[0]]
        return list(reversed(path))

    def _add(self, source: TypeEnv, label: Comm, target: TypeEnv) -> bool:
        self.graph.add_edge(source, target, key=label)
        if target in self._parent:
            return False
        self._parent[target] = (source, label)
        self.states.append(target)
        return True


def env_state_graph(env: TypeEnv, max_states: int = DEFAULT_MAX_STATES) -> StateGraph:
    """Explore every environment reachable by communications.

    Args:
        env (TypeEnv): Initial environment.
        max_states (int, optional): Budget on distinct states.

    Raises:
        StateBudgetExceeded: More than `max_states` states are reachable.

    Returns:
        StateGraph: States deduplicated by extensional equality, edges labelled by communications.
    """
    graph = StateGraph(env)
    queue = deque([env])
    while queue:
        state = queue.popleft()
        for label, target in env_transitions(state):
            if graph._add(state, label, target):
                if len(graph) > max_states:
                    raise StateBudgetExceeded(max_states)
                queue.append(target)
    logger.debug('state graph: %d states, %d edges', len(graph), graph.edge_count)
    return graph
