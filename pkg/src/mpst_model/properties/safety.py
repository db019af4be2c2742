# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import logging
from typing import List, Tuple

from ..limits import BRUTE_FORCE_LASSO_LENGTH, DEFAULT_MAX_STATES
from ..lts.environment import env_comms, env_single_actions, env_state_graph, env_transitions
from ..lts.labels import Recv, Send
from ..projection import TypeEnv
from .verdict import Verdict

logger = logging.getLogger(__name__)


def safety_violations(env: TypeEnv, same_label: bool = False) -> List[Tuple[Send, Recv]]:
    """Send/receive pairs that face each other without a matching communication.

    Args:
        env (TypeEnv): Environment.
        same_label (bool, optional): Only confront sends with receives offering the same label.
            By default any receive from the sender counts.

    Returns:
        List[Tuple[Send, Recv]]: Offending pairs, in environment order.
    """
    actions = env_single_actions(env)
    comms = set(env_comms(env))
    receives = [a for a in actions if isinstance(a, Recv)]
    violations = []
    for send in (a for a in actions if isinstance(a, Send)):
        for recv in receives:
            if recv.subject != send.peer or recv.peer != send.subject:
                continue
            if same_label and recv.label != send.label:
                continue
            if not any(c.sender == send.subject and c.receiver == send.peer and c.label == send.label for c in comms):
                violations.append((send, recv))
                break
    return violations


def weak_safety_at(env: TypeEnv, same_label: bool = False) -> bool:
    """ Whenever a send meets a receive from its peer, the communication of the sent label is enabled """
    return not safety_violations(env, same_label)


def safe(env: TypeEnv, max_states: int = DEFAULT_MAX_STATES, same_label: bool = False) -> Verdict:
    """Check that every reachable environment is weakly safe.

    Safety is the largest set of environments closed under communication and satisfying the
    weak safety clause; on a finite state graph this is the reachable set itself whenever every
    state passes the clause.

    Args:
        env (TypeEnv): Environment.
        max_states (int, optional): Exploration budget.
        same_label (bool, optional): See `safety_violations`.

    Raises:
        StateBudgetExceeded: The reachable state graph exceeds `max_states`.

    Returns:
        Verdict: On failure the counterexample is the first offending state in BFS order and the
        path leads to it.
    """
    graph = env_state_graph(env, max_states)
    stats = {'states': len(graph), 'edges': graph.edge_count}
    for state in graph.states:
        violations = safety_violations(state, same_label)
        if violations:
            send, recv = violations[0]
            logger.debug('unsafe state reached after %d steps', len(graph.path_to(state)))
            return Verdict(False, counterexample=state, stats=stats, path=graph.path_to(state),
                           reason=f'{send} meets {recv} without a matching communication')
    return Verdict(True, stats=stats)


def brute_force_safe(env: TypeEnv, length: int = BRUTE_FORCE_LASSO_LENGTH, same_label: bool = False) -> bool:
    """ Weak safety of every environment reachable within `length` communications, by path enumeration """
    stack = [(env, 0)]
    while stack:
        state, depth = stack.pop()
        if not weak_safety_at(state, same_label):
            return False
        if depth < length:
            stack.extend((target, depth + 1) for _, target in env_transitions(state))
    return True
