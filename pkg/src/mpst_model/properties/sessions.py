# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import logging
from collections import deque
from enum import Enum
from typing import Dict, FrozenSet, NamedTuple, Optional, Set

import networkx as nx

from ..errors import Truncated
from ..limits import DEFAULT_SCHEDULE_STEPS, DEFAULT_SESSION_DEPTH
from ..lts.session import session_enabled, session_unfold
from ..model import ExecutionTrace, SessionModel, TraceOutcome
from ..syntax.processes import PRecv, PSend, SessionForm
from ..syntax.render import render
from ..syntax.terms import Participant
from .lasso import Lasso, lasso_fair
from .verdict import Verdict

logger = logging.getLogger(__name__)


class SessionStatus(Enum):
    TERMINATED = 'terminated'
    CAN_STEP = 'can-step'
    DEADLOCKED = 'deadlocked'


class DeadlockStatus(NamedTuple):
    status: SessionStatus
    terminated_reachable: bool


def deadlock_status(m: SessionForm) -> DeadlockStatus:
    """Classify a session as terminated, able to communicate, or deadlocked.

    When a session can both communicate and unfold to an inactive form, CAN_STEP is reported with
    `terminated_reachable` set.
    """
    terminated = any(form.is_inactive() for form in session_unfold(m))
    if session_enabled(m):
        return DeadlockStatus(SessionStatus.CAN_STEP, terminated)
    if terminated:
        return DeadlockStatus(SessionStatus.TERMINATED, True)
    return DeadlockStatus(SessionStatus.DEADLOCKED, False)


def session_pairs(m: SessionForm) -> FrozenSet:
    return frozenset(label.pair for label, _ in session_enabled(m))


class SessionGraph:
    def __init__(self, initial: SessionForm, depth: int):
        """Session Graph

        Sessions reachable by communications within `depth` steps, with values abstracted, plus
        every unfolding of those sessions. Edges carry the communication label.

        Args:
            initial (SessionForm): Initial session.
            depth (int): Bound on the number of communications.
        """
        self.initial = initial
        self.depth = depth
        self.graph = nx.DiGraph()
        self.frontier: Set[SessionForm] = set()
        self.forms: Set[SessionForm] = set()
        self._explore()

    def _explore(self):
        distance = {self.initial: 0}
        queue = deque([self.initial])
        self.graph.add_node(self.initial)
        while queue:
            form = queue.popleft()
            enabled = session_enabled(form, abstract_values=True)
            if distance[form] >= self.depth:
                if enabled:
                    self.frontier.add(form)
                continue
            for label, target in enabled:
                self.graph.add_edge(form, target, label=label)
                if target not in distance:
                    distance[target] = distance[form] + 1
                    queue.append(target)
        explored = list(distance)
        for form in explored:
            for unfolded in session_unfold(form):
                self.forms.add(unfolded)
                if unfolded in distance:
                    continue
                self.graph.add_node(unfolded)
                for label, target in session_enabled(unfolded, abstract_values=True):
                    self.graph.add_edge(unfolded, target, label=label)
                    if target not in distance:
                        self.frontier.add(target)

    @property
    def truncated(self) -> bool:
        return bool(self.frontier)

    def actors(self) -> Dict[SessionForm, FrozenSet[Participant]]:
        """ Participants of some communication reachable from each node """
        condensed = nx.condensation(self.graph)
        direct = {}
        for c, data in condensed.nodes(data=True):
            acting = set()
            for form in data['members']:
                for _, _, label in self.graph.out_edges(form, data='label'):
                    acting |= label.subjects
            direct[c] = acting
        reach = {}
        for c in reversed(list(nx.topological_sort(condensed))):
            acting = set(direct[c])
            for succ in condensed.successors(c):
                acting |= reach[succ]
            reach[c] = frozenset(acting)
        mapping = condensed.graph['mapping']
        return {form: reach[mapping[form]] for form in self.graph.nodes}

    def reaches_frontier(self) -> Set[SessionForm]:
        result = set()
        for form in self.frontier:
            if form in self.graph:
                result |= nx.ancestors(self.graph, form) | {form}
        return result


def session_live_bounded(m: SessionForm, depth: int = DEFAULT_SESSION_DEPTH) -> Verdict:
    """Check session liveness over the sessions reachable within `depth` communications.

    Every participant waiting on a send or a receive, in every reachable session after
    unfolding, must be able to take part in a later communication. The obligation is checked on
    the unfolded form itself, so a session whose only unfolding commits to a send nobody
    receives is not live even though it cannot reduce.

    Args:
        m (SessionForm): Session.
        depth (int, optional): Bound on the number of communications explored.

    Raises:
        Truncated: An obligation is open in the explored part but might be met beyond the bound.

    Returns:
        Verdict: On failure the counterexample is (session, participant).
    """
    explored = SessionGraph(m, depth)
    actors = explored.actors()
    censored = explored.reaches_frontier()
    stats = {'states': explored.graph.number_of_nodes(), 'edges': explored.graph.number_of_edges(),
             'truncated': explored.truncated}
    for form in sorted(explored.forms, key=render):
        for p, proc in form.items():
            if not isinstance(proc, (PSend, PRecv)) or p in actors[form]:
                continue
            if form in censored:
                raise Truncated(depth)
            logger.debug('participant %s can never complete its action', p)
            return Verdict(False, counterexample=(form, p), stats=stats,
                           reason=f'{p} waits on an action that can never complete')
    return Verdict(True, stats=stats)


def fair_schedule(m: SessionForm, max_steps: int = DEFAULT_SCHEDULE_STEPS, policy: str = 'fair',
                  seed: Optional[int] = None, strict: bool = False) -> ExecutionTrace:
    """Run a session under a fair scheduler.

    Args:
        m (SessionForm): Session.
        max_steps (int, optional): Step budget.
        policy (str, optional): 'fair' or 'random'.
        seed (int, optional): Seed of the random policy.
        strict (bool, optional): Raise instead of returning a truncated trace.

    Raises:
        Truncated: `strict` is set and the budget ran out.

    Returns:
        ExecutionTrace: The fired communications and the outcome.
    """
    model = SessionModel(m, policy=policy, max_steps=max_steps, seed=seed)
    trace = model.run()
    if strict and trace.outcome is TraceOutcome.TRUNCATED:
        raise Truncated(max_steps, partial=trace)
    return trace


def trace_lasso(trace: ExecutionTrace) -> Optional[Lasso]:
    """Fold a trace into a lasso.

    Stopped traces become a stutter at the final session; a truncated trace closes at the first
    earlier occurrence of its final session, or gives None when the final session is new.
    """
    positions = [(s.state, s.label) for s in trace.steps]
    if trace.outcome is not TraceOutcome.TRUNCATED:
        return Lasso.stutter(positions, trace.final)
    states = [s.state for s in trace.steps]
    if trace.final not in states:
        return None
    start = states.index(trace.final)
    return Lasso(positions[:start], positions[start:])


def trace_fair(trace: ExecutionTrace) -> bool:
    lasso = trace_lasso(trace)
    return lasso is not None and lasso_fair(lasso, enabled_pairs=session_pairs)
