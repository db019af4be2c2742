# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import logging
from enum import Enum
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

import mesa
import pandas as pd

from .limits import DEFAULT_SCHEDULE_STEPS
from .lts.labels import Comm
from .lts.session import process_unfoldings, session_enabled, session_unfold
from .syntax.processes import Inact, PRecv, PSend, SessionForm
from .syntax.render import render
from .syntax.terms import Participant

logger = logging.getLogger(__name__)

POLICIES = ('fair', 'random')


class Stat:
    def __init__(self, name: str, title: Optional[str] = None, aggregator: Optional[Callable] = None):
        """Stat

        Args:
            name (str): Name of the agent attribute.
            title (str, optional): Column title.
            aggregator (Callable, optional): Function to aggregate agent values. Default is sum().
        """
        self.name = name
        self.title = title or name
        self.aggregator = aggregator or sum

    def model_reporter(self, model: 'SessionModel'):
        """ Return the value of the stat for the model. """
        return self.aggregator(getattr(agent, self.name) for agent in model.schedule.agents)


class Event:
    def __init__(self, message: str):
        """Event

        Args:
            message (str): Event description.
        """
        self.message = message
        self.step = 0

    def _repr_html_(self):
        return f"<tr><td>{self.step}</td><td>{self.message}</td></tr>\n"


class EventLog:
    def __init__(self, model: 'SessionModel'):
        """Event Log

        Args:
            model (SessionModel): SessionModel.
        """
        self.model = model
        self.list: List[Event] = []

    def _repr_html_(self):
        table = "<table>"
        table += "<tr><th>Step:</th><th>Event:</th></tr>\n"
        table += "".join(x._repr_html_() for x in self.list)
        table += "</table>"
        return table

    def add(self, event: Event):
        event.step = self.model.step_count
        self.list.append(event)

    @property
    def messages(self) -> List[str]:
        return [x.message for x in self.list]


class TraceOutcome(Enum):
    TERMINATED = 'terminated'
    DEADLOCKED = 'deadlocked'
    TRUNCATED = 'truncated'


class TraceStep(NamedTuple):
    state: SessionForm
    label: Comm
    target: SessionForm


class ExecutionTrace:
    def __init__(self, initial: SessionForm, steps: List[TraceStep], outcome: TraceOutcome):
        """Execution Trace

        Args:
            initial (SessionForm): Session the schedule started from.
            steps (List[TraceStep]): Fired communications in order.
            outcome (TraceOutcome): How the schedule ended.
        """
        self.initial = initial
        self.steps = steps
        self.outcome = outcome

    @property
    def final(self) -> SessionForm:
        return self.steps[-1].target if self.steps else self.initial

    @property
    def labels(self) -> List[Comm]:
        return [s.label for s in self.steps]

    @property
    def states(self) -> List[SessionForm]:
        return [self.initial] + [s.target for s in self.steps]

    def __len__(self) -> int:
        return len(self.steps)


def is_pending(model_form: SessionForm, p: Participant) -> bool:
    """ Whether `p` waits on a send or receive in some unfolding of its process """
    unfolded, _ = process_unfoldings(model_form[p])
    return any(isinstance(q, (PSend, PRecv)) for q in unfolded)


class SessionModel(mesa.Model):

    STATS = [
        Stat('stat_sends',    'Sends'),     # Communications sent by the participant
        Stat('stat_receives', 'Receives'),  # Communications received by the participant
        Stat('stat_waiting',  'Waiting'),   # Steps spent pending while other pairs communicated
    ]

    def __init__(self, session: SessionForm, policy: str = 'fair', max_steps: int = DEFAULT_SCHEDULE_STEPS,
                 abstract_values: bool = False, **kwargs):
        """Session Model

        Runs a session one communication per step. The `fair` policy fires the enabled pair that
        has waited longest and alternates the branches a pair can take; the `random` policy picks
        uniformly with the model RNG (seed it with the `seed` keyword).

        Args:
            session (SessionForm): Initial session.
            policy (str, optional): 'fair' or 'random'. Defaults to 'fair'.
            max_steps (int, optional): Number of communications before the run is truncated.
            abstract_values (bool, optional): Abstract received values as in session exploration.
        """
        super().__init__()
        if policy not in POLICIES:
            raise ModelSetupException(f'unknown scheduling policy {policy!r}')
        self.initial = session
        self.form = session
        self.policy = policy
        self.max_steps = max_steps
        self.abstract_values = abstract_values
        self.step_count = 0
        self.firing: Optional[Comm] = None
        self.next_form: Optional[SessionForm] = None
        self.outcome: Optional[TraceOutcome] = None
        self.trace: List[TraceStep] = []
        self.event_log = EventLog(self)
        self._last_fired: Dict[Tuple[Participant, Participant], int] = {}
        self._branch_turn: Dict[Tuple[Participant, Participant], int] = {}
        self.schedule = mesa.time.StagedActivation(self, stage_list=["pre_step", "step", "post_step"])
        self.datacollector = mesa.DataCollector(
            model_reporters={
                **{"Step": "step_count", "Label": lambda model: str(model.firing)},
                **{x.title: lambda model, x=x: x.model_reporter(model) for x in self.STATS},
            },
            agent_reporters={
                **{"Participant": lambda agent: str(agent.participant)},
                **{x.title: x.name for x in self.STATS},
            }
        )
        self.participant_agents = {p: ParticipantAgent(self, p) for p in session.participants}

    def _choose(self, enabled: List[Tuple[Comm, SessionForm]]) -> Tuple[Comm, SessionForm]:
        if self.policy == 'random':
            return self.random.choice(enabled)
        by_pair: Dict[Tuple[Participant, Participant], List[Tuple[Comm, SessionForm]]] = {}
        for label, target in enabled:
            by_pair.setdefault(label.pair, []).append((label, target))
        pair = min(by_pair, key=lambda pr: (self._last_fired.get(pr, -1), pr))
        turn = self._branch_turn.get(pair, 0)
        self._branch_turn[pair] = turn + 1
        choices = by_pair[pair]
        return choices[turn % len(choices)]

    def _finish(self, outcome: TraceOutcome):
        self.outcome = outcome
        self.running = False
        self.event_log.add(Event(f'session {outcome.value}'))
        logger.debug('schedule ended after %d steps: %s', self.step_count, outcome.value)

    def _stopped(self) -> TraceOutcome:
        terminated = any(form.is_inactive() for form in session_unfold(self.form))
        return TraceOutcome.TERMINATED if terminated else TraceOutcome.DEADLOCKED

    def step(self):
        if not self.running:
            return
        enabled = session_enabled(self.form, self.abstract_values)
        if not enabled:
            self._finish(self._stopped())
            return
        self.firing, self.next_form = self._choose(enabled)
        self.schedule.step()
        self.trace.append(TraceStep(self.form, self.firing, self.next_form))
        self._last_fired[self.firing.pair] = self.step_count
        self.form = self.next_form
        self.step_count += 1
        self.datacollector.collect(self)

    def run(self) -> ExecutionTrace:
        """ Run the schedule until the session stops or the step budget runs out """
        while self.running and self.step_count < self.max_steps:
            self.step()
        if self.running:
            if session_enabled(self.form, self.abstract_values):
                self.event_log.add(Event(f"schedule truncated after {self.max_steps} steps"))
                self.outcome = TraceOutcome.TRUNCATED
                self.running = False
            else:
                self._finish(self._stopped())
        return self.get_trace()

    def get_trace(self) -> ExecutionTrace:
        return ExecutionTrace(self.initial, list(self.trace), self.outcome)

    def get_trace_df(self) -> pd.DataFrame:
        """ One row per fired communication, with the cumulative participant counters """
        return self.datacollector.get_model_vars_dataframe()

    def get_participant_df(self) -> pd.DataFrame:
        return self.datacollector.get_agent_vars_dataframe()


class ParticipantAgent(mesa.Agent):
    def __init__(self, model: SessionModel, participant: Participant):
        """ParticipantAgent

        Args:
            model (SessionModel): SessionModel.
            participant (Participant): Role whose process the agent follows.
        """
        super().__init__(id(self), model)

        # Register the agent with the model
        self.model = model
        self.model.schedule.add(self)
        self.participant = participant
        self.pending = False
        self.finished = isinstance(model.form[participant], Inact)

        # Initialize the stats
        for stat in SessionModel.STATS:
            setattr(self, stat.name, 0)

    @property
    def involved(self) -> bool:
        return self.model.firing is not None and self.participant in self.model.firing.subjects

    def pre_step(self):
        """ Pre-step phase. Record whether the participant is waiting to communicate. """
        self.pending = is_pending(self.model.form, self.participant)

    def step(self):
        """ Step phase. Count the communication the participant takes part in. """
        firing = self.model.firing
        if firing.sender == self.participant:
            self.stat_sends += 1
        elif firing.receiver == self.participant:
            self.stat_receives += 1
        elif self.pending:
            self.stat_waiting += 1

    def post_step(self):
        """ Post-step phase. Report participants whose process has completed. """
        if self.involved and not self.finished and isinstance(self.model.next_form[self.participant], Inact):
            self.finished = True
            self.model.event_log.add(Event(f'{self.participant} finished'))


class ModelSetupException(Exception):
    """Exception raised when there is an error setting up a session model."""
    pass


def describe_step(step: TraceStep) -> Dict[str, str]:
    return {'state': render(step.state), 'label': str(step.label), 'next': render(step.target)}

