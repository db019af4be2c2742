# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from ..errors import Truncated
from ..fixtures import GAMMA_EX, ONE_SHOT_SESSION, STUCK_SESSION, comm, env, session
from ..model import ModelSetupException, SessionModel, TraceOutcome, describe_step
from ..properties.sessions import fair_schedule, trace_fair, trace_lasso
from ..realizer import synthesize_session
from ..syntax.parser import parse
from ..syntax.terms import participant

import unittest

PING = 'p <| mu X. q!l0(0). X || q <| mu X. p?{ l0(x). X }'


def running_example_model(**kwargs):
    """ Helper function for a model of the sessions synthesized from the running example """
    return SessionModel(synthesize_session(env(GAMMA_EX)), **kwargs)


class TestSessionModel(unittest.TestCase):

    def test_fair_run(self):
        """ Test that the fair policy alternates the choices of p and then lets q reach r """
        model = running_example_model()
        trace = model.run()
        self.assertEqual(trace.labels, [comm('p', 'q', 0), comm('p', 'q', 1), comm('q', 'r', 2)])
        self.assertEqual(trace.outcome, TraceOutcome.TERMINATED)
        self.assertTrue(trace.final.is_inactive())
        self.assertEqual(len(trace.states), 4)

    def test_event_log(self):
        """ Test that finished participants and the outcome are logged """
        model = running_example_model()
        model.run()
        messages = model.event_log.messages
        self.assertCountEqual(messages[:3], ['p finished', 'q finished', 'r finished'])
        self.assertEqual(messages[-1], 'session terminated')
        self.assertIn('<table>', model.event_log._repr_html_())

    def test_stats(self):
        """ Test the per-participant counters and the collected tables """
        model = running_example_model()
        model.run()
        agents = model.participant_agents
        self.assertEqual(agents[participant('p')].stat_sends, 2)
        self.assertEqual(agents[participant('q')].stat_receives, 2)
        self.assertEqual(agents[participant('q')].stat_sends, 1)
        self.assertEqual(agents[participant('r')].stat_waiting, 2)
        trace_df = model.get_trace_df()
        self.assertEqual(len(trace_df), 3)
        self.assertEqual(list(trace_df['Label']), ['(p,q)l0', '(p,q)l1', '(q,r)l2'])
        self.assertEqual(list(trace_df['Sends']), [1, 2, 3])
        self.assertEqual(len(model.get_participant_df()), 9)

    def test_random_policy(self):
        """ Test that the random policy is reproducible from its seed """
        first = running_example_model(policy='random', seed=5, max_steps=20).run()
        second = running_example_model(policy='random', seed=5, max_steps=20).run()
        self.assertEqual(first.labels, second.labels)
        self.assertTrue(all(label.pair == (participant('p'), participant('q')) for label in first.labels[:-1]))

    def test_unknown_policy(self):
        """ Test that an unknown policy is refused """
        with self.assertRaises(ModelSetupException):
            SessionModel(session(ONE_SHOT_SESSION), policy='greedy')

    def test_deadlock(self):
        """ Test that a session with no communication stops deadlocked """
        model = SessionModel(session(STUCK_SESSION))
        trace = model.run()
        self.assertEqual(trace.outcome, TraceOutcome.DEADLOCKED)
        self.assertEqual(len(trace), 0)
        self.assertEqual(model.event_log.messages, ['session deadlocked'])

    def test_describe_step(self):
        """ Test the printable form of a trace step """
        trace = SessionModel(session(ONE_SHOT_SESSION)).run()
        step = describe_step(trace.steps[0])
        self.assertEqual(step['label'], '(p,q)l0')
        self.assertEqual(step['next'], 'p <| 0 || q <| 0')


class TestFairSchedule(unittest.TestCase):

    def test_truncated(self):
        """ Test that an endless session is truncated but fair """
        trace = fair_schedule(parse('session', PING), max_steps=5)
        self.assertEqual(trace.outcome, TraceOutcome.TRUNCATED)
        self.assertEqual(len(trace), 5)
        self.assertTrue(trace_fair(trace))
        lasso = trace_lasso(trace)
        self.assertEqual(len(lasso.cycle), 5)

    def test_strict(self):
        """ Test that a strict schedule raises when the budget runs out """
        with self.assertRaises(Truncated):
            fair_schedule(parse('session', PING), max_steps=5, strict=True)

    def test_stopped(self):
        """ Test that stopped schedules close with a stutter """
        trace = fair_schedule(session(STUCK_SESSION))
        self.assertTrue(trace_lasso(trace).is_stutter)
        self.assertTrue(trace_fair(trace))
        self.assertTrue(trace_fair(fair_schedule(synthesize_session(env(GAMMA_EX)))))
