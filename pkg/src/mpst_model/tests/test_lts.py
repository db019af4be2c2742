# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from ..errors import NoUpperBound, NotEnabled, SortError, StateBudgetExceeded, UnboundVariable
from ..fixtures import (G_EX, GAMMA_END, GAMMA_EX, GAMMA_PRIME, GAMMA_UNSAFE, ONE_SHOT_SESSION, P_P,
                        STUCK_SESSION, comm, env, global_tree, process, session)
from ..limits import PROCESS_CACHE_SIZE
from ..lts.environment import (comm_pairs, env_comms, env_enabled, env_state_graph, env_step, env_transitions,
                               requests)
from ..lts.expressions import eval_expr
from ..lts.global_step import global_enabled, global_step
from ..lts.labels import Recv, Send
from ..lts.session import internal_steps, process_unfoldings, session_enabled, session_step, session_unfold
from ..syntax.parser import parse
from ..syntax.processes import Choice, EVar, Inact, Lit, Neg, Not, PSend, Succ
from ..syntax.terms import Sort, Value, participant

import unittest

NAT_0, NAT_1, INT_1 = Value(Sort.NAT, 0), Value(Sort.NAT, 1), Value(Sort.INT, 1)
TRUE, FALSE = Value(Sort.BOOL, True), Value(Sort.BOOL, False)


def p_q_r():
    """ Helper function for the three participants of the running example """
    return participant('p'), participant('q'), participant('r')


class TestLabels(unittest.TestCase):

    def test_subjects(self):
        """ Test label subjects and printing """
        p, q, _ = p_q_r()
        a = comm('p', 'q', 0)
        self.assertEqual(a.subjects, frozenset([p, q]))
        self.assertEqual(a.pair, (p, q))
        self.assertEqual(str(a), '(p,q)l0')
        self.assertEqual(Send(p, q, 1, Sort.INT).subjects, frozenset([p]))
        self.assertEqual(Recv(q, p, 1, Sort.INT).subjects, frozenset([q]))


class TestEnvironment(unittest.TestCase):

    def test_enabled(self):
        """ Test the labels enabled in the running example """
        p, q, r = p_q_r()
        enabled = env_enabled(env(GAMMA_EX))
        expected = {
            Send(p, q, 0, Sort.INT), Send(p, q, 1, Sort.INT),
            Recv(q, p, 0, Sort.INT), Recv(q, p, 1, Sort.INT),
            Recv(r, q, 2, Sort.INT),
            comm('p', 'q', 0), comm('p', 'q', 1),
        }
        self.assertEqual(enabled, expected)

    def test_comms(self):
        """ Test enabled communications and pairs """
        p, q, r = p_q_r()
        gamma = env(GAMMA_EX)
        self.assertEqual(env_comms(gamma), [comm('p', 'q', 0), comm('p', 'q', 1)])
        self.assertEqual(comm_pairs(gamma), frozenset([(p, q)]))
        self.assertEqual(requests(gamma), frozenset([(p, q), (q, r)]))
        self.assertEqual(env_comms(env(GAMMA_END)), [])

    def test_payload_subsort(self):
        """ Test that an int payload cannot meet a nat receive """
        self.assertEqual(env_comms(env(GAMMA_UNSAFE)), [])
        narrow = env('p : q (+) { l0(nat). end }\nq : p & { l0(int). end }')
        self.assertEqual(env_comms(narrow), [comm('p', 'q', 0)])

    def test_steps(self):
        """ Test the three steps of the running example """
        gamma = env(GAMMA_EX)
        self.assertEqual(env_step(gamma, comm('p', 'q', 0)), gamma)
        self.assertEqual(env_step(gamma, comm('p', 'q', 1)), env(GAMMA_PRIME))
        self.assertEqual(env_step(env(GAMMA_PRIME), comm('q', 'r', 2)), env(GAMMA_END))

    def test_not_enabled(self):
        """ Test stepping with a disabled label """
        with self.assertRaises(NotEnabled):
            env_step(env(GAMMA_EX), comm('q', 'r', 2))
        with self.assertRaises(NotEnabled):
            env_step(env(GAMMA_EX), comm('p', 'q', 5))

    def test_transitions(self):
        """ Test the transitions leaving the initial state """
        gamma = env(GAMMA_EX)
        self.assertEqual(env_transitions(gamma), [(comm('p', 'q', 0), gamma), (comm('p', 'q', 1), env(GAMMA_PRIME))])

    def test_state_graph(self):
        """ Test the reachable state graph of the running example """
        gamma = env(GAMMA_EX)
        graph = env_state_graph(gamma)
        self.assertEqual(len(graph), 3)
        self.assertEqual(graph.edge_count, 3)
        self.assertEqual(graph.states, [gamma, env(GAMMA_PRIME), env(GAMMA_END)])
        self.assertEqual(graph.successors(env(GAMMA_END)), [])
        self.assertEqual(graph.path_to(env(GAMMA_END)),
                         [(gamma, comm('p', 'q', 1)), (env(GAMMA_PRIME), comm('q', 'r', 2))])
        self.assertIn(gamma, graph)

    def test_state_budget(self):
        """ Test that exploration stops at the state budget """
        with self.assertRaises(StateBudgetExceeded):
            env_state_graph(env(GAMMA_EX), max_states=2)


class TestGlobalStep(unittest.TestCase):

    def test_choice(self):
        """ Test the step taking a branch at the root """
        g = global_tree(G_EX)
        self.assertEqual(global_step(g, comm('p', 'q', 0)), g)
        self.assertEqual(global_step(g, comm('p', 'q', 1)), global_tree('q -> r { l2(int). end }'))
        self.assertIsNone(global_step(g, comm('p', 'q', 2)))
        self.assertIsNone(global_step(g, comm('q', 'r', 2)))
        self.assertEqual(global_enabled(g), [comm('p', 'q', 0), comm('p', 'q', 1)])

    def test_context(self):
        """ Test a step under an independent root """
        g = global_tree('p -> q { l0(int). r -> s { l5(int). q -> p { l1(int). end } } }')
        reduct = global_step(g, comm('r', 's', 5))
        self.assertEqual(reduct, global_tree('p -> q { l0(int). q -> p { l1(int). end } }'))

    def test_context_requires_root_parties(self):
        """ Test that the root's parties must remain in every branch """
        g = global_tree('p -> q { l0(int). r -> s { l5(int). end } }')
        self.assertIsNone(global_step(g, comm('r', 's', 5)))

    def test_context_under_loop(self):
        """ Test that a step under a loop unrolls the loop once """
        g = global_tree('rec X. p -> q { l0(int). r -> s { l1(int). X } }')
        reduct = global_step(g, comm('r', 's', 1))
        unrolled = 'p -> q { l0(int). rec X. p -> q { l0(int). r -> s { l1(int). X } } }'
        self.assertEqual(reduct, global_tree(unrolled))

    def test_context_cycle(self):
        """ Test that a cycle of independent nodes steps corecursively """
        g = global_tree('rec X. p -> q { l0(int). X, l1(int). r -> s { l5(int). p -> q { l9(int). end } } }')
        reduct = global_step(g, comm('r', 's', 5))
        self.assertEqual(reduct, global_tree('rec X. p -> q { l0(int). X, l1(int). p -> q { l9(int). end } }'))

    def test_end(self):
        """ Test that end has no steps """
        self.assertIsNone(global_step(global_tree('end'), comm('p', 'q', 0)))
        self.assertEqual(global_enabled(global_tree('end')), [])


class TestExpressions(unittest.TestCase):

    def test_values(self):
        """ Test evaluation of literals and operators """
        self.assertEqual(eval_expr(Lit(NAT_0)), frozenset([NAT_0]))
        self.assertEqual(eval_expr(Succ(Lit(NAT_0))), frozenset([NAT_1]))
        self.assertEqual(eval_expr(Neg(Lit(NAT_1))), frozenset([Value(Sort.INT, -1)]))
        self.assertEqual(eval_expr(Not(Lit(TRUE))), frozenset([FALSE]))
        self.assertEqual(eval_expr(EVar('x'), {'x': NAT_1}), frozenset([NAT_1]))

    def test_choice(self):
        """ Test that a choice yields both values at their common sort """
        self.assertEqual(eval_expr(Choice(Lit(TRUE), Lit(FALSE))), frozenset([TRUE, FALSE]))
        self.assertEqual(eval_expr(Choice(Lit(NAT_1), Lit(Value(Sort.INT, -1)))),
                         frozenset([INT_1, Value(Sort.INT, -1)]))

    def test_errors(self):
        """ Test evaluation errors """
        with self.assertRaises(UnboundVariable):
            eval_expr(EVar('x'))
        with self.assertRaises(SortError):
            eval_expr(Not(Lit(NAT_0)))
        with self.assertRaises(SortError):
            eval_expr(Succ(Lit(TRUE)))
        with self.assertRaises(NoUpperBound):
            eval_expr(Choice(Lit(TRUE), Lit(NAT_0)))


class TestSession(unittest.TestCase):

    def test_unfoldings(self):
        """ Test the internal steps of a recursive process with a coin flip """
        forms, truncated = process_unfoldings(process(P_P))
        self.assertFalse(truncated)
        q = participant('q')
        sends = [f for f in forms if isinstance(f, PSend)]
        self.assertEqual(sorted(s.label for s in sends), [0, 1])
        self.assertTrue(all(s.peer == q for s in sends))

    def test_unfoldings_cache_bounded(self):
        """ Test that unfolding closures are kept in a bounded cache """
        self.assertEqual(process_unfoldings.cache_info().maxsize, PROCESS_CACHE_SIZE)
        p = process(P_P)
        self.assertIs(process_unfoldings(p), process_unfoldings(p))

    def test_stuck_guard(self):
        """ Test that a conditional whose guard is ill-sorted has no internal step and is logged """
        p = process('if not(1) then q!l0(1). 0 else 0')
        with self.assertLogs('mpst_model.lts.session', level='DEBUG') as logs:
            self.assertEqual(internal_steps(p), [])
        self.assertIn('not(1)', logs.output[0])
        self.assertEqual(process_unfoldings(p), ((p,), False))

    def test_session_unfold(self):
        """ Test that a session unfolds to the product of its processes' unfoldings """
        m = session(STUCK_SESSION)
        forms = session_unfold(m)
        self.assertEqual(len(forms), 2)
        self.assertIn(m, forms)
        self.assertFalse(forms.truncated)

    def test_one_shot(self):
        """ Test the single communication of a one-shot session """
        m = session(ONE_SHOT_SESSION)
        enabled = session_enabled(m)
        self.assertEqual([a for a, _ in enabled], [comm('p', 'q', 0)])
        _, after = enabled[0]
        self.assertTrue(after.is_inactive())
        self.assertEqual(session_step(m, comm('p', 'q', 0)), [after])

    def test_value_passing(self):
        """ Test that the received value flows into the continuation """
        m = parse('session', 'p <| q!l0(5). 0 || q <| p?{ l0(x). p!l1(succ(x)). 0 } ')
        (_, after), = session_enabled(m)
        self.assertEqual(eval_expr(after[participant('q')].expr), frozenset([Value(Sort.NAT, 6)]))

    def test_abstract_values(self):
        """ Test that unused received values collapse to the canonical value """
        m = parse('session', 'p <| q!l0(5). 0 || q <| p?{ l0(x). p!l1(x). 0 }')
        (_, after), = session_enabled(m, abstract_values=True)
        self.assertEqual(eval_expr(after[participant('q')].expr), frozenset([NAT_0]))
        guarded = parse('session', 'p <| q!l0(true). 0 || q <| p?{ l0(x). if x then 0 else 0 }')
        (_, after), = session_enabled(guarded, abstract_values=True)
        self.assertEqual(after[participant('q')].cond, Lit(TRUE))

    def test_choice_payload(self):
        """ Test that a non-deterministic payload gives one reduct per value """
        m = parse('session', 'p <| q!l0((1 (+) 2)). 0 || q <| p?{ l0(x). p!l1(x). 0 }')
        self.assertEqual(len(session_enabled(m)), 2)

    def test_stuck(self):
        """ Test that a send without a receiver is not enabled """
        self.assertEqual(session_enabled(session(STUCK_SESSION)), [])
        self.assertTrue(session(STUCK_SESSION)[participant('q')] == Inact())
