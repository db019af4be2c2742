# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from ..equirec.arena import Tag, TreeArena, TreeKind
from ..errors import KindMismatch, NoUpperBound, SortError, UnboundVariable
from ..fixtures import G_EX, G_TYPED, GAMMA_END, GAMMA_EX, P_P, T_P, T_Q, T_R, env, global_tree, local_tree, process
from ..projection import gamma_proj
from ..realizer import synthesize_process, synthesize_session
from ..syntax.parser import parse
from ..syntax.processes import Choice, EVar, Inact, Lit, Neg, Not, PIte, PRec, PSend, PVar, Succ
from ..syntax.terms import Sort, Value, participant
from ..typecheck import TypingCtx, check_process, check_session, sort_of_expr

import unittest

NAT_1, TRUE = Lit(Value(Sort.NAT, 1)), Lit(Value(Sort.BOOL, True))

# (process, local type, rule that rejects it or None)
check_table = [
    (P_P, T_P, None),
    ('q!l1(-3). 0', T_P, None),
    ('mu X. q!l0(1). X', T_P, None),
    ('mu X. p?{ l0(x). X, l1(x). r!l2(x). 0 }', T_Q, None),
    ('q?{ l2(x). 0 }', T_R, None),
    ('q?{ l2(x). 0, l3(y). 0 }', T_R, None),
    ('0', 'end', None),
    ('q!l2(1). 0', T_P, 't-label'),
    ('q?{ l3(x). 0 }', T_R, 't-label'),
    ('q!l0(true). 0', T_P, 't-out'),
    ('q?{ l2(x). p!l0(x). 0 }', 'q & { l2(int). p (+) { l0(nat). end } }', 't-out'),
    ('if 1 then 0 else 0', 'end', 't-out'),
    ('r!l0(1). 0', T_P, 't-head'),
    ('0', T_P, 't-head'),
    ('q?{ l2(x). 0 }', 'q (+) { l2(int). end }', 't-head'),
    ('q!l1(1). q!l0(1). 0', T_P, 't-end'),
]


class TestSorts(unittest.TestCase):

    def test_sort_of_expr(self):
        """ Test minimal sorts of expressions """
        self.assertEqual(sort_of_expr(None, NAT_1), Sort.NAT)
        self.assertEqual(sort_of_expr(None, Succ(NAT_1)), Sort.NAT)
        self.assertEqual(sort_of_expr(None, Neg(NAT_1)), Sort.INT)
        self.assertEqual(sort_of_expr(None, Not(TRUE)), Sort.BOOL)
        self.assertEqual(sort_of_expr(None, Choice(NAT_1, Neg(NAT_1))), Sort.INT)
        self.assertEqual(sort_of_expr(TypingCtx({'x': Sort.BOOL}), EVar('x')), Sort.BOOL)

    def test_sort_errors(self):
        """ Test ill-sorted expressions """
        with self.assertRaises(SortError):
            sort_of_expr(None, Not(NAT_1))
        with self.assertRaises(SortError):
            sort_of_expr(None, Neg(TRUE))
        with self.assertRaises(NoUpperBound):
            sort_of_expr(None, Choice(TRUE, NAT_1))
        with self.assertRaises(UnboundVariable):
            sort_of_expr(None, EVar('x'))


class TestCheckProcess(unittest.TestCase):

    def test_examples(self):
        """ Test processes against local types, with the rule reported on rejection """
        for text, t, rule in check_table:
            verdict = check_process(None, process(text), local_tree(t))
            if rule is None:
                self.assertTrue(verdict, f'{text} : {t}')
            else:
                self.assertFalse(verdict, f'{text} : {t}')
                self.assertEqual(verdict.reason, rule, f'{text} : {t}')

    def test_context(self):
        """ Test checking an open process under a context """
        p, t = PSend(participant('q'), 0, EVar('y'), Inact()), local_tree('q (+) { l0(int). end }')
        self.assertTrue(check_process(TypingCtx({'y': Sort.NAT}), p, t))
        self.assertEqual(check_process(TypingCtx({'y': Sort.BOOL}), p, t).reason, 't-out')

    def test_failure_position(self):
        """ Test that a rejection names the innermost failing process and where it starts """
        verdict = check_process(None, process('q!l0(1).\n  q!l0(1).\n    q!l0(true). 0'), local_tree(T_P))
        self.assertEqual(verdict.reason, 't-out')
        self.assertEqual(verdict.stats['at'], 'send to q')
        self.assertEqual((verdict.stats['line'], verdict.stats['column']), (3, 5))
        self.assertIn('at line 3, column 5', verdict.counterexample)
        verdict = check_process(None, process('mu X. q!l0(1). if 1 then X else 0'), local_tree(T_P))
        self.assertEqual(verdict.stats['at'], 'conditional on 1')
        self.assertEqual(verdict.stats['column'], 16)
        built = check_process(None, PSend(participant('q'), 0, TRUE, Inact()), local_tree(T_P))
        self.assertEqual(built.reason, 't-out')
        self.assertNotIn('line', built.stats)
        self.assertEqual(check_process(None, p, t).reason, 't-expr')


class TestRealizer(unittest.TestCase):

    def test_synthesized_processes_check(self):
        """ Test that synthesized processes inhabit their types """
        for t in (T_P, T_Q, T_R, 'end', 'rec X. q & { l0(int). X, l1(bool). r (+) { l2(nat). X } }',
                  'rec X. q (+) { l0(int). rec Y. r & { l2(int). Y, l3(int). X }, l1(int). X }'):
            for choice in ('all', 'first'):
                p = synthesize_process(local_tree(t), choice)
                self.assertTrue(check_process(None, p, local_tree(t)), f'{t} ({choice})')

    def test_first_choice(self):
        """ Test that the first-label mode sends the smallest label with the smallest value """
        p = synthesize_process(local_tree(T_P), 'first')
        self.assertEqual(p, PRec(PSend(participant('q'), 0, Lit(Value(Sort.INT, 0)), PVar(0))))

    def test_all_choices(self):
        """ Test that every send label is reachable through a conditional """
        p = synthesize_process(local_tree(T_P))
        self.assertIsInstance(p, PRec)
        self.assertIsInstance(p.body, PIte)
        self.assertEqual({p.body.then.label, p.body.orelse.label}, {0, 1})

    def test_errors(self):
        """ Test that realizers need local trees and a known mode """
        with self.assertRaises(KindMismatch):
            synthesize_process(global_tree(G_EX))
        with self.assertRaises(ValueError):
            synthesize_process(local_tree(T_P), 'last')

    def test_shared_subtrees(self):
        """ Test that a subtree reached along many paths is realised once """
        q = participant('q')
        depth = 60
        specs = {i: (TreeKind.LOCAL, Tag.SEND, (q,), ((0, Sort.INT, i + 1), (1, Sort.INT, i + 1)))
                 for i in range(depth)}
        specs[depth] = (TreeKind.LOCAL, Tag.END, (), ())
        p = synthesize_process(TreeArena().intern_graph(specs)[0])
        for _ in range(depth):
            self.assertIsInstance(p, PIte)
            self.assertIs(p.then.cont, p.orelse.cont)
            p = p.then.cont
        self.assertEqual(p, Inact())


class TestCheckSession(unittest.TestCase):

    def test_synthesized_session(self):
        """ Test a synthesized session against the projections of a balanced global type """
        g = global_tree(G_TYPED)
        gamma = gamma_proj(g)
        verdict = check_session(synthesize_session(gamma), gamma, g)
        self.assertTrue(verdict)
        self.assertEqual(verdict.stats['participants'], 3)

    def test_running_example(self):
        """ Test the running example with the balance precondition lifted """
        gamma = env(GAMMA_EX)
        self.assertTrue(check_session(synthesize_session(gamma), gamma, global_tree(G_EX), check_balance=False))

    def test_domain_mismatch(self):
        """ Test a session missing a participant of the environment """
        verdict = check_session(parse('session', 'p <| 0 || q <| 0'), env(GAMMA_END), global_tree('end'))
        self.assertFalse(verdict)
        self.assertEqual(verdict.reason, 't-sess')
        who, message = verdict.counterexample
        self.assertIsNone(who)
        self.assertIn("['r']", message)

    def test_not_associated(self):
        """ Test an environment that does not follow the global type """
        gamma = env('p : q (+) { l0(int). end, l1(int). end }\nq : p & { l0(int). end }')
        m = synthesize_session(gamma)
        verdict = check_session(m, gamma, global_tree('p -> q { l0(int). end }'))
        self.assertFalse(verdict)
        self.assertEqual(verdict.reason, 't-sess')
        self.assertIsNone(verdict.counterexample[0])

    def test_process_rejected(self):
        """ Test that the first ill-typed process is reported with its participant """
        g = global_tree(G_TYPED)
        gamma = gamma_proj(g)
        m = synthesize_session(gamma).replace({participant('p'): process('q!l2(1). 0')})
        verdict = check_session(m, gamma, g)
        self.assertFalse(verdict)
        self.assertEqual(verdict.reason, 't-label')
        self.assertEqual(verdict.counterexample[0], participant('p'))
        self.assertEqual((verdict.stats['line'], verdict.stats['column']), (1, 1))
