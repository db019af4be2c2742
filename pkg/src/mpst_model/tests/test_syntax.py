# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from ..errors import (DslSyntaxError, DuplicateLabel, DuplicateParticipant, EmptyBranchSet, SelfCommunication,
                      UnboundName, UnguardedRecursion)
from ..fixtures import G_EX, GAMMA_EX, ONE_SHOT_SESSION, P_P, STUCK_SESSION, T_P, T_Q, T_R
from ..syntax.parser import parse
from ..syntax.processes import Choice, Inact, Lit, PIte, PRec, PRecv, PSend, PVar, SessionForm
from ..syntax.render import render
from ..syntax.terms import (Branch, GComm, GEnd, GRec, GVar, LRec, LSend, LVar, ParticipantTable, Sort, Value,
                            participant)

import unittest

round_trip_table = [
    ('global', G_EX),
    ('global', 'end'),
    ('global', 'p -> q { l0(nat). end, l1(bool). r -> p { l3(int). end } }'),
    ('local', T_P),
    ('local', T_Q),
    ('local', T_R),
    ('local', 'rec X. rec Y. p & { l0(int). X, l1(int). Y }'),
    ('process', P_P),
    ('process', 'p?{ l0(x). q!l1(succ(x)). 0, l1(y). if not(true) then 0 else 0 }'),
    ('process', 'q!l0(neg(-3)). 0'),
    ('process', 'q!l0(int(0)). q!l1(int(7) (+) 2). 0'),
    ('session', ONE_SHOT_SESSION),
    ('session', STUCK_SESSION),
    ('env', GAMMA_EX),
]


class TestParse(unittest.TestCase):

    def test_global(self):
        """ Test parsing a recursive global type """
        g = parse('global', G_EX)
        p, q, r = participant('p'), participant('q'), participant('r')
        self.assertIsInstance(g, GRec)
        self.assertEqual(g.body.sender, p)
        self.assertEqual(g.body.receiver, q)
        self.assertEqual([b.label for b in g.body.branches], [0, 1])
        self.assertEqual(g.body.branches[0].cont, GVar(0))
        self.assertEqual(g.body.branches[1].cont, GComm(q, r, ((2, Sort.INT, GEnd()),)))

    def test_branches_sorted(self):
        """ Test that branches are ordered by label whatever the source order """
        g = parse('global', 'p -> q { l1(int). end, l0(nat). end }')
        self.assertEqual([b.label for b in g.branches], [0, 1])
        self.assertEqual(g.branches[0].sort, Sort.NAT)

    def test_local_binders(self):
        """ Test de Bruijn indices of nested binders """
        t = parse('local', 'rec X. rec Y. q (+) { l0(int). X, l1(int). Y }')
        self.assertIsInstance(t, LRec)
        inner = t.body.body
        self.assertIsInstance(inner, LSend)
        self.assertEqual(inner.branches[0].cont, LVar(1))
        self.assertEqual(inner.branches[1].cont, LVar(0))

    def test_process(self):
        """ Test parsing a process with a non-deterministic guard """
        proc = parse('process', P_P)
        self.assertIsInstance(proc, PRec)
        self.assertIsInstance(proc.body, PIte)
        true, false = Lit(Value(Sort.BOOL, True)), Lit(Value(Sort.BOOL, False))
        self.assertEqual(proc.body.cond, Choice(true, false))
        self.assertEqual(proc.body.then, PSend(participant('q'), 0, Lit(Value(Sort.NAT, 1)), PVar(0)))
        self.assertEqual(proc.body.orelse, PSend(participant('q'), 1, Lit(Value(Sort.NAT, 1)), Inact()))

    def test_literals(self):
        """ Test literal sorts: naturals, negative integers and booleans """
        send = parse('process', 'q!l0(-2). 0')
        self.assertEqual(send.expr, Lit(Value(Sort.INT, -2)))
        send = parse('process', 'q!l0(7). 0')
        self.assertEqual(send.expr, Lit(Value(Sort.NAT, 7)))

    def test_session(self):
        """ Test parsing a session """
        m = parse('session', STUCK_SESSION)
        self.assertIsInstance(m, SessionForm)
        self.assertEqual(set(m.participants), {participant('p'), participant('q')})
        self.assertIsInstance(m[participant('p')], PRec)
        self.assertEqual(m[participant('q')], Inact())

        m = parse('session', ONE_SHOT_SESSION)
        self.assertIsInstance(m[participant('q')], PRecv)

    def test_env(self):
        """ Test parsing an environment, with and without separators """
        form = parse('env', GAMMA_EX)
        self.assertEqual(len(form), 3)
        same = parse('env', f'p : {T_P}; q : {T_Q}; r : {T_R};')
        self.assertEqual(form, same)

    def test_comments(self):
        """ Test that line comments are ignored """
        g = parse('global', '// a comment\np -> q { l0(int). end } // trailing')
        self.assertIsInstance(g, GComm)

    def test_private_table(self):
        """ Test that a private participant table numbers names independently """
        table = ParticipantTable()
        g = parse('global', 'carol -> dave { l0(int). end }', table)
        self.assertEqual((g.sender.id, g.receiver.id), (0, 1))
        self.assertIn('carol', table)
        self.assertEqual(str(g.sender), 'carol')

    def test_label_like_names(self):
        """ Test that names shaped like labels are read as names outside label positions """
        table = ParticipantTable()
        g = parse('global', 'l0 -> l1 { l1(int). end }', table)
        self.assertEqual((str(g.sender), str(g.receiver)), ('l0', 'l1'))
        self.assertEqual([b.label for b in g.branches], [1])
        self.assertEqual(render(g), 'l0 -> l1 { l1(int). end }')
        p = parse('process', 'l1?{ l0(l2). l1!l3(l2). 0 }', table)
        self.assertEqual(p.branches[0].var, 'l2')
        self.assertEqual(p.branches[0].cont.label, 3)

    def test_unknown_kind(self):
        """ Test that an unknown kind is rejected """
        with self.assertRaises(ValueError):
            parse('protocol', 'end')


class TestParseErrors(unittest.TestCase):

    def test_syntax_error(self):
        """ Test that malformed text raises a syntax error with a position """
        with self.assertRaises(DslSyntaxError) as ctx:
            parse('global', 'p -> q { l0(int) end }')
        self.assertIsNotNone(ctx.exception.line)

    def test_unexpected_end(self):
        """ Test truncated input """
        with self.assertRaises(DslSyntaxError):
            parse('global', 'p -> q { l0(int).')

    def test_bad_label(self):
        """ Test that a name in a label position is rejected with its position """
        with self.assertRaises(DslSyntaxError) as ctx:
            parse('global', 'p -> q { ok(int). end }')
        self.assertEqual((ctx.exception.line, ctx.exception.column), (1, 10))
        with self.assertRaises(DslSyntaxError):
            parse('process', 'q!go(1). 0')

    def test_unguarded(self):
        """ Test that unguarded recursion is rejected """
        with self.assertRaises(UnguardedRecursion):
            parse('global', 'rec X. X')
        with self.assertRaises(UnguardedRecursion):
            parse('local', 'rec X. rec Y. X')
        with self.assertRaises(UnguardedRecursion):
            parse('process', 'mu X. if true then X else 0')

    def test_unbound(self):
        """ Test that free recursion and expression variables are rejected """
        with self.assertRaises(UnboundName):
            parse('global', 'p -> q { l0(int). Y }')
        with self.assertRaises(UnboundName):
            parse('process', 'q!l0(x). 0')

    def test_empty_branches(self):
        """ Test that a choice needs at least one branch with distinct labels """
        with self.assertRaises(EmptyBranchSet):
            parse('global', 'p -> q { }')
        with self.assertRaises(DuplicateLabel):
            parse('local', 'p & { l0(int). end, l0(nat). end }')
        with self.assertRaises(DuplicateLabel):
            parse('process', 'p?{ l0(x). 0, l0(y). 0 }')

    def test_self_communication(self):
        """ Test that a participant cannot talk to itself """
        with self.assertRaises(SelfCommunication):
            parse('global', 'p -> p { l0(int). end }')

    def test_duplicate_participant(self):
        """ Test that sessions and environments mention each participant once """
        with self.assertRaises(DuplicateParticipant):
            parse('session', 'p <| 0 || p <| 0')
        with self.assertRaises(DuplicateParticipant):
            parse('env', 'p : end\np : end')

    def test_nonzero_inaction(self):
        """ Test that only 0 denotes inaction """
        with self.assertRaises(DslSyntaxError):
            parse('process', '1')

    def test_all_errors_are_syntax_errors(self):
        """ Test that validation errors share the syntax error base class """
        for cls in (UnguardedRecursion, UnboundName, EmptyBranchSet, DuplicateLabel, SelfCommunication,
                    DuplicateParticipant):
            self.assertTrue(issubclass(cls, DslSyntaxError))


class TestRender(unittest.TestCase):

    def test_round_trip(self):
        """ Test that rendering then parsing gives back the same term """
        for kind, text in round_trip_table:
            term = parse(kind, text)
            self.assertEqual(parse(kind, render(term)), term, text)

    def test_local_format(self):
        """ Test the printed form of a local type """
        self.assertEqual(render(parse('local', T_P)), T_P)
        self.assertEqual(render(parse('local', T_R)), T_R)

    def test_global_format(self):
        """ Test the printed form of a global type """
        self.assertEqual(render(parse('global', G_EX)), G_EX)

    def test_session_format(self):
        """ Test the printed form of a session """
        self.assertEqual(render(parse('session', STUCK_SESSION)), STUCK_SESSION)

    def test_shadowing(self):
        """ Test that reused binder names are renamed apart """
        inner = LRec(LSend(participant('q'), (Branch(0, Sort.INT, LVar(0)), Branch(1, Sort.INT, LVar(1)))))
        t = LRec(inner)
        text = render(t)
        self.assertEqual(text, 'rec X. rec X1. q (+) { l0(int). X1, l1(int). X }')
        self.assertEqual(parse('local', text), t)

    def test_render_sort(self):
        """ Test rendering of atoms """
        self.assertEqual(render(Sort.NAT), 'nat')
        self.assertEqual(render(Value(Sort.BOOL, True)), 'true')
        self.assertEqual(render(participant('p')), 'p')

    def test_int_literals(self):
        """ Test that non-negative ints keep their sort through printing and parsing """
        zero = Lit(Value(Sort.INT, 0))
        self.assertEqual(render(Value(Sort.INT, 0)), 'int(0)')
        self.assertEqual(render(Value(Sort.INT, -2)), '-2')
        self.assertEqual(render(Value(Sort.NAT, 0)), '0')
        p = PSend(participant('q'), 0, zero, Inact())
        self.assertEqual(render(p), 'q!l0(int(0)). 0')
        self.assertEqual(parse('process', render(p)), p)
        self.assertEqual(parse('process', 'q!l0(0). 0').expr, Lit(Value(Sort.NAT, 0)))
