# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from collections import deque

from ..corpus import CorpusParams, gen_corpus, perturb_env
from ..limits import suite_scale
from ..lts.environment import comm_pairs, env_comms, env_step
from ..lts.global_step import global_enabled, global_step
from ..lts.session import session_enabled, session_unfold
from ..projection import associated
from ..properties.liveness import env_live
from ..properties.safety import safe
from ..properties.sessions import SessionStatus, deadlock_status, session_live_bounded
from ..syntax.processes import PRecv, PSend
from ..typecheck import check_session

import random
import unittest

# Quick sizes by default; MPST_ACCEPTANCE=1 (or the test runner's --acceptance) gives the full ones
SCALE = suite_scale()
CORPUS_SEED = 2024
PERTURBATIONS = 3

_corpus = []


def corpus():
    """ Helper function for the shared protocol corpus, generated once per run """
    if not _corpus:
        params = CorpusParams(max_participants=SCALE.max_participants, max_labels=SCALE.max_labels,
                              max_depth=SCALE.max_depth)
        _corpus.extend(gen_corpus(CORPUS_SEED, SCALE.corpus_size, params, max_states=SCALE.env_max_states))
    return _corpus


def reachable_pairs(env, g, limit: int = SCALE.max_pairs):
    """ Helper function listing (environment, global type) pairs reachable by common steps, breadth first """
    seen = {(env, g)}
    queue = deque([(env, g)])
    found = []
    while queue and len(found) < limit:
        gamma, h = queue.popleft()
        found.append((gamma, h))
        for label in env_comms(gamma):
            reduct = global_step(h, label)
            if reduct is None:
                continue
            pair = (env_step(gamma, label), reduct)
            if pair not in seen:
                seen.add(pair)
                queue.append(pair)
    return found


def typed_configurations(item, depth: int = SCALE.session_depth):
    """ Helper function listing (session, environment, global type) triples reached by session steps """
    start = (item.session, item.env, item.g)
    seen = {start}
    queue = deque([(start, 0)])
    found = []
    while queue:
        (m, gamma, g), steps = queue.popleft()
        found.append((m, gamma, g))
        if steps == depth:
            continue
        for label, after in session_enabled(m, abstract_values=True):
            reduct = global_step(g, label)
            if label not in env_comms(gamma) or reduct is None:
                # no typing for `after`; test_subject_reduction reports it
                found.append((after, None, None))
                continue
            nxt = (after, env_step(gamma, label), reduct)
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, steps + 1))
    return found


def unmatched_sends(m):
    """ Helper function listing sends that meet a receive from the sender lacking the sent label """
    found = []
    for form in session_unfold(m):
        for p, proc in form.items():
            if not isinstance(proc, PSend) or proc.peer not in form:
                continue
            other = form[proc.peer]
            if isinstance(other, PRecv) and other.peer == p and other.branch(proc.label) is None:
                found.append((form, p))
    return found


class TestAssociationTheorems(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.items = corpus()

    def test_projections_safe_and_live(self):
        """ Test that environments of projections are safe and live """
        for item in self.items:
            self.assertTrue(associated(item.env, item.g), item.name)
            self.assertTrue(safe(item.env), item.name)
            self.assertTrue(env_live(item.env), item.name)

    def test_perturbed_safe_and_live(self):
        """ Test that associated subtypes of the projections stay safe and live """
        rng = random.Random(CORPUS_SEED)
        for item in self.items:
            for _ in range(PERTURBATIONS):
                gamma = perturb_env(item.env, rng)
                self.assertTrue(associated(gamma, item.g), item.name)
                self.assertTrue(safe(gamma), item.name)
                self.assertTrue(env_live(gamma), item.name)

    def test_completeness(self):
        """ Test that every environment step is matched by the same global step, keeping association """
        rng = random.Random(CORPUS_SEED + 1)
        for item in self.items:
            for gamma, g in reachable_pairs(perturb_env(item.env, rng), item.g):
                for label in env_comms(gamma):
                    reduct = global_step(g, label)
                    self.assertIsNotNone(reduct, f'{item.name}: {label}')
                    self.assertTrue(associated(env_step(gamma, label), reduct, check_balance=False), item.name)

    def test_soundness(self):
        """ Test that every global step is matched by an environment step of the same pair """
        rng = random.Random(CORPUS_SEED + 2)
        for item in self.items:
            for gamma, g in reachable_pairs(perturb_env(item.env, rng), item.g):
                comms = env_comms(gamma)
                for label in global_enabled(g):
                    matched = [a for a in comms if a.pair == label.pair and global_step(g, a) is not None]
                    self.assertTrue(matched, f'{item.name}: {label}')
                    self.assertTrue(any(associated(env_step(gamma, a), global_step(g, a), check_balance=False)
                                        for a in matched), item.name)


class TestSessionTheorems(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.items = corpus()
        cls.configurations = {item.name: typed_configurations(item) for item in cls.items}

    def test_synthesized_sessions_typed(self):
        """ Test that every synthesized session types against its protocol """
        for item in self.items:
            self.assertTrue(check_session(item.session, item.env, item.g), item.name)

    def test_subject_reduction(self):
        """ Test that session steps are environment steps and preserve typing """
        for item in self.items:
            for m, gamma, g in self.configurations[item.name]:
                self.assertIsNotNone(gamma, f'{item.name}: step without a matching environment step')
                self.assertIsNotNone(g, f'{item.name}: step without a matching global step')
                self.assertTrue(check_session(m, gamma, g, check_balance=False), item.name)

    def test_typing_after_unfolding(self):
        """ Test that every internal unfolding of a typed session is typed by the same environment """
        for item in self.items:
            for m, gamma, g in self.configurations[item.name]:
                if gamma is None:
                    continue
                for form in session_unfold(m):
                    self.assertTrue(check_session(form, gamma, g, check_balance=False), item.name)

    def test_fidelity(self):
        """ Test that a pair the environment lets communicate can communicate in the session """
        for item in self.items:
            for m, gamma, _ in self.configurations[item.name]:
                if gamma is None:
                    continue
                pairs = {label.pair for label, _ in session_enabled(m, abstract_values=True)}
                for pair in comm_pairs(gamma):
                    self.assertIn(pair, pairs, item.name)

    def test_safety_and_progress(self):
        """ Test that typed sessions never mismatch labels, never deadlock and stay live """
        for item in self.items:
            self.assertTrue(session_live_bounded(item.session), item.name)
            for m, gamma, _ in self.configurations[item.name]:
                self.assertEqual(unmatched_sends(m), [], item.name)
                self.assertNotEqual(deadlock_status(m).status, SessionStatus.DEADLOCKED, item.name)
