# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import os
from typing import NamedTuple

# Budgets shared by the checkers and the command line. Every function taking one of these
# as a keyword argument falls back to the value below.

DEFAULT_MAX_STATES = 100_000        # environment and session state graphs
DEFAULT_SESSION_DEPTH = 64          # communication steps explored by session checks
DEFAULT_UNFOLD_STEPS = 64           # internal steps in one unfolding closure
DEFAULT_SCHEDULE_STEPS = 1_000      # steps run by a scheduler before giving up
BRUTE_FORCE_LASSO_LENGTH = 8        # |prefix| + |cycle| enumerated by the lasso oracle
DEFAULT_GENERATION_ATTEMPTS = 200   # candidates tried per requested protocol
PROCESS_CACHE_SIZE = 4_096          # processes whose unfolding closure is memoised

REPORT_SCHEMA_VERSION = 1


def product_depth(states_a: int, states_b: int) -> int:
    """Unrolling depth at which the inductive subtyping check agrees with the coinductive one."""
    return states_a * states_b + 1


class SuiteScale(NamedTuple):
    """ Sizes of the property-based test suites """
    corpus_size: int            # protocols in the shared corpus
    max_participants: int
    max_labels: int
    max_depth: int
    env_max_states: int         # bound on each projected environment's state graph
    max_pairs: int              # (environment, global type) pairs explored per protocol
    session_depth: int          # communication steps explored per synthesized session
    random_envs: int            # environments compared against lasso enumeration
    random_env_states: int      # bound on their state graphs
    subtype_peers: int          # peers in the exhaustively enumerated depth-3 local types


QUICK_SCALE = SuiteScale(corpus_size=12, max_participants=3, max_labels=2, max_depth=3, env_max_states=10_000,
                         max_pairs=200, session_depth=12, random_envs=40, random_env_states=12, subtype_peers=1)

ACCEPTANCE_SCALE = SuiteScale(corpus_size=100, max_participants=6, max_labels=4, max_depth=3,
                              env_max_states=10_000, max_pairs=1_000, session_depth=32, random_envs=50,
                              random_env_states=50, subtype_peers=2)

ACCEPTANCE_VARIABLE = 'MPST_ACCEPTANCE'


def acceptance_requested() -> bool:
    return os.environ.get(ACCEPTANCE_VARIABLE, '') not in ('', '0')


def suite_scale() -> SuiteScale:
    """Sizes the property suites run at.

    Returns:
        SuiteScale: The full acceptance sizes when the ``MPST_ACCEPTANCE`` environment variable is
        set to anything but ``0``, otherwise the quick sizes.
    """
    return ACCEPTANCE_SCALE if acceptance_requested() else QUICK_SCALE
