# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from .__meta__ import __author__, __version__  # noqa: F401
from .equirec.arena import bisim, intern, to_syntax  # noqa: F401
from .equirec.balance import balanced  # noqa: F401
from .lts.environment import env_state_graph, env_step  # noqa: F401
from .projection import TypeEnv, associated, check_association, gamma_proj, project  # noqa: F401
from .properties.liveness import env_live  # noqa: F401
from .properties.safety import safe  # noqa: F401
from .properties.sessions import deadlock_status, fair_schedule, session_live_bounded  # noqa: F401
from .subtyping import subtype  # noqa: F401
from .syntax.parser import parse, parse_file  # noqa: F401
from .syntax.render import render  # noqa: F401
from .typecheck import check_process, check_session  # noqa: F401
