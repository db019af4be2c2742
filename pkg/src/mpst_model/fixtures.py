# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from typing import List, NamedTuple

from .equirec.arena import TreeHandle, intern
from .equirec.balance import balanced
from .lts.environment import env_step
from .lts.labels import Comm
from .projection import TypeEnv, associated, project
from .properties.lasso import Lasso, lasso_fair, lasso_live
from .properties.liveness import env_live
from .properties.safety import safe, weak_safety_at
from .properties.sessions import SessionStatus, deadlock_status, session_live_bounded
from .syntax.parser import parse
from .syntax.processes import Process, SessionForm
from .syntax.terms import participant

T_P = 'rec X. q (+) { l0(int). X, l1(int). end }'
T_Q = 'rec X. p & { l0(int). X, l1(int). r (+) { l2(int). end } }'
T_R = 'q & { l2(int). end }'

GAMMA_EX = f"""
p : {T_P}
q : {T_Q}
r : {T_R}
"""

GAMMA_PRIME = f"""
p : end
q : r (+) {{ l2(int). end }}
r : {T_R}
"""

GAMMA_END = """
p : end
q : end
r : end
"""

# the receiver only accepts naturals
GAMMA_UNSAFE = """
p : q (+) { l0(int). end }
q : p & { l0(nat). end }
"""

G_EX = 'rec X. p -> q { l0(int). X, l1(int). q -> r { l2(int). end } }'

G_BAL = 'rec X. p -> q { l0(int). q -> r { l2(int). X }, l1(int). q -> r { l2(int). end } }'

# balanced, and r sees the same continuation whichever label p picks
G_TYPED = 'rec X. p -> q { l0(int). q -> r { l2(int). X }, l1(bool). q -> r { l2(int). X } }'

# p commits to a send nobody will receive
STUCK_SESSION = 'p <| mu X. q!l0(0). X || q <| 0'

ONE_SHOT_SESSION = 'p <| q!l0(5). 0 || q <| p?{ l0(x). 0 }'

NARROW_ENV = """
p : q (+) { l0(int). end }
q : p & { l0(int). end, l1(int). end }
"""

NARROW_GLOBAL = 'p -> q { l0(int). end, l1(int). end }'

P_P = 'mu X. if (true (+) false) then q!l0(1). X else q!l1(1). 0'


def env(text: str) -> TypeEnv:
    return TypeEnv.from_form(parse('env', text))


def global_tree(text: str) -> TreeHandle:
    return intern(parse('global', text))


def local_tree(text: str) -> TreeHandle:
    return intern(parse('local', text))


def session(text: str) -> SessionForm:
    return parse('session', text)


def process(text: str) -> Process:
    return parse('process', text)


def comm(sender: str, receiver: str, label: int) -> Comm:
    return Comm(participant(sender), participant(receiver), label)


def loop_lasso() -> Lasso:
    """ Γex repeating the l0 exchange forever """
    gamma = env(GAMMA_EX)
    return Lasso([], [(gamma, comm('p', 'q', 0))])


def finishing_lasso() -> Lasso:
    """ Γex taking l0, then l1, then l2, then stopping """
    gamma, gamma_prime, gamma_end = env(GAMMA_EX), env(GAMMA_PRIME), env(GAMMA_END)
    prefix = [(gamma, comm('p', 'q', 0)), (gamma, comm('p', 'q', 1)), (gamma_prime, comm('q', 'r', 2))]
    return Lasso.stutter(prefix, gamma_end)


class GoldenCheck(NamedTuple):
    name: str
    passed: bool


def _golden() -> List[tuple]:
    gamma, gamma_prime, gamma_end = env(GAMMA_EX), env(GAMMA_PRIME), env(GAMMA_END)
    g_ex = global_tree(G_EX)
    stuck = session(STUCK_SESSION)
    checks: List[tuple] = [
        ('gamma steps to itself on (p,q)l0', lambda: env_step(gamma, comm('p', 'q', 0)) == gamma),
        ('gamma steps to gamma-prime on (p,q)l1', lambda: env_step(gamma, comm('p', 'q', 1)) == gamma_prime),
        ('gamma-prime steps to gamma-end on (q,r)l2',
         lambda: env_step(gamma_prime, comm('q', 'r', 2)) == gamma_end),
        ('int/nat environment is unsafe',
         lambda: not weak_safety_at(env(GAMMA_UNSAFE)) and not safe(env(GAMMA_UNSAFE))),
        ('gamma is safe', lambda: bool(safe(gamma))),
        ('l0 loop is fair but not live', lambda: lasso_fair(loop_lasso()) and not lasso_live(loop_lasso())),
        ('l0 l1 l2 path is fair and live', lambda: lasso_fair(finishing_lasso()) and lasso_live(finishing_lasso())),
        ('gamma is not live', lambda: not env_live(gamma)),
        ('g-ex is not balanced', lambda: not balanced(g_ex)),
        ('projections of g-ex', lambda: [project(g_ex, participant(r)) for r in 'pqr']
         == [local_tree(T_P), local_tree(T_Q), local_tree(T_R)]),
        ('stuck session is deadlocked', lambda: deadlock_status(stuck).status is SessionStatus.DEADLOCKED),
        ('stuck session is not live', lambda: not session_live_bounded(stuck)),
        ('narrowed sender is associated', lambda: associated(env(NARROW_ENV), global_tree(NARROW_GLOBAL))),
    ]
    return checks


def golden_checks() -> List[GoldenCheck]:
    """ Run the worked examples and report which reproduce their expected verdicts """
    return [GoldenCheck(name, bool(check())) for name, check in _golden()]
