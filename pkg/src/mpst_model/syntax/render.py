# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from typing import Tuple

from .processes import (Choice, EnvForm, EVar, Expr, Inact, Lit, Neg, Not, PIte, PRec, PRecv, PSend, PVar,
                        Process, SessionForm, Succ)
from .terms import (GComm, GEnd, GRec, GVar, LEnd, LRec, LRecv, LSend, LVar, Participant, Sort, SynGlobal,
                    SynLocal, Value)


def _fresh(name: str, scope: Tuple[str, ...]) -> str:
    if name not in scope:
        return name
    i = 1
    while f'{name}{i}' in scope:
        i += 1
    return f'{name}{i}'


def _branches(branches, scope, render_cont) -> str:
    inner = ', '.join(f'l{b.label}({b.sort.value}). {render_cont(b.cont, scope)}' for b in branches)
    return f'{{ {inner} }}'


def render_global(g: SynGlobal, scope: Tuple[str, ...] = ()) -> str:
    if isinstance(g, GEnd):
        return 'end'
    if isinstance(g, GVar):
        return scope[g.index]
    if isinstance(g, GRec):
        name = _fresh(g.name, scope)
        return f'rec {name}. {render_global(g.body, (name,) + scope)}'
    assert isinstance(g, GComm)
    return f'{g.sender} -> {g.receiver} {_branches(g.branches, scope, render_global)}'


def render_local(t: SynLocal, scope: Tuple[str, ...] = ()) -> str:
    if isinstance(t, LEnd):
        return 'end'
    if isinstance(t, LVar):
        return scope[t.index]
    if isinstance(t, LRec):
        name = _fresh(t.name, scope)
        return f'rec {name}. {render_local(t.body, (name,) + scope)}'
    op = '(+)' if isinstance(t, LSend) else '&'
    assert isinstance(t, (LSend, LRecv))
    return f'{t.peer} {op} {_branches(t.branches, scope, render_local)}'


def render_value(v: Value) -> str:
    """ Literal text of a value; non-negative ints are tagged so they do not read back as nats """
    if v.sort is Sort.INT and v.value >= 0:
        return f'int({v.value})'
    return str(v)


def render_expr(e: Expr) -> str:
    if isinstance(e, Lit):
        return render_value(e.value)
    if isinstance(e, EVar):
        return e.name
    if isinstance(e, Succ):
        return f'succ({render_expr(e.arg)})'
    if isinstance(e, Neg):
        return f'neg({render_expr(e.arg)})'
    if isinstance(e, Not):
        return f'not({render_expr(e.arg)})'
    assert isinstance(e, Choice)
    return f'({render_expr(e.left)} (+) {render_expr(e.right)})'


def render_process(p: Process, scope: Tuple[str, ...] = ()) -> str:
    if isinstance(p, Inact):
        return '0'
    if isinstance(p, PVar):
        return scope[p.index]
    if isinstance(p, PRec):
        name = _fresh(p.name, scope)
        return f'mu {name}. {render_process(p.body, (name,) + scope)}'
    if isinstance(p, PSend):
        return f'{p.peer}!l{p.label}({render_expr(p.expr)}). {render_process(p.cont, scope)}'
    if isinstance(p, PRecv):
        inner = ', '.join(f'l{b.label}({b.var}). {render_process(b.cont, scope)}' for b in p.branches)
        return f'{p.peer}?{{ {inner} }}'
    assert isinstance(p, PIte)
    return (f'if {render_expr(p.cond)} then {render_process(p.then, scope)} '
            f'else {render_process(p.orelse, scope)}')


def render(value) -> str:
    """Render a syntax value, or a tree handle, as DSL text.

    Args:
        value: Sort, Value, Participant, type, expression, process, session, environment or handle.

    Returns:
        str: Text accepted by `parse` for the matching kind.
    """
    if isinstance(value, (Sort,)):
        return value.value
    if isinstance(value, Value):
        return render_value(value)
    if isinstance(value, Participant):
        return str(value)
    if isinstance(value, SynGlobal):
        return render_global(value)
    if isinstance(value, SynLocal):
        return render_local(value)
    if isinstance(value, Expr):
        return render_expr(value)
    if isinstance(value, Process):
        return render_process(value)
    if isinstance(value, SessionForm):
        return ' || '.join(f'{p} <| {render_process(proc)}' for p, proc in value.items())
    if isinstance(value, EnvForm):
        return '\n'.join(f'{p} : {render_local(t)}' for p, t in value.items())
    # Tree handles and type environments live in the semantic layer
    from ..equirec.arena import TreeHandle, to_syntax
    if isinstance(value, TreeHandle):
        return render(to_syntax(value))
    from ..projection import TypeEnv
    if isinstance(value, TypeEnv):
        return '\n'.join(f'{p} : {render(h)}' for p, h in value.items())
    raise TypeError(f'cannot render {type(value).__name__}')
