# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from typing import FrozenSet

from ..errors import DuplicateLabel, EmptyBranchSet, SelfCommunication, UnboundName, UnguardedRecursion
from .processes import (Inact, PIte, PRec, PRecv, PSend, PVar, Process, SessionForm,
                        free_expr_vars)
from .terms import GComm, GEnd, GRec, GVar, LEnd, LRec, LVar, SynType


def _shift(unguarded: FrozenSet[int]) -> FrozenSet[int]:
    return frozenset(i + 1 for i in unguarded) | {0}


def validate_type(term: SynType) -> SynType:
    """Check that a type is closed, guarded and has non-empty branch sets.

    Args:
        term (SynType): Global or local type.

    Raises:
        UnguardedRecursion: A variable is reachable from its binder without a communication.
        EmptyBranchSet: A communication has no branches.
        SelfCommunication: A global communication has the same sender and receiver.
        UnboundName: A variable has no binder.

    Returns:
        SynType: The term, unchanged.
    """
    _check_type(term, 0, frozenset())
    return term


def _check_type(term, depth: int, unguarded: FrozenSet[int]):
    if isinstance(term, (GEnd, LEnd)):
        return
    if isinstance(term, (GVar, LVar)):
        if term.index >= depth:
            raise UnboundName(f'unbound recursion variable {term.name}')
        if term.index in unguarded:
            raise UnguardedRecursion(f'unguarded recursion variable {term.name}')
        return
    if isinstance(term, (GRec, LRec)):
        _check_type(term.body, depth + 1, _shift(unguarded))
        return
    if not term.branches:
        raise EmptyBranchSet('communication without branches')
    if isinstance(term, GComm) and term.sender == term.receiver:
        raise SelfCommunication(f'{term.sender} communicates with itself')
    labels = [b.label for b in term.branches]
    if len(set(labels)) != len(labels):
        raise DuplicateLabel(f'duplicate label in branches {labels}')
    for b in term.branches:
        _check_type(b.cont, depth, frozenset())


def validate_process(proc: Process, bound: FrozenSet[str] = frozenset()) -> Process:
    """ Check that a process is closed, guarded and has non-empty receive branches """
    _check_process(proc, 0, frozenset(), bound)
    return proc


def _check_expr(e, bound: FrozenSet[str]):
    for name in free_expr_vars(e):
        if name not in bound:
            raise UnboundName(f'unbound expression variable {name}')


def _check_process(proc, depth: int, unguarded: FrozenSet[int], bound: FrozenSet[str]):
    if isinstance(proc, Inact):
        return
    if isinstance(proc, PVar):
        if proc.index >= depth:
            raise UnboundName(f'unbound process variable {proc.name}')
        if proc.index in unguarded:
            raise UnguardedRecursion(f'unguarded process variable {proc.name}')
        return
    if isinstance(proc, PRec):
        _check_process(proc.body, depth + 1, _shift(unguarded), bound)
    elif isinstance(proc, PSend):
        _check_expr(proc.expr, bound)
        _check_process(proc.cont, depth, frozenset(), bound)
    elif isinstance(proc, PRecv):
        if not proc.branches:
            raise EmptyBranchSet('receive without branches')
        labels = [b.label for b in proc.branches]
        if len(set(labels)) != len(labels):
            raise DuplicateLabel(f'duplicate label in branches {labels}')
        for b in proc.branches:
            _check_process(b.cont, depth, frozenset(), bound | {b.var})
    elif isinstance(proc, PIte):
        _check_expr(proc.cond, bound)
        _check_process(proc.then, depth, unguarded, bound)
        _check_process(proc.orelse, depth, unguarded, bound)


def validate_session(session: SessionForm) -> SessionForm:
    for _, proc in session.items():
        validate_process(proc)
    return session
