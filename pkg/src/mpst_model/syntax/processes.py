# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from dataclasses import dataclass, field
from typing import Dict, Generic, Iterator, Mapping, NamedTuple, Optional, Tuple, TypeVar

from .terms import Participant, SynLocal, Value


class Expr:
    pass


@dataclass(frozen=True)
class EVar(Expr):
    name: str


@dataclass(frozen=True)
class Lit(Expr):
    value: Value


@dataclass(frozen=True)
class Succ(Expr):
    arg: Expr


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Not(Expr):
    arg: Expr


@dataclass(frozen=True)
class Choice(Expr):
    """ Non-deterministic choice between two expressions """
    left: Expr
    right: Expr


# (line, column) where a parsed process starts; None for processes built in code
Span = Tuple[int, int]


class Process:
    pass


@dataclass(frozen=True)
class Inact(Process):
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class PVar(Process):
    index: int
    name: str = field(default='X', compare=False)
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class PRec(Process):
    body: Process
    name: str = field(default='X', compare=False)
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class PSend(Process):
    peer: Participant
    label: int
    expr: Expr
    cont: Process
    span: Optional[Span] = field(default=None, compare=False, repr=False)


class RecvBranch(NamedTuple):
    label: int
    var: str
    cont: Process


@dataclass(frozen=True)
class PRecv(Process):
    peer: Participant
    branches: Tuple[RecvBranch, ...]
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def branch(self, label: int):
        for b in self.branches:
            if b.label == label:
                return b
        return None


@dataclass(frozen=True)
class PIte(Process):
    cond: Expr
    then: Process
    orelse: Process
    span: Optional[Span] = field(default=None, compare=False, repr=False)


def free_expr_vars(e: Expr) -> frozenset:
    if isinstance(e, EVar):
        return frozenset([e.name])
    if isinstance(e, Lit):
        return frozenset()
    if isinstance(e, Choice):
        return free_expr_vars(e.left) | free_expr_vars(e.right)
    return free_expr_vars(e.arg)


def substitute_expr(e: Expr, name: str, value: Value) -> Expr:
    if isinstance(e, EVar):
        return Lit(value) if e.name == name else e
    if isinstance(e, Lit):
        return e
    if isinstance(e, Choice):
        return Choice(substitute_expr(e.left, name, value), substitute_expr(e.right, name, value))
    return type(e)(substitute_expr(e.arg, name, value))


def substitute_value(p: Process, name: str, value: Value) -> Process:
    """ Replace the free expression variable `name` by `value`; receive binders shadow """
    if isinstance(p, (Inact, PVar)):
        return p
    if isinstance(p, PRec):
        return PRec(substitute_value(p.body, name, value), p.name, p.span)
    if isinstance(p, PSend):
        return PSend(p.peer, p.label, substitute_expr(p.expr, name, value), substitute_value(p.cont, name, value),
                     p.span)
    if isinstance(p, PRecv):
        return PRecv(p.peer, tuple(
            b if b.var == name else RecvBranch(b.label, b.var, substitute_value(b.cont, name, value))
            for b in p.branches), p.span)
    return PIte(substitute_expr(p.cond, name, value),
                substitute_value(p.then, name, value), substitute_value(p.orelse, name, value), p.span)


def substitute_process(p: Process, replacement: Process, index: int = 0) -> Process:
    """ Replace process variable `index` by the closed process `replacement` """
    if isinstance(p, PVar):
        return replacement if p.index == index else p
    if isinstance(p, Inact):
        return p
    if isinstance(p, PRec):
        return PRec(substitute_process(p.body, replacement, index + 1), p.name, p.span)
    if isinstance(p, PSend):
        return PSend(p.peer, p.label, p.expr, substitute_process(p.cont, replacement, index), p.span)
    if isinstance(p, PRecv):
        return PRecv(p.peer, tuple(RecvBranch(b.label, b.var, substitute_process(b.cont, replacement, index))
                                   for b in p.branches), p.span)
    return PIte(p.cond, substitute_process(p.then, replacement, index),
                substitute_process(p.orelse, replacement, index), p.span)


def unfold_rec(p: PRec) -> Process:
    return substitute_process(p.body, p)


V = TypeVar('V')


class ParticipantMap(Generic[V]):
    """Immutable, hashable finite map keyed by participant.

    Equality is extensional; iteration follows participant order.
    """
    __slots__ = ('_entries', '_hash')

    def __init__(self, entries: Mapping[Participant, V] = None):
        items = dict(entries or {})
        self._entries: Tuple[Tuple[Participant, V], ...] = tuple(sorted(items.items(), key=lambda kv: kv[0].id))
        self._hash = hash(self._entries)

    def __getitem__(self, p: Participant) -> V:
        for key, value in self._entries:
            if key == p:
                return value
        raise KeyError(p)

    def get(self, p: Participant, default=None):
        try:
            return self[p]
        except KeyError:
            return default

    def __contains__(self, p) -> bool:
        return any(key == p for key, _ in self._entries)

    def __iter__(self) -> Iterator[Participant]:
        return (key for key, _ in self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def items(self):
        return self._entries

    def values(self):
        return tuple(v for _, v in self._entries)

    @property
    def participants(self) -> Tuple[Participant, ...]:
        return tuple(key for key, _ in self._entries)

    def replace(self, updates: Mapping[Participant, V]):
        merged: Dict[Participant, V] = dict(self._entries)
        merged.update(updates)
        return type(self)(merged)

    def __eq__(self, other) -> bool:
        return type(other) is type(self) and self._entries == other._entries

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self):
        inner = ', '.join(f'{k}: {v!r}' for k, v in self._entries)
        return f'{type(self).__name__}({{{inner}}})'


class SessionForm(ParticipantMap[Process]):
    """ Normal form of a parallel composition of participants; empty is the unit session """

    def is_inactive(self) -> bool:
        return all(isinstance(p, Inact) for p in self.values())


class EnvForm(ParticipantMap[SynLocal]):
    """ Parsed type environment, before interning """
    pass
