# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, NamedTuple, Optional, Tuple, Union


class Sort(Enum):
    NAT = 'nat'
    INT = 'int'
    BOOL = 'bool'


NUMERIC_SORTS = (Sort.NAT, Sort.INT)


@dataclass(frozen=True)
class Participant:
    """A protocol role. Identity is the integer id; the name is only for display."""
    id: int
    name: Optional[str] = field(default=None, compare=False)

    def __str__(self):
        return self.name if self.name is not None else f'#{self.id}'

    def __lt__(self, other: 'Participant') -> bool:
        return self.id < other.id


class ParticipantTable:
    def __init__(self):
        """Participant Table

        Interns display names to participants so that the same name denotes the same
        participant in every input parsed against this table.
        """
        self._by_name: Dict[str, Participant] = {}

    def get(self, name: str) -> Participant:
        participant = self._by_name.get(name)
        if participant is None:
            participant = Participant(len(self._by_name), name)
            self._by_name[name] = participant
        return participant

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __iter__(self) -> Iterator[Participant]:
        return iter(self._by_name.values())


_default_table = ParticipantTable()


def default_participants() -> ParticipantTable:
    return _default_table


def participant(name: str) -> Participant:
    """ Shorthand for the participant called `name` in the process-wide table """
    return _default_table.get(name)


@dataclass(frozen=True)
class Value:
    sort: Sort
    value: Union[int, bool]

    def __str__(self):
        if self.sort is Sort.BOOL:
            return 'true' if self.value else 'false'
        return str(self.value)


def canonical_value(sort: Sort) -> Value:
    """ The smallest literal of a sort """
    if sort is Sort.BOOL:
        return Value(Sort.BOOL, False)
    return Value(sort, 0)


class Branch(NamedTuple):
    label: int
    sort: Sort
    cont: object


def branch_tuple(branches) -> Tuple[Branch, ...]:
    """ Normalise an iterable of (label, sort, cont) triples into a label-sorted tuple """
    return tuple(sorted((Branch(*b) for b in branches), key=lambda b: b.label))


class SynGlobal:
    """ Finite syntax of global types; de Bruijn indices for recursion variables """
    pass


@dataclass(frozen=True)
class GEnd(SynGlobal):
    pass


@dataclass(frozen=True)
class GVar(SynGlobal):
    index: int
    name: str = field(default='X', compare=False)


@dataclass(frozen=True)
class GRec(SynGlobal):
    body: SynGlobal
    name: str = field(default='X', compare=False)


@dataclass(frozen=True)
class GComm(SynGlobal):
    sender: Participant
    receiver: Participant
    branches: Tuple[Branch, ...]


class SynLocal:
    """ Finite syntax of local types """
    pass


@dataclass(frozen=True)
class LEnd(SynLocal):
    pass


@dataclass(frozen=True)
class LVar(SynLocal):
    index: int
    name: str = field(default='X', compare=False)


@dataclass(frozen=True)
class LRec(SynLocal):
    body: SynLocal
    name: str = field(default='X', compare=False)


@dataclass(frozen=True)
class LRecv(SynLocal):
    peer: Participant
    branches: Tuple[Branch, ...]


@dataclass(frozen=True)
class LSend(SynLocal):
    peer: Participant
    branches: Tuple[Branch, ...]


SynType = Union[SynGlobal, SynLocal]


def unfold_syntax(term: SynType) -> SynType:
    """Unfold top-level recursion until a communication or end is exposed.

    Args:
        term (SynType): Closed, guarded type.

    Returns:
        SynType: Term whose head is not a binder.
    """
    while isinstance(term, (GRec, LRec)):
        term = substitute_type(term.body, term)
    return term


def substitute_type(term: SynType, replacement: SynType, index: int = 0) -> SynType:
    """ Replace variable `index` by the closed term `replacement` """
    if isinstance(term, (GVar, LVar)):
        return replacement if term.index == index else term
    if isinstance(term, GRec):
        return GRec(substitute_type(term.body, replacement, index + 1), term.name)
    if isinstance(term, LRec):
        return LRec(substitute_type(term.body, replacement, index + 1), term.name)
    if isinstance(term, GComm):
        return GComm(term.sender, term.receiver, _subst_branches(term.branches, replacement, index))
    if isinstance(term, (LSend, LRecv)):
        return type(term)(term.peer, _subst_branches(term.branches, replacement, index))
    return term


def _subst_branches(branches, replacement, index):
    return tuple(Branch(b.label, b.sort, substitute_type(b.cont, replacement, index)) for b in branches)
