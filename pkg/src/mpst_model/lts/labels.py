# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from dataclasses import dataclass
from typing import FrozenSet, Tuple

from ..syntax.terms import Participant, Sort


class ActionLabel:
    """ Transition label of a type environment """

    @property
    def subjects(self) -> FrozenSet[Participant]:
        raise NotImplementedError


@dataclass(frozen=True)
class Send(ActionLabel):
    """ `subject` sends label `label` with a payload of sort `sort` to `peer` """
    subject: Participant
    peer: Participant
    label: int
    sort: Sort

    @property
    def subjects(self):
        return frozenset([self.subject])

    def __str__(self):
        return f'{self.subject}{self.peer}!l{self.label}({self.sort.value})'


@dataclass(frozen=True)
class Recv(ActionLabel):
    """ `subject` receives label `label` with a payload of sort `sort` from `peer` """
    subject: Participant
    peer: Participant
    label: int
    sort: Sort

    @property
    def subjects(self):
        return frozenset([self.subject])

    def __str__(self):
        return f'{self.subject}{self.peer}?l{self.label}({self.sort.value})'


@dataclass(frozen=True)
class Comm(ActionLabel):
    """ Synchronised communication; sender first """
    sender: Participant
    receiver: Participant
    label: int

    @property
    def subjects(self):
        return frozenset([self.sender, self.receiver])

    @property
    def pair(self) -> Tuple[Participant, Participant]:
        return (self.sender, self.receiver)

    def sort_key(self) -> Tuple[int, int, int]:
        return (self.sender.id, self.receiver.id, self.label)

    def __str__(self):
        return f'({self.sender},{self.receiver})l{self.label}'


def pair_str(pair) -> str:
    return f'({pair[0]},{pair[1]})'
