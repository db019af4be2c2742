# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from typing import Callable, FrozenSet, Hashable, List, Optional, Sequence, Tuple

from ..lts.environment import comm_pairs, env_transitions, requests
from ..lts.labels import Comm

Position = Tuple[Hashable, Optional[Comm]]


class Lasso:
    """Finite prefix followed by a cycle repeated forever.

    Each position holds a state and the label of the edge leaving it; the edge of the last cycle
    position returns to the first cycle state. A terminal state is represented by a one-position
    cycle whose label is None (stuttering).
    """

    def __init__(self, prefix: Sequence[Position], cycle: Sequence[Position]):
        if not cycle:
            raise ValueError('a lasso needs a non-empty cycle')
        self.prefix: List[Position] = list(prefix)
        self.cycle: List[Position] = list(cycle)

    @classmethod
    def stutter(cls, prefix: Sequence[Position], state: Hashable) -> 'Lasso':
        return cls(prefix, [(state, None)])

    @property
    def positions(self) -> List[Position]:
        return self.prefix + self.cycle

    @property
    def is_stutter(self) -> bool:
        return len(self.cycle) == 1 and self.cycle[0][1] is None

    def cycle_pairs(self) -> FrozenSet:
        return frozenset(label.pair for _, label in self.cycle if label is not None)

    def labels(self) -> List[Optional[Comm]]:
        return [label for _, label in self.positions]

    def validate(self, transitions: Callable = env_transitions) -> bool:
        """ Check that consecutive positions are connected by transitions of the LTS """
        positions = self.positions
        for i, (state, label) in enumerate(positions):
            following = positions[i + 1][0] if i + 1 < len(positions) else self.cycle[0][0]
            if label is None:
                if i != len(positions) - 1 or not self.is_stutter or following != state or transitions(state):
                    return False
            elif (label, following) not in list(transitions(state)):
                return False
        return True

    def __len__(self) -> int:
        return len(self.prefix) + len(self.cycle)

    def __repr__(self):
        return f'Lasso(prefix={[str(lbl) for _, lbl in self.prefix]}, cycle={[str(lbl) for _, lbl in self.cycle]})'


def lasso_eventually(pred: Callable[[Hashable, Optional[Comm]], bool], lasso: Lasso, start: int = 0) -> bool:
    """Whether `pred` holds at some position at or after `start`.

    Positions past the prefix wrap around the cycle, so the prefix tail and one full cycle
    cover every later position.
    """
    if start >= len(lasso.prefix):
        candidates = lasso.cycle
    else:
        candidates = lasso.prefix[start:] + lasso.cycle
    return any(pred(state, label) for state, label in candidates)


def lasso_always(pred: Callable[[Hashable, Optional[Comm]], bool], lasso: Lasso) -> bool:
    return all(pred(state, label) for state, label in lasso.positions)


def _answered(lasso: Lasso, demanded: Callable[[Hashable], FrozenSet]) -> bool:
    """ Every pair demanded at a position fires at that position or later """
    on_cycle = lasso.cycle_pairs()
    if any(not demanded(state) <= on_cycle for state, _ in lasso.cycle):
        return False
    later = set(on_cycle)
    for state, label in reversed(lasso.prefix):
        if label is not None:
            later.add(label.pair)
        if not demanded(state) <= later:
            return False
    return True


def lasso_fair(lasso: Lasso, enabled_pairs: Callable[[Hashable], FrozenSet] = comm_pairs) -> bool:
    """ Every communication enabled at a position is later performed by the same pair """
    return _answered(lasso, enabled_pairs)


def lasso_live(lasso: Lasso, pending: Callable[[Hashable], FrozenSet] = requests) -> bool:
    """ Every enabled send or receive is later answered by a communication of its pair """
    return _answered(lasso, pending)
