# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from typing import Any, Dict, List, Optional, Tuple


class Verdict:
    def __init__(self, holds: bool, counterexample: Any = None, stats: Optional[Dict[str, Any]] = None,
                 reason: Optional[str] = None, path: Optional[List[Tuple[Any, Any]]] = None):
        """Verdict

        Args:
            holds (bool): Whether the property holds.
            counterexample (optional): Lasso, state or failing item refuting the property.
            stats (Dict[str, Any], optional): Exploration statistics.
            reason (str, optional): Human-readable cause of a failure.
            path (List[Tuple[Any, Any]], optional): (state, label) steps from the initial state to
                the start of the counterexample.
        """
        self.holds = holds
        self.counterexample = counterexample
        self.stats = stats or {}
        self.reason = reason
        self.path = path or []

    def __bool__(self):
        return self.holds

    def __repr__(self):
        outcome = 'holds' if self.holds else f'fails ({self.reason})'
        return f'Verdict({outcome})'
