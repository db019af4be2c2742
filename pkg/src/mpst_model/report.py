# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import hashlib
import json
from typing import Any, Dict, Iterable, List, Optional

from .__meta__ import __version__
from .equirec.dot import labelled_graph, to_dot
from .limits import REPORT_SCHEMA_VERSION
from .lts.environment import StateGraph
from .properties.lasso import Lasso
from .properties.verdict import Verdict
from .syntax.render import render


def file_digest(path: str) -> str:
    with open(path, 'rb') as source:
        return hashlib.sha256(source.read()).hexdigest()


def describe(value) -> Any:
    """ JSON-friendly rendering of states, labels, lassos and paths """
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, Lasso):
        return {'prefix': [_position(p) for p in value.prefix], 'cycle': [_position(p) for p in value.cycle]}
    if isinstance(value, (list, tuple)):
        return [describe(v) for v in value]
    if isinstance(value, dict):
        return {str(k): describe(v) for k, v in value.items()}
    try:
        return one_line(value)
    except TypeError:
        return str(value)


def one_line(value) -> str:
    """ DSL text of a value with environment entries separated by semicolons """
    return '; '.join(render(value).splitlines())


def _position(position) -> Dict[str, Any]:
    state, label = position
    return {'state': describe(state), 'label': None if label is None else str(label)}


def verdict_dict(verdict: Verdict) -> Dict[str, Any]:
    result = {'holds': verdict.holds, 'stats': describe(verdict.stats)}
    if not verdict.holds:
        result['reason'] = verdict.reason
        result['counterexample'] = describe(verdict.counterexample)
        result['path'] = [_position(p) for p in verdict.path]
    return result


class Report:
    def __init__(self, command: str, inputs: Optional[Iterable[str]] = None):
        """Report

        Result of one command: verdicts or outputs, plus digests of the input files so that
        reports of identical runs are byte-identical.

        Args:
            command (str): Subcommand name.
            inputs (Iterable[str], optional): Input file paths.
        """
        self.command = command
        self.inputs = {path: file_digest(path) for path in (inputs or [])}
        self.results: List[Dict[str, Any]] = []

    def add(self, name: str, **fields):
        self.results.append({'name': name, **{k: describe(v) for k, v in fields.items()}})

    def add_verdict(self, name: str, verdict: Verdict):
        self.results.append({'name': name, **verdict_dict(verdict)})

    @property
    def holds(self) -> bool:
        return all(r.get('holds', True) for r in self.results)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema': REPORT_SCHEMA_VERSION,
            'tool': 'mpst-model',
            'version': __version__,
            'command': self.command,
            'inputs': self.inputs,
            'holds': self.holds,
            'results': self.results,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = []
        for result in self.results:
            fields = {k: v for k, v in result.items() if k != 'name'}
            if set(fields) == {'output'}:
                lines.append(str(fields['output']))
                continue
            status = '' if 'holds' not in fields else (' holds' if fields['holds'] else ' FAILS')
            lines.append(f'{result["name"]}:{status}')
            if fields.get('reason'):
                lines.append(f'  reason: {fields["reason"]}')
            if 'counterexample' in fields:
                lines.append('  counterexample: ' + json.dumps(fields['counterexample'], sort_keys=True))
        return '\n'.join(lines)


def lasso_edges(lasso: Lasso) -> set:
    positions = lasso.positions
    edges = set()
    for i, (state, label) in enumerate(positions):
        if label is None:
            continue
        target = positions[i + 1][0] if i + 1 < len(positions) else lasso.cycle[0][0]
        edges.add((state, label, target))
    return edges


def state_graph_dot(graph: StateGraph, lasso: Optional[Lasso] = None) -> str:
    """ DOT text of an environment state graph, with the edges of `lasso` in red """
    highlight = lasso_edges(lasso) if lasso is not None else set()
    display = labelled_graph(graph.edges(), one_line, str, highlight=highlight, initial=graph.initial)
    return to_dot(display)
