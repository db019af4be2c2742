# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import logging
from functools import lru_cache
from itertools import product
from typing import List, Tuple

from ..errors import MpstException
from ..limits import DEFAULT_UNFOLD_STEPS, PROCESS_CACHE_SIZE
from ..syntax.processes import (PIte, PRec, PRecv, PSend, Process, SessionForm, free_expr_vars, substitute_value,
                                unfold_rec)
from ..syntax.render import render, render_expr
from ..syntax.terms import Sort, canonical_value
from .expressions import eval_expr
from .labels import Comm

logger = logging.getLogger(__name__)


class Unfoldings(frozenset):
    """ Set of forms reachable by internal steps; `truncated` is set when the step bound was hit """

    def __new__(cls, forms=(), truncated: bool = False):
        obj = super().__new__(cls, forms)
        obj.truncated = truncated
        return obj


def internal_steps(p: Process) -> List[Process]:
    """ Single internal steps at the head of a process: recursion unfolding, conditional choice """
    if isinstance(p, PRec):
        return [unfold_rec(p)]
    if isinstance(p, PIte):
        try:
            values = eval_expr(p.cond)
        except MpstException as e:
            logger.debug('conditional on %s is stuck: %s', render_expr(p.cond), e)
            return []
        result = []
        for v in sorted(values, key=lambda v: v.value):
            if v.sort is Sort.BOOL:
                result.append(p.then if v.value else p.orelse)
        return result
    return []


@lru_cache(maxsize=PROCESS_CACHE_SIZE)
def process_unfoldings(p: Process, max_steps: int = DEFAULT_UNFOLD_STEPS) -> Tuple[Tuple[Process, ...], bool]:
    """Closure of a single process under internal steps.

    Args:
        p (Process): Process.
        max_steps (int, optional): Bound on the length of internal step chains.

    Returns:
        Tuple[Tuple[Process, ...], bool]: Reachable processes in discovery order, and whether the
        bound cut the closure.
    """
    seen = {p: None}
    frontier = [p]
    truncated = False
    for _ in range(max_steps):
        nxt = []
        for q in frontier:
            for r in internal_steps(q):
                if r not in seen:
                    seen[r] = None
                    nxt.append(r)
        frontier = nxt
        if not frontier:
            break
    else:
        truncated = any(internal_steps(q) for q in frontier)
    return tuple(seen), truncated


def session_unfold(m: SessionForm, max_steps: int = DEFAULT_UNFOLD_STEPS) -> Unfoldings:
    """All sessions reachable from `m` by internal steps, including `m` itself.

    Internal steps of different participants are independent, so the closure is the product of
    the per-participant closures.

    Args:
        m (SessionForm): Session.
        max_steps (int, optional): Bound on internal step chains per participant.

    Returns:
        Unfoldings: The reachable forms.
    """
    participants = m.participants
    closures = [process_unfoldings(proc, max_steps) for _, proc in m.items()]
    truncated = any(t for _, t in closures)
    if truncated:
        logger.warning('unfolding of %s truncated after %d steps', render(m), max_steps)
    forms = (SessionForm(dict(zip(participants, combo))) for combo in product(*(c for c, _ in closures)))
    return Unfoldings(forms, truncated)


def _guard_uses(p: Process, name: str) -> bool:
    """ Whether a free occurrence of `name` appears in a conditional guard of `p` """
    if isinstance(p, PIte):
        return (name in free_expr_vars(p.cond) or _guard_uses(p.then, name) or _guard_uses(p.orelse, name))
    if isinstance(p, PRec):
        return _guard_uses(p.body, name)
    if isinstance(p, PSend):
        return _guard_uses(p.cont, name)
    if isinstance(p, PRecv):
        return any(b.var != name and _guard_uses(b.cont, name) for b in p.branches)
    return False


def _form_key(form: SessionForm) -> str:
    return render(form)


def session_enabled(m: SessionForm, abstract_values: bool = False,
                    max_steps: int = DEFAULT_UNFOLD_STEPS) -> List[Tuple[Comm, SessionForm]]:
    """Communications a session can perform, up to unfolding.

    A sender unfolded to a send towards the receiver meets the receiver unfolded to a receive
    from the sender offering the same label; every value of the payload is substituted into the
    chosen branch.

    Args:
        m (SessionForm): Session.
        abstract_values (bool, optional): Replace received values by the canonical value of their
            sort unless the bound name reaches a conditional guard. Defaults to False.
        max_steps (int, optional): Bound on internal step chains.

    Returns:
        List[Tuple[Comm, SessionForm]]: Distinct (label, reduct) pairs in a deterministic order.
    """
    unfolded = {p: process_unfoldings(proc, max_steps)[0] for p, proc in m.items()}
    results = set()
    for sender, receiver in product(m.participants, repeat=2):
        if sender == receiver:
            continue
        sends = [q for q in unfolded[sender] if isinstance(q, PSend) and q.peer == receiver]
        if not sends:
            continue
        receives = [q for q in unfolded[receiver] if isinstance(q, PRecv) and q.peer == sender]
        for send in sends:
            try:
                values = eval_expr(send.expr)
            except MpstException:
                continue
            for recv in receives:
                branch = recv.branch(send.label)
                if branch is None:
                    continue
                for v in values:
                    if abstract_values and not _guard_uses(branch.cont, branch.var):
                        v = canonical_value(v.sort)
                    after = substitute_value(branch.cont, branch.var, v)
                    results.add((Comm(sender, receiver, send.label), m.replace({sender: send.cont, receiver: after})))
    return sorted(results, key=lambda t: (t[0].sort_key(), _form_key(t[1])))


def session_step(m: SessionForm, label: Comm, closed: bool = False,
                 abstract_values: bool = False) -> List[SessionForm]:
    """Reducts of `m` by one communication.

    Args:
        m (SessionForm): Session.
        label (Comm): Communication to perform.
        closed (bool, optional): Also include every unfolding of each reduct. Defaults to False.
        abstract_values (bool, optional): See `session_enabled`.

    Returns:
        List[SessionForm]: The reducts.
    """
    reducts = [form for a, form in session_enabled(m, abstract_values) if a == label]
    if not closed:
        return reducts
    result = {}
    for form in reducts:
        for unfolded in sorted(session_unfold(form), key=_form_key):
            result.setdefault(unfolded, None)
    return list(result)
