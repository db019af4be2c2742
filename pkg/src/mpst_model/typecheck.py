# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import logging
from typing import Mapping, Optional, Tuple

from .equirec.arena import Tag, TreeHandle, unfold_head
from .errors import (DomainMismatch, HeadMismatch, MissingLabel, MpstException, NoUpperBound, NotAssociated,
                     SortError, SortMismatch, TypingError, UnboundVariable, UnexpectedEnd)
from .projection import TypeEnv, check_association
from .properties.verdict import Verdict
from .subtyping import lub, subsort, subtype
from .syntax.processes import (Choice, EVar, Expr, Inact, Lit, Neg, Not, PIte, PRec, PRecv, PSend, PVar, Process,
                               SessionForm, Succ)
from .syntax.render import render, render_expr
from .syntax.terms import NUMERIC_SORTS, Sort

logger = logging.getLogger(__name__)


class TypingCtx:
    def __init__(self, exprs: Optional[Mapping[str, Sort]] = None, procs: Tuple[TreeHandle, ...] = ()):
        """Typing Context

        Args:
            exprs (Mapping[str, Sort], optional): Sorts of expression variables.
            procs (Tuple[TreeHandle, ...], optional): Types of the enclosing recursion binders,
                innermost first.
        """
        self.exprs = dict(exprs or {})
        self.procs = procs

    def bind(self, name: str, sort: Sort) -> 'TypingCtx':
        return TypingCtx({**self.exprs, name: sort}, self.procs)

    def push(self, t: TreeHandle) -> 'TypingCtx':
        return TypingCtx(self.exprs, (t,) + self.procs)

    def sort_of(self, name: str) -> Sort:
        if name not in self.exprs:
            raise UnboundVariable(name)
        return self.exprs[name]

    def proc_var(self, index: int) -> TreeHandle:
        return self.procs[index]


def sort_of_expr(ctx: Optional[TypingCtx], e: Expr) -> Sort:
    """Minimal sort of an expression.

    Args:
        ctx (TypingCtx, optional): Sorts of the free variables.
        e (Expr): Expression.

    Raises:
        UnboundVariable: A free variable has no sort.
        SortError: An operator is applied to an operand of the wrong sort.
        NoUpperBound: The operands of a choice have no common sort.

    Returns:
        Sort: The sort; a choice has the least upper bound of its operand sorts.
    """
    ctx = ctx or TypingCtx()
    if isinstance(e, Lit):
        return e.value.sort
    if isinstance(e, EVar):
        return ctx.sort_of(e.name)
    if isinstance(e, Choice):
        left, right = sort_of_expr(ctx, e.left), sort_of_expr(ctx, e.right)
        joined = lub(left, right)
        if joined is None:
            raise NoUpperBound(left, right)
        return joined
    arg = sort_of_expr(ctx, e.arg)
    if isinstance(e, Succ) and arg in NUMERIC_SORTS:
        return arg
    if isinstance(e, Neg) and arg in NUMERIC_SORTS:
        return Sort.INT
    if isinstance(e, Not) and arg is Sort.BOOL:
        return Sort.BOOL
    raise SortError(f'{type(e).__name__.lower()} applied to {arg.value}')


def _prefix(p: Process) -> str:
    if isinstance(p, Inact):
        return 'inaction'
    if isinstance(p, PSend):
        return f'send to {p.peer}'
    if isinstance(p, PRecv):
        return f'receive from {p.peer}'
    if isinstance(p, PIte):
        return f'conditional on {render_expr(p.cond)}'
    if isinstance(p, PVar):
        return f'recursion variable {p.name}'
    return 'recursion'


def _expect(t: TreeHandle, tag: Tag, p: Process, peer=None):
    head = unfold_head(t)
    if head.tag is Tag.END and tag is not Tag.END:
        raise UnexpectedEnd(f'{_prefix(p)} where the type has ended')
    if head.tag is not tag or (peer is not None and head.peer != peer):
        raise HeadMismatch(render(t), _prefix(p))
    return head


class _RuleFailure(Exception):
    """ Carries the first failing rule instance out of the recursive check """

    def __init__(self, error: MpstException, p: Process):
        super().__init__(str(error))
        self.error = error
        self.process = p

    @property
    def rule(self) -> str:
        return self.error.rule if isinstance(self.error, TypingError) else 't-expr'


def _check(ctx: TypingCtx, p: Process, t: TreeHandle):
    try:
        _apply_rule(ctx, p, t)
    except (TypingError, SortError, UnboundVariable) as e:
        raise _RuleFailure(e, p) from e


def _apply_rule(ctx: TypingCtx, p: Process, t: TreeHandle):
    if isinstance(p, Inact):
        _expect(t, Tag.END, p)
    elif isinstance(p, PSend):
        head = _expect(t, Tag.SEND, p, p.peer)
        if p.label not in head.branches:
            raise MissingLabel(p.label)
        expected, cont = head.branches[p.label]
        found = sort_of_expr(ctx, p.expr)
        if not subsort(found, expected):
            raise SortMismatch(expected, found)
        _check(ctx, p.cont, cont)
    elif isinstance(p, PRecv):
        head = _expect(t, Tag.RECV, p, p.peer)
        for label in sorted(head.labels):
            branch = p.branch(label)
            if branch is None:
                raise MissingLabel(label)
            srt, cont = head.branches[label]
            _check(ctx.bind(branch.var, srt), branch.cont, cont)
    elif isinstance(p, PIte):
        found = sort_of_expr(ctx, p.cond)
        if found is not Sort.BOOL:
            raise SortMismatch(Sort.BOOL, found)
        _check(ctx, p.then, t)
        _check(ctx, p.orelse, t)
    elif isinstance(p, PRec):
        _check(ctx.push(t), p.body, t)
    elif isinstance(p, PVar):
        assumed = ctx.proc_var(p.index)
        if not subtype(assumed, t):
            raise HeadMismatch(render(t), render(assumed))
    else:
        raise TypeError(f'not a process: {p!r}')


def check_process(ctx: Optional[TypingCtx], p: Process, t: TreeHandle) -> Verdict:
    """Check a process against a local type, with subsumption folded into the rules.

    A send may pick any label of the type with a payload of a smaller sort; a receive must
    handle every label of the type and may handle more. A recursion binder is typed at the type
    it is checked against, and its variable at any supertype of that type.

    Args:
        ctx (TypingCtx, optional): Context of free expression and process variables.
        p (Process): Process.
        t (TreeHandle): Expected local type.

    Returns:
        Verdict: On failure `reason` names the violated rule and `counterexample` is the message.
        The stats give the rule, the process it failed at and, for parsed processes, the `line`
        and `column` where that process starts.
    """
    try:
        _check(ctx or TypingCtx(), p, t)
    except _RuleFailure as failure:
        stats = {'rule': failure.rule, 'at': _prefix(failure.process)}
        message = str(failure.error)
        if failure.process.span is not None:
            line, column = failure.process.span
            stats.update(line=line, column=column)
            message = f'{message} at line {line}, column {column}'
        return Verdict(False, counterexample=message, reason=failure.rule, stats=stats)
    return Verdict(True)


def check_session(m: SessionForm, env: TypeEnv, g: TreeHandle, check_balance: bool = True) -> Verdict:
    """Type a session against an environment associated with a global type.

    Args:
        m (SessionForm): Session.
        env (TypeEnv): Environment giving each participant its type.
        g (TreeHandle): Global type `env` must be associated with.
        check_balance (bool, optional): Require `g` to be balanced.

    Raises:
        PreconditionViolation: `g` is unbalanced (when checked) or not projectable.

    Returns:
        Verdict: On failure `counterexample` is (participant, message), with participant None for
        association and domain failures.
    """
    association = check_association(env, g, check_balance)
    if not association:
        failure = association.failures()[0]
        error: MpstException = NotAssociated(f'{failure.participant}: {failure.reason}')
        return Verdict(False, counterexample=(None, str(error)), reason=error.rule)
    missing = [p for p in env if p not in m]
    extra = [p for p in m if p not in env]
    if missing or extra:
        error = DomainMismatch(missing, extra)
        return Verdict(False, counterexample=(None, str(error)), reason=error.rule)
    for p, proc in m.items():
        verdict = check_process(TypingCtx(), proc, env[p])
        if not verdict:
            logger.debug('process of %s rejected by %s', p, verdict.reason)
            return Verdict(False, counterexample=(p, verdict.counterexample), reason=verdict.reason,
                           stats=verdict.stats)
    return Verdict(True, stats={'participants': len(m)})
