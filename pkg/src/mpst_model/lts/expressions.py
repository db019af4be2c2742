# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from typing import FrozenSet, Mapping, Optional

from ..errors import NoUpperBound, SortError, UnboundVariable
from ..subtyping import lub
from ..syntax.processes import Choice, EVar, Expr, Lit, Neg, Not, Succ
from ..syntax.terms import NUMERIC_SORTS, Sort, Value


def eval_expr(e: Expr, bindings: Optional[Mapping[str, Value]] = None) -> FrozenSet[Value]:
    """Evaluate an expression to the set of values it may produce.

    Args:
        e (Expr): Expression.
        bindings (Mapping[str, Value], optional): Values of the free variables.

    Raises:
        UnboundVariable: A free variable has no binding.
        SortError: An operator is applied to an operand of the wrong sort.

    Returns:
        FrozenSet[Value]: Possible values; a singleton unless `e` contains a choice.
    """
    bindings = bindings or {}
    if isinstance(e, Lit):
        return frozenset([e.value])
    if isinstance(e, EVar):
        if e.name not in bindings:
            raise UnboundVariable(e.name)
        return frozenset([bindings[e.name]])
    if isinstance(e, Choice):
        left = eval_expr(e.left, bindings)
        right = eval_expr(e.right, bindings)
        target = None
        for v in left | right:
            if target is None:
                target = v.sort
                continue
            joined = lub(target, v.sort)
            if joined is None:
                raise NoUpperBound(target, v.sort)
            target = joined
        return frozenset(Value(target, v.value) for v in left | right)
    values = eval_expr(e.arg, bindings)
    if isinstance(e, Succ):
        _require(values, NUMERIC_SORTS, 'succ')
        return frozenset(Value(v.sort, v.value + 1) for v in values)
    if isinstance(e, Neg):
        _require(values, NUMERIC_SORTS, 'neg')
        return frozenset(Value(Sort.INT, -v.value) for v in values)
    if isinstance(e, Not):
        _require(values, (Sort.BOOL,), 'not')
        return frozenset(Value(Sort.BOOL, not v.value) for v in values)
    raise TypeError(f'not an expression: {e!r}')


def _require(values, sorts, operator: str):
    for v in values:
        if v.sort not in sorts:
            raise SortError(f'{operator} applied to {v.sort.value}')
