# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import logging
from typing import Optional, Tuple

from .equirec.arena import Tag, TreeHandle, TreeKind, unfold_head
from .errors import KindMismatch
from .limits import product_depth
from .syntax.terms import Sort

logger = logging.getLogger(__name__)


def subsort(a: Sort, b: Sort) -> bool:
    """ Least reflexive relation with nat <= int """
    return a is b or (a is Sort.NAT and b is Sort.INT)


def lub(a: Sort, b: Sort) -> Optional[Sort]:
    """ Least upper bound under subsort, or None """
    if subsort(a, b):
        return b
    if subsort(b, a):
        return a
    return None


def _check_local(*handles: TreeHandle):
    for h in handles:
        if h.kind is not TreeKind.LOCAL:
            raise KindMismatch('subtyping is defined on local trees')


def _local_step(a: TreeHandle, b: TreeHandle):
    """Apply the subtyping rule matching the heads of `a` and `b`.

    Returns:
        list of demanded child pairs, or None when no rule applies.
    """
    ha, hb = unfold_head(a), unfold_head(b)
    if ha.tag is Tag.END and hb.tag is Tag.END:
        return []
    if ha.tag is not hb.tag or ha.tag is Tag.END or ha.peer != hb.peer:
        return None
    demanded = []
    if ha.tag is Tag.SEND:
        # fewer choices, narrower payloads
        if not ha.labels <= hb.labels:
            return None
        for lbl, (srt, child) in ha.branches.items():
            super_sort, super_child = hb.branches[lbl]
            if not subsort(srt, super_sort):
                return None
            demanded.append((child, super_child))
    else:
        # more accepted labels, wider payloads
        if not hb.labels <= ha.labels:
            return None
        for lbl, (super_sort, super_child) in hb.branches.items():
            srt, child = ha.branches[lbl]
            if not subsort(super_sort, srt):
                return None
            demanded.append((child, super_child))
    return demanded


def subtype_witness(a: TreeHandle, b: TreeHandle) -> Optional[Tuple[TreeHandle, TreeHandle]]:
    """Search for a reachable pair of subtrees where no subtyping rule applies.

    Args:
        a (TreeHandle): Candidate subtype.
        b (TreeHandle): Candidate supertype.

    Returns:
        Optional[Tuple[TreeHandle, TreeHandle]]: The failing pair, or None if `a` is a subtype of `b`.
    """
    _check_local(a, b)
    assumed = set()
    stack = [(a, b)]
    while stack:
        pair = stack.pop()
        if pair in assumed:
            continue
        assumed.add(pair)
        demanded = _local_step(*pair)
        if demanded is None:
            logger.debug('subtyping fails at %r <= %r', *pair)
            return pair
        stack.extend(demanded)
    return None


def subtype(a: TreeHandle, b: TreeHandle) -> bool:
    """Decide the coinductive subtyping relation on local trees.

    The explored pairs form a simulation exactly when every one of them matches a rule, so the
    greatest fixpoint is decided by exploring the finite pair graph once.

    Args:
        a (TreeHandle): Candidate subtype.
        b (TreeHandle): Candidate supertype.

    Returns:
        bool: True iff `a` is a subtype of `b`.
    """
    return subtype_witness(a, b) is None


def subtype_to_depth(a: TreeHandle, b: TreeHandle, depth: int, memo: Optional[dict] = None) -> bool:
    """ Inductive approximation: check rules down to `depth`, accepting whatever lies below """
    if depth == 0:
        return True
    memo = {} if memo is None else memo
    key = (a, b, depth)
    if key not in memo:
        demanded = _local_step(a, b)
        memo[key] = demanded is not None and all(subtype_to_depth(x, y, depth - 1, memo) for x, y in demanded)
    return memo[key]


def subtype_oracle(a: TreeHandle, b: TreeHandle) -> bool:
    """ Inductive check unrolled past the size of the pair graph """
    _check_local(a, b)
    depth = product_depth(len(a.arena.reachable(a)), len(b.arena.reachable(b)))
    return subtype_to_depth(a, b, depth)
