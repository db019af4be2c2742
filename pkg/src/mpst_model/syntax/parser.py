# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import logging
import re
from typing import Optional, Tuple

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedEOF, UnexpectedInput, VisitError

from ..errors import DslSyntaxError, DuplicateParticipant, UnboundName
from .processes import (Choice, EnvForm, EVar, Inact, Lit, Neg, Not, PIte, PRec, PRecv, PSend, PVar,
                        RecvBranch, SessionForm, Span, Succ)
from .terms import (Branch, GComm, GEnd, GRec, GVar, LEnd, LRec, LRecv, LSend, LVar, ParticipantTable,
                    Sort, Value, branch_tuple, default_participants)
from .validate import validate_process, validate_session, validate_type

logger = logging.getLogger(__name__)

KINDS = ('global', 'local', 'process', 'session', 'env')
LABEL = re.compile(r'l([0-9]+)')

GRAMMAR = r"""
    global_type: "end"                                   -> g_end
               | NAME                                    -> g_var
               | "rec" NAME "." global_type              -> g_rec
               | NAME "->" NAME "{" g_branches "}"       -> g_comm
    g_branches: (g_branch ("," g_branch)*)?
    g_branch: NAME "(" sort ")" "." global_type

    local_type: "end"                                    -> l_end
              | NAME                                     -> l_var
              | "rec" NAME "." local_type                -> l_rec
              | NAME "&" "{" l_branches "}"              -> l_recv
              | NAME "(+)" "{" l_branches "}"            -> l_send
    l_branches: (l_branch ("," l_branch)*)?
    l_branch: NAME "(" sort ")" "." local_type

    sort: "nat"  -> sort_nat
        | "int"  -> sort_int
        | "bool" -> sort_bool

    process: NUMBER                                      -> p_inact
           | NAME                                        -> p_var
           | ("mu" | "rec") NAME "." process             -> p_rec
           | NAME "!" NAME "(" expr ")" "." process      -> p_send
           | NAME "?" "{" r_branches "}"                 -> p_recv
           | "if" expr "then" process "else" process     -> p_ite
    r_branches: (r_branch ("," r_branch)*)?
    r_branch: NAME "(" NAME ")" "." process

    ?expr: choice
    ?choice: unary
           | choice "(+)" unary                          -> e_choice
    ?unary: "succ" "(" expr ")"                          -> e_succ
          | "neg" "(" expr ")"                           -> e_neg
          | "not" "(" expr ")"                           -> e_not
          | atom
    ?atom: NUMBER                                        -> e_nat
         | "int" "(" NUMBER ")"                          -> e_int
         | "-" NUMBER                                    -> e_negint
         | "true"                                        -> e_true
         | "false"                                       -> e_false
         | NAME                                          -> e_var
         | "(" expr ")"

    session: (s_entry ("||" s_entry)*)?
    s_entry: NAME "<|" process

    env: env_entry*
    env_entry: NAME ":" local_type ";"?

    NAME: /[A-Za-z_][A-Za-z0-9_']*/
    NUMBER: /[0-9]+/
    COMMENT: /\/\/[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

_START = {
    'global': 'global_type',
    'local': 'local_type',
    'process': 'process',
    'session': 'session',
    'env': 'env',
}

_parser = Lark(GRAMMAR, parser='lalr', start=list(_START.values()), propagate_positions=True)


class _Named:
    """ Placeholder for a variable before name resolution """

    def __init__(self, name: str, span: Optional[Span] = None):
        self.name = name
        self.span = span


def _span(meta) -> Span:
    return meta.line, meta.column


class _ToTerms(Transformer):
    def __init__(self, table: ParticipantTable):
        super().__init__()
        self.table = table

    def _participant(self, token):
        return self.table.get(str(token))

    # Sorts and labels
    def sort_nat(self, _):
        return Sort.NAT

    def sort_int(self, _):
        return Sort.INT

    def sort_bool(self, _):
        return Sort.BOOL

    @staticmethod
    def _label(token) -> int:
        # labels share the NAME terminal and are told apart by position
        match = LABEL.fullmatch(str(token))
        if match is None:
            raise DslSyntaxError(f'expected a label l<n>, found {str(token)!r}', token.line, token.column)
        return int(match.group(1))

    # Global types
    def g_end(self, _):
        return GEnd()

    def g_var(self, children):
        return _Named(str(children[0]))

    def g_rec(self, children):
        return ('grec', str(children[0]), children[1])

    def g_branch(self, children):
        return (self._label(children[0]), children[1], children[2])

    def g_branches(self, children):
        return list(children)

    def g_comm(self, children):
        return ('gcomm', self._participant(children[0]), self._participant(children[1]), children[2])

    # Local types
    def l_end(self, _):
        return LEnd()

    def l_var(self, children):
        return _Named(str(children[0]))

    def l_rec(self, children):
        return ('lrec', str(children[0]), children[1])

    def l_branch(self, children):
        return (self._label(children[0]), children[1], children[2])

    def l_branches(self, children):
        return list(children)

    def l_recv(self, children):
        return ('lrecv', self._participant(children[0]), children[1])

    def l_send(self, children):
        return ('lsend', self._participant(children[0]), children[1])

    # Expressions
    def e_nat(self, children):
        return Lit(Value(Sort.NAT, int(children[0])))

    def e_int(self, children):
        return Lit(Value(Sort.INT, int(children[0])))

    def e_negint(self, children):
        return Lit(Value(Sort.INT, -int(children[0])))

    def e_true(self, _):
        return Lit(Value(Sort.BOOL, True))

    def e_false(self, _):
        return Lit(Value(Sort.BOOL, False))

    def e_var(self, children):
        return EVar(str(children[0]))

    def e_succ(self, children):
        return Succ(children[0])

    def e_neg(self, children):
        return Neg(children[0])

    def e_not(self, children):
        return Not(children[0])

    def e_choice(self, children):
        return Choice(children[0], children[1])

    # Processes
    @v_args(meta=True)
    def p_inact(self, meta, children):
        if str(children[0]) != '0':
            raise DslSyntaxError(f'unexpected number {children[0]} in process position',
                                 children[0].line, children[0].column)
        return Inact(span=_span(meta))

    @v_args(meta=True)
    def p_var(self, meta, children):
        return _Named(str(children[0]), _span(meta))

    @v_args(meta=True)
    def p_rec(self, meta, children):
        return ('prec', str(children[0]), children[1], _span(meta))

    @v_args(meta=True)
    def p_send(self, meta, children):
        peer, label, expr, cont = children
        return ('psend', self._participant(peer), self._label(label), expr, cont, _span(meta))

    def r_branch(self, children):
        return (self._label(children[0]), str(children[1]), children[2])

    def r_branches(self, children):
        return list(children)

    @v_args(meta=True)
    def p_recv(self, meta, children):
        return ('precv', self._participant(children[0]), children[1], _span(meta))

    @v_args(meta=True)
    def p_ite(self, meta, children):
        return ('pite', children[0], children[1], children[2], _span(meta))

    # Sessions and environments
    def s_entry(self, children):
        return (children[0], children[1])

    def session(self, children):
        return list(children)

    def env_entry(self, children):
        return (children[0], children[1])

    def env(self, children):
        return list(children)


def _resolve(raw, scope: Tuple[str, ...]):
    """ Replace names by de Bruijn indices, innermost binder first """
    if isinstance(raw, _Named):
        if raw.name not in scope:
            raise UnboundName(f'unbound recursion variable {raw.name}')
        return scope.index(raw.name), raw.name
    return raw


def _global(raw, scope=()):
    if isinstance(raw, _Named):
        return GVar(*_resolve(raw, scope))
    if isinstance(raw, GEnd):
        return raw
    if raw[0] == 'grec':
        _, name, body = raw
        return GRec(_global(body, (name,) + scope), name)
    _, sender, receiver, branches = raw
    return GComm(sender, receiver, branch_tuple((lbl, srt, _global(cont, scope)) for lbl, srt, cont in branches))


def _local(raw, scope=()):
    if isinstance(raw, _Named):
        return LVar(*_resolve(raw, scope))
    if isinstance(raw, LEnd):
        return raw
    if raw[0] == 'lrec':
        _, name, body = raw
        return LRec(_local(body, (name,) + scope), name)
    tag, peer, branches = raw
    cls = LSend if tag == 'lsend' else LRecv
    return cls(peer, branch_tuple((lbl, srt, _local(cont, scope)) for lbl, srt, cont in branches))


def _process(raw, scope=()):
    if isinstance(raw, _Named):
        return PVar(*_resolve(raw, scope), span=raw.span)
    if isinstance(raw, Inact):
        return raw
    tag, *fields, span = raw
    if tag == 'prec':
        name, body = fields
        return PRec(_process(body, (name,) + scope), name, span)
    if tag == 'psend':
        peer, label, expr, cont = fields
        return PSend(peer, label, expr, _process(cont, scope), span)
    if tag == 'precv':
        peer, branches = fields
        ordered = sorted(branches, key=lambda b: b[0])
        return PRecv(peer, tuple(RecvBranch(lbl, var, _process(cont, scope)) for lbl, var, cont in ordered), span)
    cond, then, orelse = fields
    return PIte(cond, _process(then, scope), _process(orelse, scope), span)


def _entries(pairs, table: ParticipantTable, convert):
    result = {}
    for name, raw in pairs:
        p = table.get(str(name))
        if p in result:
            raise DuplicateParticipant(f'participant {name} appears twice', name.line, name.column)
        result[p] = convert(raw)
    return result


def parse(kind: str, text: str, table: Optional[ParticipantTable] = None):
    """Parse DSL text.

    Args:
        kind (str): One of 'global', 'local', 'process', 'session', 'env'.
        text (str): Source text.
        table (ParticipantTable, optional): Participant names to intern into. Defaults to the
            process-wide table.

    Raises:
        DslSyntaxError: The text is not in the grammar, or fails validation.

    Returns:
        SynGlobal, SynLocal, Process, SessionForm or EnvForm depending on `kind`.
    """
    if kind not in _START:
        raise ValueError(f'unknown kind {kind!r}, expected one of {KINDS}')
    table = table or default_participants()
    try:
        tree = _parser.parse(text, start=_START[kind])
        raw = _ToTerms(table).transform(tree)
    except VisitError as e:
        raise e.orig_exc
    except UnexpectedEOF as e:
        raise DslSyntaxError(f'unexpected end of input, expected one of {sorted(e.expected)}')
    except UnexpectedInput as e:
        raise DslSyntaxError(f'unexpected input: {e.get_context(text).strip()}', e.line, e.column)

    if kind == 'global':
        return validate_type(_global(raw))
    if kind == 'local':
        return validate_type(_local(raw))
    if kind == 'process':
        return validate_process(_process(raw))
    if kind == 'session':
        return validate_session(SessionForm(_entries(raw, table, _process)))
    entries = _entries(raw, table, _local)
    for t in entries.values():
        validate_type(t)
    logger.debug('parsed environment with %d entries', len(entries))
    return EnvForm(entries)


def parse_file(kind: str, path: str, table: Optional[ParticipantTable] = None):
    with open(path, encoding='utf-8') as source:
        return parse(kind, source.read(), table)


__all__ = ['parse', 'parse_file', 'KINDS', 'Branch']
