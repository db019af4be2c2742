# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

from typing import Optional


class MpstException(Exception):
    """Base class for every error raised by mpst-model."""
    pass


class DslSyntaxError(MpstException):
    """Exception raised when DSL text cannot be parsed or fails validation."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        where = f' at line {line}, column {column}' if line is not None else ''
        super().__init__(f'{message}{where}')


class UnguardedRecursion(DslSyntaxError):
    """Exception raised when a recursion variable is reachable without passing a communication."""
    pass


class EmptyBranchSet(DslSyntaxError):
    """Exception raised when a choice has no branches."""
    pass


class DuplicateLabel(DslSyntaxError):
    """Exception raised when a choice offers the same label twice."""
    pass


class SelfCommunication(DslSyntaxError):
    """Exception raised when a participant communicates with itself."""
    pass


class UnboundName(DslSyntaxError):
    """Exception raised when a recursion variable or expression variable has no binder."""
    pass


class DuplicateParticipant(DslSyntaxError):
    """Exception raised when a session or environment mentions a participant twice."""
    pass


class KindMismatch(MpstException):
    """Exception raised when a global tree is used where a local tree is expected, or vice versa."""
    pass


class MissingHole(MpstException):
    """Exception raised when a hole of a g-context has no assigned tree."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f'no tree assigned to hole {index}')


class NotBalanced(MpstException):
    """Exception raised when an operation requires a balanced global tree."""
    pass


class NotAParticipant(MpstException):
    """Exception raised when a participant does not occur in a global tree."""

    def __init__(self, participant):
        self.participant = participant
        super().__init__(f'{participant} is not a participant')


class NotProjectable(MpstException):
    """Exception raised when a global tree has no plain-merge projection onto a participant."""

    def __init__(self, participant):
        self.participant = participant
        super().__init__(f'no projection onto {participant}')


class PreconditionViolation(MpstException):
    """Exception raised when association is queried for an unbalanced or unprojectable global tree."""

    def __init__(self, cause: MpstException):
        self.cause = cause
        super().__init__(f'precondition violated: {type(cause).__name__}: {cause}')


class NotEnabled(MpstException):
    """Exception raised when stepping with a label that has no transition."""

    def __init__(self, label):
        self.label = label
        super().__init__(f'{label} is not enabled')


class StateBudgetExceeded(MpstException):
    """Exception raised when state exploration exceeds its budget."""

    def __init__(self, limit: int):
        self.limit = limit
        super().__init__(f'more than {limit} states')


class Truncated(MpstException):
    """Exception raised when a depth or step bound censors a search."""

    def __init__(self, limit: int, partial=None):
        self.limit = limit
        self.partial = partial
        super().__init__(f'search truncated at bound {limit}')


class UnboundVariable(MpstException):
    """Exception raised when an expression mentions a variable without a value or sort."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f'unbound variable {name}')


class SortError(MpstException):
    """Exception raised when an operator is applied to an operand of the wrong sort."""
    pass


class NoUpperBound(SortError):
    """Exception raised when the operands of a choice have no common sort."""

    def __init__(self, left, right):
        self.left = left
        self.right = right
        super().__init__(f'no upper bound of {left.value} and {right.value}')


class TypingError(MpstException):
    """Base class for failures of the typing rules."""
    rule = 'typing'


class HeadMismatch(TypingError):
    """Exception raised when a process prefix does not match the head of its type."""
    rule = 't-head'

    def __init__(self, expected: str, found: str):
        self.expected = expected
        self.found = found
        super().__init__(f'expected {expected}, found {found}')


class MissingLabel(TypingError):
    """Exception raised when a label required by the type is absent (or not allowed)."""
    rule = 't-label'

    def __init__(self, label: int):
        self.label = label
        super().__init__(f'label l{label} missing')


class SortMismatch(TypingError):
    """Exception raised when a payload sort is not a subsort of the declared one."""
    rule = 't-out'

    def __init__(self, expected, found):
        self.expected = expected
        self.found = found
        super().__init__(f'payload of sort {found.value} where {expected.value} is expected')


class UnexpectedEnd(TypingError):
    """Exception raised when a process keeps communicating where its type has ended."""
    rule = 't-end'


class NotAssociated(TypingError):
    """Exception raised when a typing environment is not associated with the global type."""
    rule = 't-sess'


class DomainMismatch(TypingError):
    """Exception raised when session and environment mention different participants."""
    rule = 't-sess'

    def __init__(self, missing, extra):
        self.missing = missing
        self.extra = extra
        super().__init__(f'missing processes for {sorted(map(str, missing))}, '
                         f'no type for {sorted(map(str, extra))}')


class GenerationExhausted(MpstException):
    """Exception raised when rejection sampling cannot produce the requested protocols."""

    def __init__(self, attempts: int):
        self.attempts = attempts
        super().__init__(f'gave up after {attempts} candidates')
