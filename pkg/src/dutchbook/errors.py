"""Exception hierarchy shared across the toolkit."""


class DutchbookError(Exception):
    """Base class for all toolkit errors."""


class InputError(DutchbookError):
    """Malformed document or structurally invalid input."""


class InvalidEnvironment(InputError):
    """Learning environment violates a structural invariant."""


class DomainError(DutchbookError):
    """An identifier or state is outside the operation's domain."""


class IndeterminateRatio(DutchbookError):
    """Discounted odds ratio of the 0/0 form."""


class IndeterminateProduct(IndeterminateRatio):
    """Chain mixes zero and infinite factors."""


class PreconditionViolation(DutchbookError):
    """Operation called on inputs it is not defined for."""


class UnsupportedEnvironment(PreconditionViolation):
    """Environment lacks a structural property the operation requires."""


class NonUniformReach(UnsupportedEnvironment):
    """Operation requires identical reach probabilities across consistent states."""


class InternalError(DutchbookError):
    """A verified-by-construction step failed; indicates a bug."""
