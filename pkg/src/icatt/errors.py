"""Error taxonomy shared by the kernel, elaborator and frontend.

Every error carries a stable ``category`` string so callers (and the
negative test suite) can match on the failure kind rather than on
message wording.
"""

from __future__ import annotations


class IcattError(Exception):
    """Base class for all checker errors."""

    category = "error"

    def __init__(self, message: str, *, span: tuple[int, int] | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self) -> str:
        if self.span is not None:
            line, col = self.span
            return f"{line}:{col}: {self.message} [{self.category}]"
        return f"{self.message} [{self.category}]"


class SyntaxErrorIcatt(IcattError):
    category = "syntax"


class UnboundVariable(IcattError):
    category = "unbound-variable"


class DuplicateVariable(IcattError):
    category = "duplicate-variable"


class IllFormedType(IcattError):
    category = "ill-formed-type"


class TypeMismatch(IcattError):
    category = "type-mismatch"


class NotPasting(IcattError):
    category = "not-pasting"


class NotFull(IcattError):
    category = "not-full"


class BadSubstitution(IcattError):
    category = "bad-substitution"


class WrongWitnessSet(IcattError):
    category = "wrong-witness-set"


class BadCanSubject(IcattError):
    category = "bad-can-subject"


class ArityError(IcattError):
    category = "arity"


class NotEquivContext(IcattError):
    category = "not-equiv-context"


class IHOutsideRec(IcattError):
    category = "ih-outside-rec"


class UnificationFailure(IcattError):
    category = "unification"


class UnsolvedMeta(IcattError):
    category = "unsolved-meta"


class ShadowedName(IcattError):
    category = "shadowed-name"


class UnknownName(IcattError):
    category = "unknown-name"


class OppositeOnInv(IcattError):
    category = "opposite-on-inv"


class NotCategorical(IcattError):
    category = "not-categorical"


class BoundExceeded(IcattError):
    category = "bound-exceeded"
