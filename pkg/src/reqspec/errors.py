"""Exception hierarchy shared across the package.

Clarification signals (AmbiguousTime, NoNumericConstant, IncompleteSlots)
are ordinary exceptions at the operation level; the dialogue engine catches
them and turns them into questions instead of failures.
"""


class ReqspecError(Exception):
    """Base class for all package errors."""


class IncompleteSlots(ReqspecError):
    """A slot required to build a specification is missing."""

    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__("missing slots: " + ", ".join(k.value for k in self.missing))


class AmbiguousTime(ReqspecError):
    """A time phrase was recognized but cannot be pinned to an interval."""

    def __init__(self, phrase):
        self.phrase = phrase
        super().__init__(f"ambiguous time phrase: {phrase!r}")


class NoNumericConstant(ReqspecError):
    """A condition phrase carries no usable number."""

    def __init__(self, phrase=""):
        self.phrase = phrase
        super().__init__(f"no numeric constant in condition: {phrase!r}")


class ParseError(ReqspecError):
    """Formula text does not match the canonical grammar."""

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += " (expected " + " | ".join(self.expected) + ")"
        super().__init__(detail)


class OverlapError(ReqspecError):
    """Two keyed phrases claim overlapping token spans."""


class SchemaError(ReqspecError):
    """A persisted record does not match its documented schema."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyVocabulary(ReqspecError):
    """Synthesis or training requires a non-empty vocabulary for every kind."""


class NoPatterns(ReqspecError):
    """Synthesis requires at least one pattern."""


class EmptyTerm(ReqspecError):
    """Validation called with an empty term."""


class SessionClosed(ReqspecError):
    """Operation on a session whose cache has been discarded."""


class SessionDone(ReqspecError):
    """Message sent to a session that already confirmed its requirement."""


class NotProposing(ReqspecError):
    """confirm/revise called while no proposal is on the table."""


class MisalignedCorpora(ReqspecError):
    """Gold and predicted corpora do not line up token for token."""


class TaggerContractViolation(ReqspecError):
    """A tagger returned spans that break the slot-set invariants."""
