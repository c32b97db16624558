"""Exception types raised by the engine.

Negative mathematical verdicts (non-extendible, not a local procedure, ...)
are return values, never exceptions.  The classes below signal misuse or
inputs outside an operation's domain.
"""


class GpdError(Exception):
    """Base class for every engine error."""


class NotComposable(GpdError):
    pass


class UnknownObject(GpdError):
    pass


class UnknownArrow(GpdError):
    pass


class NotNormal(GpdError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class EmptyIntersection(GpdError):
    pass


class EmptyDomain(GpdError):
    pass


class NotInDomain(GpdError):
    pass


class InvalidModel(GpdError):
    pass


class NoSectionThroughW(GpdError):
    pass


class OutOfOverlap(GpdError):
    pass


class SourceMismatch(GpdError):
    pass


class BaseMismatch(GpdError):
    pass


class DepthExceeded(GpdError):
    pass


class RelationViolation(GpdError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotPregroupoidMorphism(GpdError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
