"""Exception hierarchy for khoflow.

Library code raises these; the command line maps them to exit codes.
"""


class KhoflowError(Exception):
    exit_code = 1


class InputError(KhoflowError):
    """Bad user input: malformed diagrams, unknown names, invalid options."""

    exit_code = 2


class InvariantViolation(KhoflowError):
    """An internal consistency check failed."""

    exit_code = 3


# diagram
class MalformedToken(InputError):
    pass


class InconsistentStrands(InputError):
    pass


class DisconnectedNumbering(InputError):
    pass


class InvalidBasepoint(InputError):
    pass


class VertexLengthMismatch(InputError):
    pass


class BasepointOnCrossing(InputError):
    pass


class NoCrossings(InputError):
    pass


# khovanov
class TooManyCrossings(InputError):
    pass


class CircleMismatch(InvariantViolation):
    pass


# linalg
class NotASubspace(InvariantViolation):
    pass


# branched
class DisconnectedDiagram(InputError):
    pass


class NonPlanarDiagram(InputError):
    pass


# specseq
class InvalidPage(InputError):
    pass


# hmr_model
class CutoffTooSmall(InputError):
    pass


class UnknownModel(InputError):
    pass


class ModelSchemaError(InputError):
    pass


# corpus / cli
class UnknownDiagram(InputError):
    pass


class InvalidDims(InputError):
    pass


class InvalidCrossing(InputError):
    pass
