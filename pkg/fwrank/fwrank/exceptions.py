"""
Error hierarchy for fwrank.

Every error carries a machine-readable ``code`` (its class name), the process
exit code used by the ``fwrank`` management command and the HTTP status used by
the API views.
"""


class FactorWidthError(ValueError):
    exit_code = 1
    http_status = 500

    @property
    def code(self):
        return type(self).__name__

    def to_dict(self):
        return {'error': self.code, 'message': str(self)}


class ReconstructionFailed(FactorWidthError):
    """A construction finished but its terms do not sum back to the target matrix."""


# ==================== PARSE ERRORS ====================

class ParseError(FactorWidthError):
    exit_code = 2
    http_status = 400


class NotSymmetric(ParseError):
    pass


# ==================== PRECONDITION ERRORS ====================

class PreconditionError(FactorWidthError):
    exit_code = 3
    http_status = 422


class NotPSD(PreconditionError):
    pass


class ZeroDiagonalNonzeroRow(PreconditionError):
    pass


class DimensionMismatch(PreconditionError):
    pass


class NegativeEntryNonIntegerPower(PreconditionError):
    pass


class NotChordal(PreconditionError):
    pass


class TooLarge(PreconditionError):
    pass


class BadK(PreconditionError):
    pass


class BandTooWide(PreconditionError):
    pass


class NotTridiagonal(PreconditionError):
    pass


class InconsistentZeroPivot(PreconditionError):
    pass


class NotArrowhead(PreconditionError):
    pass


class NotDDEquality(PreconditionError):
    pass


class BadSeed(PreconditionError):
    pass


class TargetNotAboveOne(PreconditionError):
    pass


class HypothesisFailed(PreconditionError):
    pass


class NotFactorWidth2(PreconditionError):
    pass


class NotFactorWidthK(PreconditionError):
    pass


class BadBlockStructure(PreconditionError):
    pass


class BadArgs(PreconditionError):
    pass


class Overflow(PreconditionError):
    pass


class DegenerateSubmatrix(PreconditionError):
    pass


class CapExceeded(PreconditionError):
    pass


class BadRegime(PreconditionError):
    pass
