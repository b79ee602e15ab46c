"""Exception hierarchy. Every error carries a machine-readable ``code``."""


class CupformError(Exception):
    """Base class for domain errors (CLI exit status 1)."""

    code = "DOMAIN_ERROR"


class DimensionMismatch(CupformError, ValueError):
    code = "DIMENSION_MISMATCH"


class DegreeTooLow(CupformError, ValueError):
    code = "DEGREE_TOO_LOW"


class DegreeMismatch(CupformError, ValueError):
    code = "DEGREE_MISMATCH"


class IndexOutOfRange(CupformError, IndexError):
    code = "INDEX_OUT_OF_RANGE"


class SingularMatrix(CupformError, ValueError):
    code = "SINGULAR_MATRIX"


class ZeroVector(CupformError, ValueError):
    code = "ZERO_VECTOR"


class NotHonest(CupformError, ValueError):
    code = "NOT_HONEST"

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotCertified(CupformError, ValueError):
    code = "NOT_CERTIFIED"


class DependentSlices(CupformError, ValueError):
    code = "DEPENDENT_SLICES"


class CertificateFalsified(CupformError):
    """A sampled point violated a caller-supplied rank certificate."""

    code = "CERTIFICATE_FALSIFIED"


class ShapeError(CupformError, ValueError):
    code = "WRONG_SHAPE"


class VerificationFailure(CupformError, AssertionError):
    """An internal self-check failed. Always a bug, never a valid result."""

    code = "INTERNAL_VERIFICATION_FAILED"


class SchemaError(ValueError):
    """Malformed input document (CLI exit status 2)."""

    code = "SCHEMA_VIOLATION"


class NotBlowupShape(CupformError, ValueError):
    """Input lacks the shape a blow-up along the claimed centre would give."""

    code = "NOT_BLOWUP_SHAPE"
