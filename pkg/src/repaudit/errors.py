"""Exception taxonomy shared across the toolkit.

Every error raised by this package derives from :class:`AuditError` and
carries an ``exit_code`` so the CLI can map failures onto its documented
exit-code contract (0 success, 2 validation, 3 I/O, 4 numeric).
"""


class AuditError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ValidationError(AuditError):
    """Invalid inputs: broken invariants, incompatible sets, bad parameters."""

    exit_code = 2


class FormatError(ValidationError):
    """An embedding file does not conform to the wire format.

    Subclasses identify the exact failure; ``code`` is a stable
    machine-readable tag surfaced in CLI messages.
    """

    code = "format"


class BadMagicError(FormatError):
    code = "bad-magic"


class VersionMismatchError(FormatError):
    code = "version-mismatch"


class UnsupportedDtypeError(FormatError):
    code = "unsupported-dtype"


class TruncatedPayloadError(FormatError):
    code = "truncated-payload"


class ChecksumMismatchError(FormatError):
    code = "checksum-mismatch"


class NonFiniteValueError(FormatError):
    code = "non-finite-value"


class MissingSidecarError(FormatError):
    code = "missing-sidecar"


class PairMismatchError(ValidationError):
    """Real and generated embedding sets are not comparable."""


class IOFailureError(AuditError):
    """Filesystem trouble distinct from malformed content."""

    exit_code = 3


class NumericError(AuditError):
    """A numeric stage produced non-finite or otherwise unusable values."""

    exit_code = 4
