"""Replication audit toolkit for video generation models.

Quantifies how much a generated video set replicates its training data:
descriptor copy-similarity scores with per-video replication flags, the
Frechet video distance, and FVD-vs-filtering curves that expose quality
earned by replication rather than generation.
"""

__version__ = "0.1.0"

from .augment import (
    AugmentSpec,
    AugmentTransformer,
    FrameImage,
    crop,
    default_specs,
    flip,
    occlude,
    probe_set,
    robustness_table,
    rotate,
    translate,
)
from .curve import Curve, CurvePoint, flagged_curve, integrated_curve, rank_by_replication
from .errors import (
    AuditError,
    BadMagicError,
    ChecksumMismatchError,
    FormatError,
    IOFailureError,
    MissingSidecarError,
    NonFiniteValueError,
    NumericError,
    PairMismatchError,
    TruncatedPayloadError,
    UnsupportedDtypeError,
    ValidationError,
    VersionMismatchError,
)
from .formats import (
    EmbeddingSet,
    Manifest,
    load_pair,
    read_embedding_set,
    sidecar_path,
    validate_pair,
    write_embedding_set,
)
from .frechet import (
    FrechetVideoDistance,
    FvdResult,
    GaussianStats,
    frechet_distance,
    fvd,
    gaussian_stats,
    matrix_sqrt_psd,
)
from .report import AuditConfig, AuditReport, assemble_audit
from .similarity import (
    ReplicationScorer,
    SimilarityMatrix,
    SimilarityReport,
    cosine,
    score,
    similarity_matrix,
    top_vsscd,
)

__all__ = [
    "__version__",
    "AuditConfig",
    "AuditError",
    "AuditReport",
    "AugmentSpec",
    "AugmentTransformer",
    "BadMagicError",
    "ChecksumMismatchError",
    "Curve",
    "CurvePoint",
    "EmbeddingSet",
    "FormatError",
    "FrameImage",
    "FrechetVideoDistance",
    "FvdResult",
    "GaussianStats",
    "IOFailureError",
    "Manifest",
    "MissingSidecarError",
    "NonFiniteValueError",
    "NumericError",
    "PairMismatchError",
    "ReplicationScorer",
    "SimilarityMatrix",
    "SimilarityReport",
    "TruncatedPayloadError",
    "UnsupportedDtypeError",
    "ValidationError",
    "VersionMismatchError",
    "assemble_audit",
    "cosine",
    "crop",
    "default_specs",
    "flagged_curve",
    "flip",
    "frechet_distance",
    "fvd",
    "gaussian_stats",
    "integrated_curve",
    "load_pair",
    "matrix_sqrt_psd",
    "occlude",
    "probe_set",
    "rank_by_replication",
    "read_embedding_set",
    "robustness_table",
    "rotate",
    "score",
    "sidecar_path",
    "similarity_matrix",
    "top_vsscd",
    "translate",
    "validate_pair",
    "write_embedding_set",
]
