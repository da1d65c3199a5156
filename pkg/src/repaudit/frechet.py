"""Frechet distance between descriptor distributions (FVD).

Given feature sets for real and generated videos, fit a Gaussian to each
(mean + unbiased covariance) and compute

    ||mu_p - mu_q||^2 + Tr(S_p + S_q - 2 (S_p S_q)^{1/2})

The covariance square root goes through the symmetric form
(S_p^{1/2} S_q S_p^{1/2})^{1/2} so all eigendecompositions stay in the
real symmetric domain; negative eigenvalues (rank deficiency, float
noise) are clamped to zero and the clamp count is reported rather than
hidden. No jitter is applied unless explicitly requested.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .errors import NumericError, ValidationError
from .formats import EmbeddingSet
from .validation import check_matrix, check_square_symmetric

SYMMETRY_TOL = 1e-8

# Square roots of near-zero eigenvalues amplify eigensolver error from
# eps to sqrt(eps), so the trace term of a rank-deficient comparison can
# come out negative by roughly dim * sqrt(eps) * trace-magnitude even
# though it is a squared distance. Noise up to that floor is clamped;
# anything beyond it is a genuine numeric failure.
_SQRT_EPS = float(np.finfo(np.float64).eps) ** 0.5


@dataclass(frozen=True)
class GaussianStats:
    """Mean vector and covariance matrix of a feature distribution."""

    mean: np.ndarray
    cov: np.ndarray
    count: int

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        if mean.ndim != 1:
            raise ValidationError(f"mean must be 1-D, got shape {mean.shape}")
        cov = check_square_symmetric(self.cov, name="cov", tol=SYMMETRY_TOL)
        if cov.shape[0] != mean.shape[0]:
            raise ValidationError(f"cov shape {cov.shape} does not match mean dim {mean.shape[0]}")
        if int(self.count) < 2:
            raise ValidationError(f"count must be >= 2, got {self.count}")
        if not (np.isfinite(mean).all() and np.isfinite(cov).all()):
            raise ValidationError("Gaussian statistics contain non-finite values")
        cov = (cov + cov.T) / 2.0
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "count", int(self.count))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True)
class FvdResult:
    """FVD value with its two additive terms and numeric bookkeeping."""

    value: float
    mean_term: float
    trace_term: float
    eigen_clamped: int
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.value < 0.0:
            raise NumericError(f"FVD value must be nonnegative after clamping, got {self.value}")
        if abs(self.value - (self.mean_term + self.trace_term)) > 1e-8:
            raise NumericError("FVD value does not equal mean_term + trace_term")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "mean_term": self.mean_term,
            "trace_term": self.trace_term,
            "eigen_clamped": self.eigen_clamped,
            "warnings": list(self.warnings),
        }


def gaussian_stats(emb: EmbeddingSet | np.ndarray) -> GaussianStats:
    """Per-dimension mean and unbiased sample covariance (divisor n - 1)."""
    X = emb.vectors if isinstance(emb, EmbeddingSet) else emb
    X = check_matrix(X, name="feature set", min_rows=2)
    n = X.shape[0]
    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / (n - 1)
    cov = (cov + cov.T) / 2.0
    return GaussianStats(mean=mean, cov=cov, count=n)


def matrix_sqrt_psd(a) -> tuple[np.ndarray, int]:
    """Principal square root of a symmetric PSD matrix via eigendecomposition.

    Negative eigenvalues are clamped to zero; the second return value is
    how many were clamped. Non-symmetric input beyond tolerance is an
    error, not a silent symmetrization.
    """
    A = check_square_symmetric(a, name="matrix", tol=SYMMETRY_TOL)
    A = (A + A.T) / 2.0
    w, V = np.linalg.eigh(A)
    clamped = int(np.count_nonzero(w < 0.0))
    w = np.maximum(w, 0.0)
    S = (V * np.sqrt(w)) @ V.T
    S = (S + S.T) / 2.0
    if not np.isfinite(S).all():
        raise NumericError("matrix square root produced non-finite values")
    return S, clamped


def _check_stage(x: np.ndarray | float, stage: str):
    if not np.all(np.isfinite(x)):
        raise NumericError(f"non-finite values at stage: {stage}")


def frechet_distance(p: GaussianStats, q: GaussianStats, epsilon: float = 0.0) -> FvdResult:
    """Frechet distance between two Gaussians, split into its two terms.

    ``epsilon`` optionally adds a diagonal ridge to both covariances for
    pathological inputs; the default of 0 keeps scores unregularized.
    """
    if p.dim != q.dim:
        raise ValidationError(f"dimension mismatch: {p.dim} vs {q.dim}")
    cov_p, cov_q = p.cov, q.cov
    if epsilon:
        ridge = float(epsilon) * np.eye(p.dim)
        cov_p = cov_p + ridge
        cov_q = cov_q + ridge

    diff = p.mean - q.mean
    mean_term = float(diff @ diff)
    _check_stage(mean_term, "mean difference")

    sqrt_p, clamped_p = matrix_sqrt_psd(cov_p)
    inner = sqrt_p @ cov_q @ sqrt_p
    inner = (inner + inner.T) / 2.0
    _check_stage(inner, "symmetric product")
    sqrt_inner, clamped_inner = matrix_sqrt_psd(inner)

    tr_p = float(np.trace(cov_p))
    tr_q = float(np.trace(cov_q))
    raw_trace = tr_p + tr_q - 2.0 * float(np.trace(sqrt_inner))
    _check_stage(raw_trace, "trace")

    noise_floor = max(1e-8, _SQRT_EPS * p.dim * max(1.0, tr_p + tr_q))
    if raw_trace < -noise_floor:
        raise NumericError(
            f"trace term {raw_trace} is negative beyond the numeric noise floor "
            f"{noise_floor}: covariance square root failed"
        )
    trace_term = max(0.0, raw_trace)

    return FvdResult(
        value=mean_term + trace_term,
        mean_term=mean_term,
        trace_term=trace_term,
        eigen_clamped=clamped_p + clamped_inner,
    )


def fvd(real: EmbeddingSet, gen: EmbeddingSet, epsilon: float = 0.0,
        extractor: str | None = None) -> FvdResult:
    """FVD between a real and a generated set.

    A sample count below the feature dimensionality makes the covariance
    rank-deficient; that is recorded as a warning on the result, not an
    error, since descriptor sets routinely have count << dim.
    """
    stats_r = gaussian_stats(real)
    stats_g = gaussian_stats(gen)
    if stats_r.dim != stats_g.dim:
        raise ValidationError(f"dimension mismatch: {stats_r.dim} vs {stats_g.dim}")

    warnings = []
    for label, s in (("real", stats_r), ("generated", stats_g)):
        if s.count < s.dim:
            warnings.append(
                f"{label} set has {s.count} samples for dim {s.dim}: covariance is "
                "rank-deficient; compare FVD only at matched sample counts"
            )
    if extractor is not None and not extractor.startswith("i3d"):
        warnings.append(
            f"extractor {extractor!r} is not an i3d-family tag; FVD values are only "
            "comparable within a fixed extractor configuration"
        )

    result = frechet_distance(stats_r, stats_g, epsilon=epsilon)
    if warnings:
        result = FvdResult(
            value=result.value,
            mean_term=result.mean_term,
            trace_term=result.trace_term,
            eigen_clamped=result.eigen_clamped,
            warnings=tuple(warnings),
        )
    return result


class FrechetVideoDistance(BaseEstimator):
    """Estimator-style FVD: fit on real features, measure generated sets.

    ``distance(X)`` returns the scalar FVD (lower is conventionally
    better, but exact training-set replicas also drive it down, which is
    exactly what the rest of this toolkit exists to expose);
    ``fvd_result(X)`` returns the full term breakdown.
    """

    def __init__(self, epsilon: float = 0.0):
        self.epsilon = epsilon

    def fit(self, X, y=None):
        X = check_matrix(X, name="X", min_rows=2)
        self.reference_stats_ = gaussian_stats(X)
        self.n_features_in_ = X.shape[1]
        return self

    def fvd_result(self, X) -> FvdResult:
        if not hasattr(self, "reference_stats_"):
            raise NotFittedError("FrechetVideoDistance must be fitted on the real set first")
        X = check_matrix(X, name="X", min_rows=2)
        stats = gaussian_stats(X)
        warnings = []
        for label, s in (("reference", self.reference_stats_), ("query", stats)):
            if s.count < s.dim:
                warnings.append(f"{label} set has {s.count} samples for dim {s.dim}")
        result = frechet_distance(self.reference_stats_, stats, epsilon=self.epsilon)
        if warnings:
            result = FvdResult(
                value=result.value,
                mean_term=result.mean_term,
                trace_term=result.trace_term,
                eigen_clamped=result.eigen_clamped,
                warnings=tuple(warnings),
            )
        return result

    def distance(self, X) -> float:
        return self.fvd_result(X).value
