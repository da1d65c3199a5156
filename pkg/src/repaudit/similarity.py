"""Copy-similarity scoring between real and generated descriptor sets.

The similarity between two videos is the cosine of their descriptor
vectors ("vsscd score" in the report schema). For a generated set G
against a real set R this module produces the full n x m score matrix,
each generated video's best real match, the global maximum (top score),
and per-video replication flags against a threshold.

All operations are pure; the matrix computation is a dense normalized
matmul and matches a scalar double loop to float64 accuracy.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .errors import ValidationError
from .formats import EmbeddingSet, validate_pair
from .validation import check_fraction, check_matrix, check_vector

CLAMP_EPS = 1e-6  # tolerated float overshoot beyond [-1, 1] before clamping

DEFAULT_THRESHOLD = 0.6       # replication flag level
DEFAULT_UNIQUENESS_BAND = 0.5  # secondary "unique content" band


def _unit_rows(X: np.ndarray, ids=None, *, name: str) -> np.ndarray:
    """Row-normalize, raising on zero-norm rows with the offending id."""
    norms = np.linalg.norm(X, axis=1)
    bad = np.flatnonzero(norms == 0.0)
    if bad.size:
        label = ids[bad[0]] if ids is not None else f"row {bad[0]}"
        raise ValidationError(f"zero-norm descriptor in {name}: {label}")
    return X / norms[:, None]


def cosine(u, v) -> float:
    """Cosine similarity of two vectors, clamped to [-1, 1].

    Zero-norm inputs are an explicit error rather than a silent 0.
    """
    uu = check_vector(u, name="u")
    vv = check_vector(v, name="v")
    if uu.shape[0] != vv.shape[0]:
        raise ValidationError(f"dimension mismatch: {uu.shape[0]} vs {vv.shape[0]}")
    nu = float(np.linalg.norm(uu))
    nv = float(np.linalg.norm(vv))
    if nu == 0.0:
        raise ValidationError("zero-norm descriptor: u")
    if nv == 0.0:
        raise ValidationError("zero-norm descriptor: v")
    val = float(np.dot(uu, vv) / (nu * nv))
    return float(min(1.0, max(-1.0, val)))


@dataclass(frozen=True)
class SimilarityMatrix:
    """Dense cosine-score matrix: rows are real videos, columns generated."""

    real_ids: tuple[str, ...]
    gen_ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (len(self.real_ids), len(self.gen_ids)):
            raise ValidationError(
                f"matrix shape {vals.shape} does not match id counts "
                f"({len(self.real_ids)} x {len(self.gen_ids)})"
            )
        if vals.size and (vals.min() < -1.0 - CLAMP_EPS or vals.max() > 1.0 + CLAMP_EPS):
            raise ValidationError("similarity values outside [-1, 1] beyond tolerance")
        vals = np.clip(vals, -1.0, 1.0)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "real_ids", tuple(self.real_ids))
        object.__setattr__(self, "gen_ids", tuple(self.gen_ids))


def similarity_matrix(real: EmbeddingSet, gen: EmbeddingSet) -> SimilarityMatrix:
    """All pairwise cosine scores between a real and a generated set."""
    validate_pair(real, gen)
    R = _unit_rows(real.vectors.astype(np.float64), real.ids, name=f"real set {real.name!r}")
    G = _unit_rows(gen.vectors.astype(np.float64), gen.ids, name=f"generated set {gen.name!r}")
    return SimilarityMatrix(real_ids=real.ids, gen_ids=gen.ids, values=R @ G.T)


def top_vsscd(mat: SimilarityMatrix) -> float:
    """The single highest score over all real x generated pairs."""
    if mat.values.size == 0:
        raise ValidationError("empty similarity matrix has no maximum")
    return float(mat.values.max())


@dataclass(frozen=True)
class MatchEntry:
    """One video's best counterpart on the other side."""

    gen_id: str
    best_real_id: str
    top_score: float


@dataclass(frozen=True)
class SimilarityReport:
    """Per-generated-video matches plus the aggregate replication picture.

    ``replicated_ids`` are generated videos at or above ``threshold``;
    ``above_band_ids`` is the softer flag level at ``uniqueness_band``
    (an aggregate average below the band is the conventional signal that
    generated content is unique).
    """

    per_gen: tuple[MatchEntry, ...]
    top_vsscd: float
    average_top: float
    replicated_ids: tuple[str, ...]
    threshold: float
    uniqueness_band: float = DEFAULT_UNIQUENESS_BAND
    above_band_ids: tuple[str, ...] = ()
    per_real: tuple[MatchEntry, ...] | None = None

    @property
    def gen_ids(self) -> tuple[str, ...]:
        return tuple(e.gen_id for e in self.per_gen)

    @property
    def fraction_replicated(self) -> float:
        if not self.per_gen:
            return 0.0
        return len(self.replicated_ids) / len(self.per_gen)

    def to_dict(self) -> dict:
        out = {
            "per_gen": [
                {"gen_id": e.gen_id, "best_real_id": e.best_real_id, "top_score": e.top_score}
                for e in self.per_gen
            ],
            "top_vsscd": self.top_vsscd,
            "average_top": self.average_top,
            "replicated_ids": list(self.replicated_ids),
            "threshold": self.threshold,
            "uniqueness_band": self.uniqueness_band,
            "above_band_ids": list(self.above_band_ids),
        }
        if self.per_real is not None:
            out["per_real"] = [
                {"real_id": e.gen_id, "best_gen_id": e.best_real_id, "top_score": e.top_score}
                for e in self.per_real
            ]
        return out

    def to_csv(self) -> str:
        """CSV rows: gen_id, best_real_id, top_score, replicated."""
        flagged = set(self.replicated_ids)
        buf = io.StringIO()
        buf.write("gen_id,best_real_id,top_score,replicated\n")
        for e in self.per_gen:
            buf.write(f"{e.gen_id},{e.best_real_id},{e.top_score!r},{str(e.gen_id in flagged).lower()}\n")
        return buf.getvalue()


def score(real: EmbeddingSet, gen: EmbeddingSet, threshold: float = DEFAULT_THRESHOLD,
          uniqueness_band: float = DEFAULT_UNIQUENESS_BAND,
          include_per_real: bool = False) -> SimilarityReport:
    """Full replication scoring of a generated set against a real set.

    Each generated video is matched to its best real counterpart (ties
    broken by lowest real-set index); the report carries the mean of the
    per-video top scores, the global maximum, and the flagged ids.
    """
    threshold = check_fraction(threshold, name="threshold")
    uniqueness_band = check_fraction(uniqueness_band, name="uniqueness_band")
    mat = similarity_matrix(real, gen)
    values = mat.values  # n_real x m_gen

    best_idx = np.argmax(values, axis=0)  # lowest index wins ties
    top_scores = values[best_idx, np.arange(values.shape[1])]
    per_gen = tuple(
        MatchEntry(gen_id=gid, best_real_id=mat.real_ids[int(bi)], top_score=float(s))
        for gid, bi, s in zip(mat.gen_ids, best_idx, top_scores)
    )
    replicated = tuple(gid for gid, s in zip(mat.gen_ids, top_scores) if s >= threshold)
    above_band = tuple(gid for gid, s in zip(mat.gen_ids, top_scores) if s >= uniqueness_band)

    per_real = None
    if include_per_real:
        best_g = np.argmax(values, axis=1)
        per_real = tuple(
            MatchEntry(gen_id=rid, best_real_id=mat.gen_ids[int(gi)],
                       top_score=float(values[i, int(gi)]))
            for i, (rid, gi) in enumerate(zip(mat.real_ids, best_g))
        )

    return SimilarityReport(
        per_gen=per_gen,
        top_vsscd=float(top_scores.max()),
        average_top=float(top_scores.mean()),
        replicated_ids=replicated,
        threshold=threshold,
        uniqueness_band=uniqueness_band,
        above_band_ids=above_band,
        per_real=per_real,
    )


class ReplicationScorer(BaseEstimator):
    """Estimator-style interface: fit on real descriptors, score generated ones.

    After ``fit(X_real)``:

    - ``transform(X)`` returns the (n_samples x n_reference) cosine matrix,
    - ``score_samples(X)`` each sample's best score against the reference,
    - ``predict(X)`` boolean replication flags at ``threshold``,
    - ``best_matches(X)`` the matched reference indices alongside scores.
    """

    def __init__(self, threshold: float = DEFAULT_THRESHOLD,
                 uniqueness_band: float = DEFAULT_UNIQUENESS_BAND):
        self.threshold = threshold
        self.uniqueness_band = uniqueness_band

    def fit(self, X, y=None):
        X = check_matrix(X, name="X")
        self.reference_unit_ = _unit_rows(X, name="reference set")
        self.n_features_in_ = X.shape[1]
        return self

    def _check_fitted_input(self, X) -> np.ndarray:
        if not hasattr(self, "reference_unit_"):
            raise NotFittedError("ReplicationScorer must be fitted on the real set first")
        X = check_matrix(X, name="X")
        if X.shape[1] != self.n_features_in_:
            raise ValidationError(
                f"dimension mismatch: fitted on dim {self.n_features_in_}, got {X.shape[1]}"
            )
        return _unit_rows(X, name="query set")

    def transform(self, X) -> np.ndarray:
        U = self._check_fitted_input(X)
        return np.clip(U @ self.reference_unit_.T, -1.0, 1.0)

    def score_samples(self, X) -> np.ndarray:
        return self.transform(X).max(axis=1)

    def predict(self, X) -> np.ndarray:
        check_fraction(self.threshold, name="threshold")
        return self.score_samples(X) >= self.threshold

    def best_matches(self, X) -> tuple[np.ndarray, np.ndarray]:
        sims = self.transform(X)
        idx = sims.argmax(axis=1)
        return idx, sims[np.arange(sims.shape[0]), idx]
