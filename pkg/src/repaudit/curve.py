"""Replication-aware FVD curves.

FVD rewards training-set replicas: exact copies pull the generated
distribution onto the real one and the score improves. These curves make
that visible by recomputing FVD while progressively excluding the
generated videos most similar to the real set.

Two exclusion policies are provided:

- ``integrated_curve``: rank-gated; sweep over caller-chosen retained
  fractions, always removing the highest-scoring videos first.
- ``flagged_curve``: threshold-gated; only videos at or above the
  report's replication threshold are removable, swept from none removed
  to all removed in ten even steps.

A flat curve means quality does not depend on keeping the replicas.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

from .errors import ValidationError
from .formats import EmbeddingSet
from .frechet import fvd
from .similarity import SimilarityReport

DEFAULT_STEPS = tuple(round(1.0 - 0.05 * i, 2) for i in range(11))  # 1.00 .. 0.50
FLAGGED_SWEEP_STEPS = 10

# Guard against float noise pushing ceil() over an integer boundary,
# e.g. (1 - 0.95) * 20 == 1.0000000000000009.
_CEIL_EPS = 1e-9


@dataclass(frozen=True)
class CurvePoint:
    """One evaluated subset: how much was kept and what FVD it got.

    ``non_replicated_fraction`` is the share of the *remaining* videos
    that sit below the replication threshold, the x-axis convention for
    threshold-gated sweeps.
    """

    retained_fraction: float
    removed_count: int
    fvd: float
    threshold: float
    min_remaining_top_score: float
    non_replicated_fraction: float

    def __post_init__(self):
        if not (0.0 < self.retained_fraction <= 1.0):
            raise ValidationError(f"retained_fraction must be in (0, 1], got {self.retained_fraction}")
        if self.removed_count < 0:
            raise ValidationError("removed_count must be nonnegative")


@dataclass(frozen=True)
class Curve:
    """An ordered sweep of curve points plus its unfiltered baseline."""

    points: tuple[CurvePoint, ...]
    baseline_fvd: float
    gen_set_size: int
    kind: str = "flagged"

    def __post_init__(self):
        if not self.points:
            raise ValidationError("a curve needs at least one point")
        first = self.points[0]
        if first.retained_fraction != 1.0 or first.fvd != self.baseline_fvd:
            raise ValidationError("first curve point must be the unfiltered baseline")
        fractions = [p.retained_fraction for p in self.points]
        if any(b > a for a, b in zip(fractions, fractions[1:])):
            raise ValidationError("curve points must be ordered by decreasing retained_fraction")
        object.__setattr__(self, "points", tuple(self.points))

    @property
    def flatness(self) -> float:
        """max |fvd_k - baseline| / baseline; inf when the baseline is 0 but points move."""
        deviation = max(abs(p.fvd - self.baseline_fvd) for p in self.points)
        if self.baseline_fvd == 0.0:
            return 0.0 if deviation == 0.0 else math.inf
        return deviation / self.baseline_fvd

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "baseline_fvd": self.baseline_fvd,
            "gen_set_size": self.gen_set_size,
            "flatness": self.flatness,
            "points": [
                {
                    "retained_fraction": p.retained_fraction,
                    "removed_count": p.removed_count,
                    "fvd": p.fvd,
                    "threshold": p.threshold,
                    "min_remaining_top_score": p.min_remaining_top_score,
                    "non_replicated_fraction": p.non_replicated_fraction,
                }
                for p in self.points
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("retained_fraction,removed_count,fvd,threshold,min_remaining_top_score\n")
        for p in self.points:
            buf.write(
                f"{p.retained_fraction!r},{p.removed_count},{p.fvd!r},"
                f"{p.threshold!r},{p.min_remaining_top_score!r}\n"
            )
        return buf.getvalue()

    def to_plot_csv(self) -> str:
        """Two-column plot data; x is the sweep's natural axis."""
        use_nrf = self.kind == "flagged"
        xlabel = "non_replicated_fraction" if use_nrf else "retained_fraction"
        buf = io.StringIO()
        buf.write(f"{xlabel},fvd\n")
        for p in self.points:
            x = p.non_replicated_fraction if use_nrf else p.retained_fraction
            buf.write(f"{x!r},{p.fvd!r}\n")
        return buf.getvalue()


def rank_by_replication(report: SimilarityReport) -> list[str]:
    """Generated ids from most to least replicated (ties: lexicographic id)."""
    if not report.per_gen:
        raise ValidationError("cannot rank an empty report")
    return [e.gen_id for e in sorted(report.per_gen, key=lambda e: (-e.top_score, e.gen_id))]


def _check_report_matches(gen: EmbeddingSet, report: SimilarityReport):
    if tuple(report.gen_ids) != tuple(gen.ids):
        raise ValidationError("report was not produced from this generated set (ids differ)")


def _evaluate_subset(real: EmbeddingSet, gen: EmbeddingSet, report: SimilarityReport,
                     removed_ids: set, retained_fraction: float,
                     epsilon: float = 0.0) -> CurvePoint:
    keep = [gid for gid in gen.ids if gid not in removed_ids]
    subset = gen.subset(keep) if removed_ids else gen
    result = fvd(real, subset, epsilon=epsilon)
    scores = {e.gen_id: e.top_score for e in report.per_gen}
    remaining_scores = [scores[g] for g in keep]
    n_clean = sum(1 for s in remaining_scores if s < report.threshold)
    return CurvePoint(
        retained_fraction=retained_fraction,
        removed_count=len(removed_ids),
        fvd=result.value,
        threshold=report.threshold,
        min_remaining_top_score=min(remaining_scores),
        non_replicated_fraction=n_clean / len(keep),
    )


def integrated_curve(real: EmbeddingSet, gen: EmbeddingSet, report: SimilarityReport,
                     steps=DEFAULT_STEPS, epsilon: float = 0.0) -> Curve:
    """Rank-gated sweep: at each retained fraction, drop the most replicated.

    Removal is cumulative along the replication ranking, so subsets are
    nested. Any step that would leave fewer than two generated videos is
    rejected by name.
    """
    _check_report_matches(gen, report)
    steps = [float(s) for s in steps]
    if not steps:
        raise ValidationError("steps must be non-empty")
    if steps[0] != 1.0:
        raise ValidationError(f"steps must start at 1.0, got {steps[0]}")
    if any(b >= a for a, b in zip(steps, steps[1:])):
        raise ValidationError("steps must be strictly decreasing")
    for s in steps:
        if not (0.0 < s <= 1.0):
            raise ValidationError(f"step {s} outside (0, 1]")

    m = gen.count
    ranking = rank_by_replication(report)
    points = []
    for s in steps:
        removed = math.ceil((1.0 - s) * m - _CEIL_EPS)
        if m - removed < 2:
            raise ValidationError(
                f"step {s} would leave {m - removed} generated video(s); at least 2 are needed"
            )
        points.append(
            _evaluate_subset(real, gen, report, set(ranking[:removed]), (m - removed) / m,
                             epsilon=epsilon)
        )
    return Curve(points=tuple(points), baseline_fvd=points[0].fvd, gen_set_size=m, kind="integrated")


def flagged_curve(real: EmbeddingSet, gen: EmbeddingSet, report: SimilarityReport,
                  epsilon: float = 0.0) -> Curve:
    """Threshold-gated sweep: progressively remove the flagged videos only.

    Sweeps from zero removed to all flagged removed in ten even steps
    (fewer when flagged counts collapse onto the same subset). Removal is
    capped so at least two generated videos always remain; with nothing
    flagged the curve degenerates to the single baseline point.
    """
    _check_report_matches(gen, report)
    m = gen.count
    if m < 2:
        raise ValidationError("need at least 2 generated videos")
    flagged_ranked = [g for g in rank_by_replication(report) if g in set(report.replicated_ids)]
    removable = min(len(flagged_ranked), m - 2)

    grid = sorted({round(j * removable / FLAGGED_SWEEP_STEPS) for j in range(FLAGGED_SWEEP_STEPS + 1)})
    points = [
        _evaluate_subset(real, gen, report, set(flagged_ranked[:r]), (m - r) / m,
                         epsilon=epsilon)
        for r in grid
    ]
    return Curve(points=tuple(points), baseline_fvd=points[0].fvd, gen_set_size=m, kind="flagged")
