"""Audit configuration and report assembly.

An audit bundles the three analyses over one real/generated pair:
similarity scoring (who replicates what), baseline FVD, and the
threshold-gated FVD curve. The assembled report carries full provenance
(both manifests, the configuration, the tool version) so an identical
audit can be reproduced from the report alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import __version__
from .curve import Curve, flagged_curve
from .errors import ValidationError
from .formats import EmbeddingSet, Manifest
from .frechet import FvdResult, fvd
from .similarity import (
    DEFAULT_THRESHOLD,
    DEFAULT_UNIQUENESS_BAND,
    SimilarityReport,
    score,
)

REPORT_FORMATS = ("json", "csv", "md")


@dataclass(frozen=True)
class AuditConfig:
    """Everything that parameterizes one audit run."""

    real_path: str = ""
    gen_path: str = ""
    output_dir: str = "."
    threshold: float = DEFAULT_THRESHOLD
    uniqueness_band: float = DEFAULT_UNIQUENESS_BAND
    curve_steps: tuple[float, ...] = ()
    report_formats: tuple[str, ...] = ("json", "csv", "md")
    epsilon: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.uniqueness_band <= self.threshold <= 1.0):
            raise ValidationError(
                f"need 0 <= uniqueness_band <= threshold <= 1, got band={self.uniqueness_band}, "
                f"threshold={self.threshold}"
            )
        steps = tuple(float(s) for s in self.curve_steps)
        if steps:
            if steps[0] != 1.0 or any(b >= a for a, b in zip(steps, steps[1:])):
                raise ValidationError("curve_steps must be strictly decreasing from 1.0")
            if any(not (0.0 < s <= 1.0) for s in steps):
                raise ValidationError("curve_steps must lie in (0, 1]")
        object.__setattr__(self, "curve_steps", steps)
        fmts = tuple(self.report_formats)
        unknown = [f for f in fmts if f not in REPORT_FORMATS]
        if unknown:
            raise ValidationError(f"unknown report formats {unknown}; choose from {REPORT_FORMATS}")
        object.__setattr__(self, "report_formats", fmts)

    def to_dict(self) -> dict:
        return {
            "real_path": self.real_path,
            "gen_path": self.gen_path,
            "output_dir": self.output_dir,
            "threshold": self.threshold,
            "uniqueness_band": self.uniqueness_band,
            "curve_steps": list(self.curve_steps),
            "report_formats": list(self.report_formats),
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AuditConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "curve_steps" in kwargs:
            kwargs["curve_steps"] = tuple(kwargs["curve_steps"])
        if "report_formats" in kwargs:
            kwargs["report_formats"] = tuple(kwargs["report_formats"])
        return cls(**kwargs)


def _manifest_provenance(emb: EmbeddingSet, manifest: Manifest) -> dict:
    return {
        "name": emb.name,
        "role": emb.role,
        "count": emb.count,
        "dim": emb.dim,
        "extractor": manifest.extractor,
        "frame_sampling": manifest.frame_sampling,
        "sheet_layout": manifest.sheet_layout,
        "source_paths": list(manifest.source_paths),
        "checksum": manifest.checksum,
        "format_version": manifest.format_version,
    }


@dataclass(frozen=True)
class AuditReport:
    """The full audit: similarity + FVD + curve + verdict + provenance."""

    similarity: SimilarityReport
    fvd_baseline: FvdResult
    curve: Curve
    verdict: dict
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "similarity": self.similarity.to_dict(),
            "fvd_baseline": self.fvd_baseline.to_dict(),
            "curve": self.curve.to_dict(),
            "verdict": dict(self.verdict),
            "provenance": dict(self.provenance),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_markdown(self) -> str:
        sim = self.similarity
        v = self.verdict
        gen_name = self.provenance.get("generated", {}).get("name", "generated set")
        real_name = self.provenance.get("real", {}).get("name", "real set")
        lines = [
            "# Replication audit",
            "",
            f"Generated set `{gen_name}` audited against real set `{real_name}`.",
            "",
            "## Metrics",
            "",
            f"| Metric | {gen_name} |",
            "| --- | --- |",
            f"| Average top VSSCD | {v['avg_top_vsscd']:.4f} |",
            f"| Top VSSCD | {sim.top_vsscd:.4f} |",
            f"| FVD | {self.fvd_baseline.value:.4f} |",
            f"| FVD after removing flagged | {v['fvd_at_full_filter']:.4f} |",
            f"| Flagged as replicated | {v['pct_flagged']:.1f}% |",
            "",
            f"Lower VSSCD means less replication; FVD conventionally rewards "
            f"similarity to the real set, so replicas *improve* it. Read the two together: "
            f"a low FVD earned by replicated samples disappears once they are filtered out.",
            "",
            f"Replication threshold: {sim.threshold}. Uniqueness band: {sim.uniqueness_band} "
            f"(average top VSSCD below this band conventionally indicates unique content"
            f"{'; satisfied here' if v['avg_top_vsscd'] < sim.uniqueness_band else '; NOT satisfied here'}).",
            "",
            "## Flagged videos",
            "",
        ]
        if sim.replicated_ids:
            lines.append("| gen_id | best_real_id | top score |")
            lines.append("| --- | --- | --- |")
            flagged = set(sim.replicated_ids)
            for e in sim.per_gen:
                if e.gen_id in flagged:
                    lines.append(f"| {e.gen_id} | {e.best_real_id} | {e.top_score:.4f} |")
        else:
            lines.append("None.")
        lines += [
            "",
            "## FVD vs. replication filtering",
            "",
            f"Curve kind: {self.curve.kind}; baseline FVD {self.curve.baseline_fvd:.4f}; "
            f"flatness {self.curve.flatness:.4f} (max relative deviation from baseline).",
            "",
            "| retained fraction | removed | FVD | non-replicated share |",
            "| --- | --- | --- | --- |",
        ]
        for p in self.curve.points:
            lines.append(
                f"| {p.retained_fraction:.3f} | {p.removed_count} | {p.fvd:.4f} "
                f"| {p.non_replicated_fraction:.3f} |"
            )
        for w in self.fvd_baseline.warnings:
            lines += ["", f"Warning: {w}"]
        lines += [
            "",
            "## Provenance",
            "",
            "```json",
            json.dumps(self.provenance, indent=2, sort_keys=True),
            "```",
            "",
        ]
        return "\n".join(lines)


def assemble_audit(real: EmbeddingSet, gen: EmbeddingSet, config: AuditConfig,
                   real_manifest: Manifest | None = None,
                   gen_manifest: Manifest | None = None) -> AuditReport:
    """Run the three analyses and assemble a cross-checked report."""
    sim = score(real, gen, threshold=config.threshold, uniqueness_band=config.uniqueness_band)
    baseline = fvd(real, gen, epsilon=config.epsilon,
                   extractor=real_manifest.extractor if real_manifest else None)
    curve = flagged_curve(real, gen, sim, epsilon=config.epsilon)

    # Consistency cross-checks: the sub-reports must agree with each other.
    if curve.baseline_fvd != baseline.value:
        raise ValidationError("curve baseline does not reproduce the baseline FVD")
    if curve.gen_set_size != len(sim.per_gen):
        raise ValidationError("curve and similarity report disagree on the generated-set size")
    if abs(sim.top_vsscd - max(e.top_score for e in sim.per_gen)) > 0.0:
        raise ValidationError("similarity report top score is not the per-video maximum")

    verdict = {
        "avg_top_vsscd": sim.average_top,
        "pct_flagged": 100.0 * sim.fraction_replicated,
        "fvd_at_full_filter": curve.points[-1].fvd,
    }
    provenance = {
        "tool": "repaudit",
        "version": __version__,
        "config": config.to_dict(),
    }
    if real_manifest is not None:
        provenance["real"] = _manifest_provenance(real, real_manifest)
    if gen_manifest is not None:
        provenance["generated"] = _manifest_provenance(gen, gen_manifest)
    return AuditReport(
        similarity=sim,
        fvd_baseline=baseline,
        curve=curve,
        verdict=verdict,
        provenance=provenance,
    )
