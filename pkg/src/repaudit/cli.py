"""Command-line surface.

Subcommands: ``validate``, ``score``, ``fvd``, ``curve``, ``probe``,
``audit``. Exit codes are stable: 0 success, 2 validation failure, 3 I/O
failure, 4 numeric failure. Report files are staged to temporaries and
renamed only once everything succeeded, so a failed run never leaves
partial outputs behind.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from pathlib import Path

import click

from . import __version__
from .augment import AugmentSpec, FrameImage, default_specs, probe_set
from .curve import flagged_curve, integrated_curve
from .errors import AuditError, ValidationError
from .formats import load_pair, read_embedding_set, validate_pair
from .frechet import fvd
from .report import AuditConfig, assemble_audit
from .similarity import DEFAULT_THRESHOLD, DEFAULT_UNIQUENESS_BAND, score


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _cli_errors(func):
    """Map toolkit exceptions onto the documented exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except AuditError as exc:
            _fail(str(exc), exc.exit_code)
        except OSError as exc:
            _fail(str(exc), 3)

    return wrapper


def _write_outputs(out_dir: Path, files: dict[str, str]) -> list[Path]:
    """Stage all files to temporaries, then rename into place together.

    On any failure every temporary and every file renamed during this
    call is removed, so a failed run leaves no newly written reports.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    staged = []
    renamed = []
    try:
        for name, text in files.items():
            tmp = out_dir / f".tmp-{name}"
            tmp.write_text(text, encoding="utf-8")
            staged.append((tmp, out_dir / name))
        for tmp, final in staged:
            os.replace(tmp, final)
            renamed.append(final)
    except BaseException:
        for tmp, _ in staged:
            tmp.unlink(missing_ok=True)
        for final in renamed:
            final.unlink(missing_ok=True)
        raise
    return [final for _, final in staged]


def _parse_formats(text: str) -> tuple[str, ...]:
    fmts = tuple(f.strip() for f in text.split(",") if f.strip())
    if not fmts:
        raise ValidationError("at least one report format is required")
    return fmts


def _parse_steps(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise ValidationError(f"bad curve steps {text!r}: {exc}") from exc


def _build_config(config_path, **overrides) -> AuditConfig:
    """Merge defaults < config file < explicit command-line flags."""
    merged = {}
    if config_path:
        try:
            merged.update(json.loads(Path(config_path).read_text(encoding="utf-8")))
        except OSError as exc:
            _fail(f"cannot read config {config_path}: {exc}", 3)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed config {config_path}: {exc}") from exc
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return AuditConfig.from_dict(merged)


@click.group()
@click.version_option(version=__version__, prog_name="repaudit")
def main():
    """Audit a video generation model's outputs for training-data replication."""


@main.command("validate")
@click.option("--real", "real_path", required=True, type=click.Path(), help="Real-set embedding file.")
@click.option("--gen", "gen_path", type=click.Path(), default=None, help="Generated-set embedding file.")
@_cli_errors
def cmd_validate(real_path, gen_path):
    """Check embedding files and pair compatibility."""
    real, real_mf = read_embedding_set(real_path)
    click.echo(f"{real_path}: ok ({real.count} x {real.dim}, extractor {real_mf.extractor})")
    if gen_path is not None:
        gen, gen_mf = read_embedding_set(gen_path)
        click.echo(f"{gen_path}: ok ({gen.count} x {gen.dim}, extractor {gen_mf.extractor})")
        validate_pair(real, gen, real_mf, gen_mf)
        click.echo("pair: compatible")


@main.command("score")
@click.option("--real", "real_path", required=True, type=click.Path())
@click.option("--gen", "gen_path", required=True, type=click.Path())
@click.option("--threshold", type=float, default=DEFAULT_THRESHOLD, show_default=True,
              help="Replication flag level on the top score.")
@click.option("--uniqueness-band", type=float, default=DEFAULT_UNIQUENESS_BAND, show_default=True,
              help="Secondary flag level; an average below it indicates unique content.")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Directory for report files (otherwise summary only).")
@click.option("--format", "formats", default="json,csv", show_default=True,
              help="Comma-separated subset of json,csv,md.")
@_cli_errors
def cmd_score(real_path, gen_path, threshold, uniqueness_band, out_dir, formats):
    """Copy-similarity scores and replication flags for a generated set."""
    fmts = _parse_formats(formats)
    AuditConfig(threshold=threshold, uniqueness_band=uniqueness_band, report_formats=fmts)
    real, _, gen, _ = load_pair(real_path, gen_path)
    report = score(real, gen, threshold=threshold, uniqueness_band=uniqueness_band)

    if out_dir is not None:
        files = {}
        if "json" in fmts:
            files["similarity_report.json"] = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
        if "csv" in fmts:
            files["similarity_report.csv"] = report.to_csv()
        if "md" in fmts:
            files["similarity_report.md"] = _similarity_markdown(report)
        _write_outputs(Path(out_dir), files)

    click.echo(f"generated videos: {len(report.per_gen)}")
    click.echo(f"average top score: {report.average_top}")
    click.echo(f"top score: {report.top_vsscd}")
    click.echo(f"flagged replicated (>= {report.threshold}): {len(report.replicated_ids)}")


def _similarity_markdown(report) -> str:
    lines = [
        "# Copy-similarity report",
        "",
        f"Average top VSSCD: {report.average_top:.4f} (threshold {report.threshold}, "
        f"uniqueness band {report.uniqueness_band})",
        "",
        "| gen_id | best_real_id | top score | replicated |",
        "| --- | --- | --- | --- |",
    ]
    flagged = set(report.replicated_ids)
    for e in report.per_gen:
        lines.append(
            f"| {e.gen_id} | {e.best_real_id} | {e.top_score:.4f} | "
            f"{'yes' if e.gen_id in flagged else 'no'} |"
        )
    return "\n".join(lines) + "\n"


@main.command("fvd")
@click.option("--real", "real_path", required=True, type=click.Path())
@click.option("--gen", "gen_path", required=True, type=click.Path())
@click.option("--epsilon", type=float, default=0.0, show_default=True,
              help="Optional diagonal ridge for pathological covariances.")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Directory for fvd_result.json.")
@_cli_errors
def cmd_fvd(real_path, gen_path, epsilon, out_dir):
    """Frechet video distance between two embedding sets."""
    real, real_mf, gen, _ = load_pair(real_path, gen_path)
    result = fvd(real, gen, epsilon=epsilon, extractor=real_mf.extractor)
    if out_dir is not None:
        _write_outputs(Path(out_dir), {
            "fvd_result.json": json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n",
        })
    click.echo(f"FVD: {result.value}")
    for w in result.warnings:
        click.echo(f"warning: {w}", err=True)


@main.command("curve")
@click.option("--real", "real_path", required=True, type=click.Path())
@click.option("--gen", "gen_path", required=True, type=click.Path())
@click.option("--mode", type=click.Choice(["flagged", "integrated"]), default="flagged",
              show_default=True, help="Threshold-gated or rank-gated removal sweep.")
@click.option("--threshold", type=float, default=DEFAULT_THRESHOLD, show_default=True)
@click.option("--curve-steps", default=None,
              help="Comma-separated retained fractions for --mode integrated "
                   "(default 1.0 down to 0.5 in steps of 0.05).")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Directory for curve.csv and curve_plot.csv.")
@_cli_errors
def cmd_curve(real_path, gen_path, mode, threshold, curve_steps, out_dir):
    """FVD recomputed while excluding replicated generated videos."""
    real, _, gen, _ = load_pair(real_path, gen_path)
    report = score(real, gen, threshold=threshold)
    if mode == "integrated":
        if curve_steps is not None:
            curve = integrated_curve(real, gen, report, steps=_parse_steps(curve_steps))
        else:
            curve = integrated_curve(real, gen, report)
    else:
        curve = flagged_curve(real, gen, report)
    if out_dir is not None:
        _write_outputs(Path(out_dir), {
            "curve.csv": curve.to_csv(),
            "curve_plot.csv": curve.to_plot_csv(),
        })
    click.echo(curve.to_csv(), nl=False)


@main.command("probe")
@click.option("--image", "image_path", required=True, type=click.Path(),
              help="Conditioning frame to augment.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--stem", default=None, help="Output filename stem (default: image filename).")
@click.option("--crop-fraction", type=float, default=None)
@click.option("--occlusion-fraction", type=float, default=None)
@click.option("--dx", type=float, default=None, help="Horizontal shift fraction.")
@click.option("--dy", type=float, default=None, help="Vertical shift fraction.")
@click.option("--degrees", type=float, default=None, help="Rotation angle.")
@_cli_errors
def cmd_probe(image_path, out_dir, stem, crop_fraction, occlusion_fraction, dx, dy, degrees):
    """Write the original frame plus its five augmented variants."""
    img = FrameImage.load(image_path)
    specs = []
    for spec in default_specs():
        params = dict(spec.params)
        if spec.op == "crop" and crop_fraction is not None:
            params["crop_fraction"] = crop_fraction
        if spec.op == "occlusion" and occlusion_fraction is not None:
            params["rect_fraction"] = occlusion_fraction
        if spec.op == "translation":
            if dx is not None:
                params["dx_fraction"] = dx
            if dy is not None:
                params["dy_fraction"] = dy
        if spec.op == "rotation" and degrees is not None:
            params["degrees"] = degrees
        specs.append(AugmentSpec(spec.op, params))
    stem = stem if stem is not None else Path(image_path).stem
    paths = probe_set(img, specs, out_dir=out_dir, stem=stem)
    for p in paths:
        click.echo(str(p))


@main.command("audit")
@click.option("--real", "real_path", type=click.Path(), default=None)
@click.option("--gen", "gen_path", type=click.Path(), default=None)
@click.option("--threshold", type=float, default=None)
@click.option("--uniqueness-band", type=float, default=None)
@click.option("--curve-steps", default=None)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--format", "formats", default=None, help="Comma-separated subset of json,csv,md.")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON config file; explicit flags override it.")
@_cli_errors
def cmd_audit(real_path, gen_path, threshold, uniqueness_band, curve_steps, out_dir,
              formats, config_path):
    """Full audit: similarity scores + FVD + filtering curve, all formats."""
    config = _build_config(
        config_path,
        real_path=real_path,
        gen_path=gen_path,
        threshold=threshold,
        uniqueness_band=uniqueness_band,
        curve_steps=_parse_steps(curve_steps) if curve_steps is not None else None,
        output_dir=out_dir,
        report_formats=_parse_formats(formats) if formats is not None else None,
    )
    if not config.real_path or not config.gen_path:
        raise ValidationError("an audit needs --real and --gen (or both paths in the config file)")

    real, real_mf, gen, gen_mf = load_pair(config.real_path, config.gen_path)
    report = assemble_audit(real, gen, config, real_mf, gen_mf)

    files = {}
    if "json" in config.report_formats:
        files["audit_report.json"] = report.to_json()
    if "csv" in config.report_formats:
        files["similarity_report.csv"] = report.similarity.to_csv()
        files["curve.csv"] = report.curve.to_csv()
    if "md" in config.report_formats:
        files["audit_report.md"] = report.to_markdown()
    _write_outputs(Path(config.output_dir), files)

    v = report.verdict
    click.echo(f"average top score: {v['avg_top_vsscd']}")
    click.echo(f"flagged replicated: {v['pct_flagged']:.1f}%")
    click.echo(f"FVD baseline: {report.fvd_baseline.value}")
    click.echo(f"FVD after removing flagged: {v['fvd_at_full_filter']}")
    for w in report.fvd_baseline.warnings:
        click.echo(f"warning: {w}", err=True)


if __name__ == "__main__":
    main()
