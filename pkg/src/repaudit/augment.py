"""Frame augmentations for the motion-replication probe.

Five deterministic raster operations (flip, crop, occlusion, translation,
rotation) used two ways: to produce perturbed conditioning frames whose
generated continuations are compared by FVD, and to sanity-check that a
copy descriptor still recognizes an augmented copy of a frame.

Everything is nearest-neighbor and integer arithmetic: identical inputs
produce byte-identical outputs, and every case is checkable by hand.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import IOFailureError, ValidationError
from .validation import check_fraction

# Float-noise guard so fraction * size floors to the intended integer,
# e.g. 0.29 * 100 == 28.999999999999996.
_FLOOR_EPS = 1e-9

AUGMENT_OPS = ("flip", "crop", "occlusion", "translation", "rotation")

DEFAULT_CROP_FRACTION = 0.8
DEFAULT_OCCLUSION_FRACTION = 0.2
DEFAULT_TRANSLATION = (0.1, 0.1)
DEFAULT_ROTATION_DEGREES = 15.0

_UNRELATED_SEED = 20240831  # fixed seed for the synthetic "random frame" baseline


def _floor(x: float) -> int:
    return int(math.floor(x + _FLOOR_EPS))


@dataclass(frozen=True)
class FrameImage:
    """An 8-bit RGB raster. ``pixels`` has shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValidationError(f"pixels must have shape (h, w, 3), got {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValidationError("image must be at least 1x1")
        if px.dtype != np.uint8:
            raise ValidationError(f"pixels must be uint8, got {px.dtype}")
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @classmethod
    def load(cls, path) -> "FrameImage":
        try:
            with Image.open(path) as im:
                return cls(np.asarray(im.convert("RGB"), dtype=np.uint8))
        except OSError as exc:
            raise IOFailureError(f"cannot read image {path}: {exc}") from exc

    def save(self, path) -> None:
        try:
            Image.fromarray(self.pixels, mode="RGB").save(path, format="PNG")
        except OSError as exc:
            raise IOFailureError(f"cannot write image {path}: {exc}") from exc


def flip(img: FrameImage) -> FrameImage:
    """Horizontal mirror."""
    return FrameImage(img.pixels[:, ::-1, :])


def _resize_nearest(px: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    src_h, src_w = px.shape[:2]
    rows = (np.arange(out_h) * src_h) // out_h
    cols = (np.arange(out_w) * src_w) // out_w
    return px[rows][:, cols]


def crop(img: FrameImage, fraction: float) -> FrameImage:
    """Central crop to ``fraction`` of each dimension, resized back up."""
    fraction = check_fraction(fraction, name="crop fraction", inclusive_lo=False)
    ch = _floor(fraction * img.height)
    cw = _floor(fraction * img.width)
    if ch < 1 or cw < 1:
        raise ValidationError(
            f"crop fraction {fraction} of a {img.width}x{img.height} image is smaller than 1 pixel"
        )
    y0 = (img.height - ch) // 2
    x0 = (img.width - cw) // 2
    inner = img.pixels[y0:y0 + ch, x0:x0 + cw]
    return FrameImage(np.ascontiguousarray(_resize_nearest(inner, img.height, img.width)))


def occlude(img: FrameImage, rect_fraction: float) -> FrameImage:
    """Black out a centered rectangle scaled to ``rect_fraction`` per side."""
    rect_fraction = check_fraction(rect_fraction, name="occlusion fraction",
                                   inclusive_lo=False, inclusive_hi=False)
    rh = max(1, _floor(rect_fraction * img.height))
    rw = max(1, _floor(rect_fraction * img.width))
    y0 = (img.height - rh) // 2
    x0 = (img.width - rw) // 2
    px = img.pixels.copy()
    px[y0:y0 + rh, x0:x0 + rw] = 0
    return FrameImage(px)


def translate(img: FrameImage, dx_fraction: float, dy_fraction: float) -> FrameImage:
    """Shift content by whole pixels; vacated area is filled black."""
    for name, v in (("dx_fraction", dx_fraction), ("dy_fraction", dy_fraction)):
        check_fraction(v, name=name, lo=-1.0, hi=1.0, inclusive_lo=False, inclusive_hi=False)
    sx = _floor(dx_fraction * img.width)
    sy = _floor(dy_fraction * img.height)
    h, w = img.height, img.width
    out = np.zeros_like(img.pixels)
    src_y = slice(max(0, -sy), min(h, h - sy))
    src_x = slice(max(0, -sx), min(w, w - sx))
    dst_y = slice(max(0, sy), min(h, h + sy))
    dst_x = slice(max(0, sx), min(w, w + sx))
    out[dst_y, dst_x] = img.pixels[src_y, src_x]
    return FrameImage(out)


def rotate(img: FrameImage, degrees: float) -> FrameImage:
    """Rotate about the image center (positive = counterclockwise).

    Nearest-neighbor sampling, out-of-bounds filled black, dimensions
    unchanged. Exact for multiples of 90 degrees on square images.
    """
    d = float(degrees)
    if not (-180.0 < d <= 180.0):
        raise ValidationError(f"rotation must lie in (-180, 180], got {d}")
    theta = math.radians(d)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    h, w = img.height, img.width
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0

    ys, xs = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    rel_x = xs - cx
    rel_y = ys - cy
    src_x = np.rint(cx + cos_t * rel_x - sin_t * rel_y).astype(np.int64)
    src_y = np.rint(cy + sin_t * rel_x + cos_t * rel_y).astype(np.int64)

    valid = (src_x >= 0) & (src_x < w) & (src_y >= 0) & (src_y < h)
    out = np.zeros_like(img.pixels)
    out[valid] = img.pixels[src_y[valid], src_x[valid]]
    return FrameImage(out)


@dataclass(frozen=True)
class AugmentSpec:
    """One augmentation with its parameters."""

    op: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.op not in AUGMENT_OPS:
            raise ValidationError(f"unknown augmentation {self.op!r}, expected one of {AUGMENT_OPS}")
        params = dict(self.params)
        if self.op == "crop":
            check_fraction(params.get("crop_fraction", DEFAULT_CROP_FRACTION),
                           name="crop_fraction", inclusive_lo=False)
        elif self.op == "occlusion":
            check_fraction(params.get("rect_fraction", DEFAULT_OCCLUSION_FRACTION),
                           name="rect_fraction", inclusive_lo=False, inclusive_hi=False)
        elif self.op == "translation":
            for key, default in (("dx_fraction", DEFAULT_TRANSLATION[0]),
                                 ("dy_fraction", DEFAULT_TRANSLATION[1])):
                check_fraction(params.get(key, default), name=key, lo=-1.0, hi=1.0,
                               inclusive_lo=False, inclusive_hi=False)
        elif self.op == "rotation":
            d = float(params.get("degrees", DEFAULT_ROTATION_DEGREES))
            if not (-180.0 < d <= 180.0):
                raise ValidationError(f"rotation must lie in (-180, 180], got {d}")
        object.__setattr__(self, "params", params)

    def apply(self, img: FrameImage) -> FrameImage:
        if self.op == "flip":
            return flip(img)
        if self.op == "crop":
            return crop(img, self.params.get("crop_fraction", DEFAULT_CROP_FRACTION))
        if self.op == "occlusion":
            return occlude(img, self.params.get("rect_fraction", DEFAULT_OCCLUSION_FRACTION))
        if self.op == "translation":
            return translate(
                img,
                self.params.get("dx_fraction", DEFAULT_TRANSLATION[0]),
                self.params.get("dy_fraction", DEFAULT_TRANSLATION[1]),
            )
        return rotate(img, self.params.get("degrees", DEFAULT_ROTATION_DEGREES))

    def to_dict(self) -> dict:
        return {"op": self.op, "params": dict(self.params)}


def default_specs() -> list[AugmentSpec]:
    """The standard five-variant probe set."""
    return [
        AugmentSpec("flip"),
        AugmentSpec("crop", {"crop_fraction": DEFAULT_CROP_FRACTION}),
        AugmentSpec("occlusion", {"rect_fraction": DEFAULT_OCCLUSION_FRACTION}),
        AugmentSpec("translation", {"dx_fraction": DEFAULT_TRANSLATION[0],
                                    "dy_fraction": DEFAULT_TRANSLATION[1]}),
        AugmentSpec("rotation", {"degrees": DEFAULT_ROTATION_DEGREES}),
    ]


class AugmentTransformer(BaseEstimator, TransformerMixin):
    """Stateless transformer applying one augmentation to frame images."""

    def __init__(self, op: str = "flip", params: dict | None = None):
        self.op = op
        self.params = params

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        spec = AugmentSpec(self.op, self.params or {})
        if isinstance(X, FrameImage):
            return spec.apply(X)
        return [spec.apply(img) for img in X]


def probe_set(img: FrameImage, specs=None, out_dir=".", stem: str = "frame") -> list[Path]:
    """Write the original frame plus each augmented variant as PNG files.

    Filenames are ``<stem>_<op>.png`` with the original as
    ``<stem>_orig.png``; a JSON manifest alongside records each spec's
    parameters. These are the conditioning frames to feed to the video
    model under audit; the resulting generated sets are then compared
    with FVD.
    """
    specs = default_specs() if specs is None else list(specs)
    ops = [s.op for s in specs]
    if len(set(ops)) != len(ops):
        raise ValidationError(f"duplicate augmentation ops in probe specs: {ops}")

    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IOFailureError(f"cannot create {out_dir}: {exc}") from exc

    paths = []
    orig_path = out_dir / f"{stem}_orig.png"
    img.save(orig_path)
    paths.append(orig_path)
    for spec in specs:
        variant_path = out_dir / f"{stem}_{spec.op}.png"
        spec.apply(img).save(variant_path)
        paths.append(variant_path)

    manifest = {
        "stem": stem,
        "files": [p.name for p in paths],
        "specs": [s.to_dict() for s in specs],
    }
    manifest_path = out_dir / f"{stem}_manifest.json"
    try:
        manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IOFailureError(f"cannot write {manifest_path}: {exc}") from exc
    return paths


def _synthetic_unrelated(img: FrameImage) -> FrameImage:
    rng = np.random.default_rng(_UNRELATED_SEED)
    noise = rng.integers(0, 256, size=img.pixels.shape, dtype=np.int64).astype(np.uint8)
    return FrameImage(noise)


def _descriptor_for(provider, name: str, img: FrameImage | None):
    if callable(provider):
        try:
            desc = provider(img)
        except Exception as exc:
            raise ValidationError(f"descriptor provider failed for variant {name!r}: {exc}") from exc
    else:
        try:
            desc = provider[name]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"missing descriptor for variant {name!r}") from exc
    if desc is None:
        raise ValidationError(f"missing descriptor for variant {name!r}")
    return np.asarray(desc, dtype=np.float64)


def robustness_table(embed, img: FrameImage, unrelated: FrameImage | None = None,
                     specs=None) -> list[tuple[str, float]]:
    """Similarity of the original frame's descriptor to each variant's.

    ``embed`` is either a callable mapping a frame to a descriptor vector
    or a precomputed mapping from variant name ("orig", op names,
    "random") to vectors. The "random" row uses ``unrelated`` when
    given, otherwise a fixed synthetic noise frame. For augmented copies
    a high score means robust copy detection; only the random baseline
    should be low.
    """
    from .similarity import cosine

    specs = default_specs() if specs is None else list(specs)
    if unrelated is None:
        unrelated = _synthetic_unrelated(img)

    orig_desc = _descriptor_for(embed, "orig", img)
    rows = [("1:1", cosine(orig_desc, orig_desc))]
    for spec in specs:
        variant = spec.apply(img) if callable(embed) else None
        rows.append((spec.op, cosine(orig_desc, _descriptor_for(embed, spec.op, variant))))
    rows.append(("random", cosine(orig_desc, _descriptor_for(embed, "random", unrelated))))
    return rows


def format_robustness_table(rows: list[tuple[str, float]]) -> str:
    """Markdown rendering of a robustness table with its reading note."""
    lines = [
        "| Frame operation | score |",
        "| --- | --- |",
    ]
    for op, val in rows:
        lines.append(f"| {op} | {val:.4f} |")
    lines.append("")
    lines.append(
        "Note: for augmented copies a higher score means more robust copy "
        "detection; only the random baseline should be low."
    )
    return "\n".join(lines) + "\n"
