"""On-disk format for descriptor sets.

This is the single data boundary between the numeric core and whatever
produced the descriptors. One binary file holds the vectors; a JSON
sidecar next to it holds everything human-readable (set name, role, video
ids, extraction parameters, payload checksum).

Wire format, little-endian throughout::

    magic   4 bytes  b"REPA"
    version u32      currently 1
    count   u32      number of vectors
    dim     u32      vector dimensionality
    dtype   u8       0 = float32 little-endian (only supported value)
    payload count * dim * 4 bytes, row-major float32
    digest  32 bytes SHA-256 of the payload bytes only

The checksum covers the payload and nothing else, so renaming a set or
editing its sidecar never invalidates the data. The sidecar is written as
``<filename>.manifest.json`` adjacent to the binary.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    ChecksumMismatchError,
    IOFailureError,
    MissingSidecarError,
    NonFiniteValueError,
    PairMismatchError,
    TruncatedPayloadError,
    UnsupportedDtypeError,
    ValidationError,
    VersionMismatchError,
)
from .validation import check_ids

MAGIC = b"REPA"
FORMAT_VERSION = 1
DTYPE_F32LE = 0
HEADER_STRUCT = struct.Struct("<4sIIIB")  # magic, version, count, dim, dtype
HEADER_SIZE = HEADER_STRUCT.size  # 17
DIGEST_SIZE = 32

ROLES = ("real", "generated")


@dataclass(frozen=True)
class EmbeddingSet:
    """A named collection of per-video descriptor vectors.

    ``vectors`` is always a ``count x dim`` float32 array (the storage
    precision of the wire format); computations upcast as needed.
    """

    name: str
    role: str
    vectors: np.ndarray
    ids: tuple[str, ...]

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValidationError(f"role must be one of {ROLES}, got {self.role!r}")
        vecs = np.asarray(self.vectors)
        if vecs.ndim != 2:
            raise ValidationError(f"vectors must be 2-D, got shape {vecs.shape}")
        if vecs.shape[1] < 1:
            raise ValidationError("dim must be positive")
        vecs = np.ascontiguousarray(vecs, dtype=np.float32)
        if not np.isfinite(vecs).all():
            raise NonFiniteValueError(f"set {self.name!r} contains non-finite descriptor values")
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "ids", tuple(check_ids(self.ids, vecs.shape[0])))

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddingSet):
            return NotImplemented
        return (
            self.name == other.name
            and self.role == other.role
            and self.ids == other.ids
            and self.vectors.shape == other.vectors.shape
            and bool(np.array_equal(self.vectors, other.vectors))
        )

    def subset(self, keep_ids, name: str | None = None) -> "EmbeddingSet":
        """New set restricted to ``keep_ids``, preserving this set's order."""
        wanted = set(keep_ids)
        missing = wanted - set(self.ids)
        if missing:
            raise ValidationError(f"unknown ids in subset request: {sorted(missing)[:5]}")
        mask = [i for i, vid in enumerate(self.ids) if vid in wanted]
        return EmbeddingSet(
            name=name if name is not None else self.name,
            role=self.role,
            vectors=self.vectors[mask],
            ids=tuple(self.ids[i] for i in mask),
        )


@dataclass(frozen=True)
class Manifest:
    """Sidecar metadata describing how an embedding file was produced."""

    extractor: str
    frame_sampling: dict = field(default_factory=lambda: {"frames_per_video": 1, "strategy": "uniform"})
    sheet_layout: dict | None = None
    source_paths: tuple[str, ...] = ()
    checksum: str = ""
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        fpv = int(self.frame_sampling.get("frames_per_video", 0))
        if fpv < 1:
            raise ValidationError(f"frames_per_video must be >= 1, got {fpv}")
        if self.sheet_layout is not None:
            rows = int(self.sheet_layout.get("rows", 0))
            cols = int(self.sheet_layout.get("cols", 0))
            if rows < 1 or cols < 1:
                raise ValidationError(f"sheet_layout rows/cols must be positive, got {self.sheet_layout}")
            if rows * cols < fpv:
                raise ValidationError(
                    f"sheet_layout {rows}x{cols} cannot hold {fpv} frames per video"
                )
        object.__setattr__(self, "source_paths", tuple(str(p) for p in self.source_paths))


def sidecar_path(path) -> Path:
    """Manifest filename for an embedding file: ``<filename>.manifest.json``."""
    p = Path(path)
    return p.with_name(p.name + ".manifest.json")


def payload_checksum(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()


def write_embedding_set(emb: EmbeddingSet, manifest: Manifest, path) -> None:
    """Write the binary file and its manifest sidecar.

    All validation happens before any bytes hit the disk; an invalid set
    leaves no file behind.
    """
    if emb.count == 0:
        raise ValidationError(f"empty set {emb.name!r}: refusing to write a set with no vectors")
    payload = np.ascontiguousarray(emb.vectors, dtype="<f4").tobytes()
    digest = hashlib.sha256(payload).digest()
    header = HEADER_STRUCT.pack(MAGIC, FORMAT_VERSION, emb.count, emb.dim, DTYPE_F32LE)

    sidecar = {
        "name": emb.name,
        "role": emb.role,
        "ids": list(emb.ids),
        "extractor": manifest.extractor,
        "frame_sampling": manifest.frame_sampling,
        "sheet_layout": manifest.sheet_layout,
        "source_paths": list(manifest.source_paths),
        "checksum": digest.hex(),
        "format_version": FORMAT_VERSION,
    }
    sidecar_text = json.dumps(sidecar, indent=2, sort_keys=True) + "\n"

    path = Path(path)
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(payload)
            fh.write(digest)
        sidecar_path(path).write_text(sidecar_text, encoding="utf-8")
    except OSError as exc:
        raise IOFailureError(f"cannot write {path}: {exc}") from exc


def read_embedding_set(path) -> tuple[EmbeddingSet, Manifest]:
    """Read and fully verify an embedding file plus its sidecar."""
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise IOFailureError(f"cannot read {path}: {exc}") from exc

    if len(blob) < HEADER_SIZE:
        raise TruncatedPayloadError(f"{path}: file shorter than the {HEADER_SIZE}-byte header")
    magic, version, count, dim, dtype = HEADER_STRUCT.unpack_from(blob, 0)
    if magic != MAGIC:
        raise BadMagicError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"{path}: format version {version}, this reader supports {FORMAT_VERSION}")
    if dtype != DTYPE_F32LE:
        raise UnsupportedDtypeError(f"{path}: dtype code {dtype}, only 0 (f32le) is supported")

    payload_len = count * dim * 4
    expected_len = HEADER_SIZE + payload_len + DIGEST_SIZE
    if len(blob) < expected_len:
        raise TruncatedPayloadError(
            f"{path}: expected {expected_len} bytes for {count}x{dim} payload plus digest, got {len(blob)}"
        )
    payload = blob[HEADER_SIZE:HEADER_SIZE + payload_len]
    stored_digest = blob[HEADER_SIZE + payload_len:expected_len]
    actual = hashlib.sha256(payload).digest()
    if stored_digest != actual:
        raise ChecksumMismatchError(
            f"{path}: payload checksum mismatch (stored {stored_digest.hex()[:16]}..., "
            f"computed {actual.hex()[:16]}...)"
        )

    vectors = np.frombuffer(payload, dtype="<f4").reshape(count, dim)
    if not np.isfinite(vectors).all():
        raise NonFiniteValueError(f"{path}: payload contains non-finite values")

    sc_path = sidecar_path(path)
    if not sc_path.exists():
        raise MissingSidecarError(f"{path}: manifest sidecar {sc_path.name} not found")
    try:
        meta = json.loads(sc_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise IOFailureError(f"cannot read {sc_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{sc_path}: malformed manifest JSON: {exc}") from exc

    if meta.get("checksum") != actual.hex():
        raise ChecksumMismatchError(f"{sc_path}: manifest checksum does not match payload")

    emb = EmbeddingSet(
        name=str(meta.get("name", path.stem)),
        role=str(meta.get("role", "real")),
        vectors=vectors,
        ids=tuple(meta.get("ids", [])),
    )
    manifest = Manifest(
        extractor=str(meta.get("extractor", "unknown")),
        frame_sampling=dict(meta.get("frame_sampling", {"frames_per_video": 1, "strategy": "uniform"})),
        sheet_layout=meta.get("sheet_layout"),
        source_paths=tuple(meta.get("source_paths", [])),
        checksum=str(meta.get("checksum", "")),
        format_version=int(meta.get("format_version", FORMAT_VERSION)),
    )
    return emb, manifest


def validate_pair(real: EmbeddingSet, gen: EmbeddingSet,
                  real_manifest: Manifest | None = None,
                  gen_manifest: Manifest | None = None) -> None:
    """Check that two sets are comparable (same dim, same extractor tag)."""
    if real.dim != gen.dim:
        raise PairMismatchError(
            f"dimension mismatch: {real.name!r} has dim {real.dim}, {gen.name!r} has dim {gen.dim}"
        )
    if real_manifest is not None and gen_manifest is not None:
        if real_manifest.extractor != gen_manifest.extractor:
            raise PairMismatchError(
                f"extractor mismatch: {real_manifest.extractor!r} vs {gen_manifest.extractor!r}"
            )


def load_pair(real_path, gen_path) -> tuple[EmbeddingSet, Manifest, EmbeddingSet, Manifest]:
    """Read a real/generated pair and validate compatibility in one step."""
    real, real_mf = read_embedding_set(real_path)
    gen, gen_mf = read_embedding_set(gen_path)
    validate_pair(real, gen, real_mf, gen_mf)
    return real, real_mf, gen, gen_mf
