from __future__ import annotations

import numpy as np
import pytest

from repaudit import EmbeddingSet, Manifest, write_embedding_set


def make_set(vectors, role="real", name=None, ids=None, extractor="i3d-logits"):
    vectors = np.asarray(vectors, dtype=np.float32)
    if vectors.ndim == 1:
        vectors = vectors.reshape(1, -1)
    if name is None:
        name = f"{role}-set"
    if ids is None:
        prefix = "r" if role == "real" else "g"
        ids = tuple(f"{prefix}{i:03d}" for i in range(vectors.shape[0]))
    return EmbeddingSet(name=name, role=role, vectors=vectors, ids=ids), Manifest(
        extractor=extractor,
        frame_sampling={"frames_per_video": 16, "strategy": "uniform"},
    )


def write_set(path, emb_set, manifest):
    write_embedding_set(emb_set, manifest, path)
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_pair(rng):
    real_vecs = rng.standard_normal((6, 8))
    gen_vecs = rng.standard_normal((4, 8))
    real, real_mf = make_set(real_vecs, role="real")
    gen, gen_mf = make_set(gen_vecs, role="generated")
    return real, real_mf, gen, gen_mf
