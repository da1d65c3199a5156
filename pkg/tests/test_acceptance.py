"""Acceptance gate: one test per primary behavioral criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line naming the
criterion (visible with ``pytest -s`` or in the captured output) and
asserts it, so the suite is both human-readable evidence and a hard
gate. Oracles live in ``oracles.py`` and use different algorithms from
the library.
"""

from __future__ import annotations

import hashlib
import json
import shutil
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from repaudit import (
    AuditConfig,
    ChecksumMismatchError,
    EmbeddingSet,
    assemble_audit,
    crop,
    flagged_curve,
    flip,
    frechet_distance,
    fvd,
    gaussian_stats,
    matrix_sqrt_psd,
    occlude,
    rank_by_replication,
    read_embedding_set,
    rotate,
    score,
    similarity_matrix,
    top_vsscd,
    translate,
    write_embedding_set,
)
from repaudit.augment import FrameImage
from repaudit.frechet import GaussianStats

from .conftest import make_set
from .oracles import frechet_scipy, random_spd, similarity_matrix_naive, top_scores_naive

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def report_line(ok: bool, name: str, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    suffix = f": {detail}" if detail else ""
    print(f"[{status}] {name}{suffix}")
    assert ok, f"{name}{suffix}"


def test_similarity_oracle_equivalence():
    """50 randomized pairs match a scalar double-loop oracle within 1e-6."""
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 21))
        m = int(rng.integers(1, 21))
        d = int(rng.integers(1, 33))
        real, _ = make_set(rng.standard_normal((n, d)), role="real")
        gen, _ = make_set(rng.standard_normal((m, d)), role="generated")

        mat = similarity_matrix(real, gen)
        expected = np.asarray(similarity_matrix_naive(real.vectors.tolist(),
                                                      gen.vectors.tolist()))
        worst = max(worst, float(np.max(np.abs(mat.values - expected))))
        assert abs(top_vsscd(mat) - expected.max()) <= 1e-6

        rep = score(real, gen)
        for entry, (best_i, best_s) in zip(rep.per_gen,
                                           top_scores_naive(real.vectors.tolist(),
                                                            gen.vectors.tolist())):
            assert entry.best_real_id == real.ids[best_i]
            assert abs(entry.top_score - best_s) <= 1e-6
    elapsed = time.perf_counter() - start
    report_line(worst <= 1e-6 and elapsed < 5.0,
                "similarity oracle equivalence",
                f"50 pairs, max deviation {worst:.2e}, {elapsed:.2f}s")


def test_frechet_closed_forms():
    """Identical inputs give 0; 1-D and commuting-diagonal cases match closed forms."""
    rng = np.random.default_rng(202)
    start = time.perf_counter()

    vecs = rng.standard_normal((25, 6))
    real, _ = make_set(vecs, role="real")
    gen, _ = make_set(vecs, role="generated")
    self_fvd = fvd(real, gen).value
    assert abs(self_fvd) <= 1e-6

    one_d = frechet_distance(
        GaussianStats(mean=np.array([0.0]), cov=np.array([[1.0]]), count=10),
        GaussianStats(mean=np.array([1.0]), cov=np.array([[1.0]]), count=10),
    ).value
    assert abs(one_d - 1.0) <= 1e-8

    worst = 0.0
    for _ in range(20):
        dim = int(rng.integers(1, 9))
        mu_p, mu_q = rng.standard_normal(dim), rng.standard_normal(dim)
        var_p, var_q = rng.uniform(0.1, 4.0, dim), rng.uniform(0.1, 4.0, dim)
        expected = float(np.sum((mu_p - mu_q) ** 2) +
                         np.sum((np.sqrt(var_p) - np.sqrt(var_q)) ** 2))
        got = frechet_distance(
            GaussianStats(mean=mu_p, cov=np.diag(var_p), count=10),
            GaussianStats(mean=mu_q, cov=np.diag(var_q), count=10),
        ).value
        worst = max(worst, abs(got - expected))
    elapsed = time.perf_counter() - start
    report_line(worst <= 1e-8 and elapsed < 5.0,
                "Frechet closed forms",
                f"self {self_fvd:.1e}, 1-D err {abs(one_d - 1.0):.1e}, "
                f"diagonal worst {worst:.2e}, {elapsed:.2f}s")


def test_matrix_sqrt_reconstruction():
    """S*S reproduces 20 seeded PD matrices up to 64x64 with no clamping."""
    rng = np.random.default_rng(303)
    worst = 0.0
    total_clamped = 0
    for _ in range(20):
        dim = int(rng.integers(2, 65))
        a = random_spd(rng, dim)
        s, clamped = matrix_sqrt_psd(a)
        total_clamped += clamped
        worst = max(worst, float(np.max(np.abs(s @ s - a))))
    report_line(worst < 1e-5 and total_clamped == 0,
                "matrix-sqrt reconstruction",
                f"20 PD matrices, max |S*S - A| = {worst:.2e}, clamped {total_clamped}")


def test_curve_consistency():
    """Flagged sweep flags exactly the planted duplicates; every point's FVD
    matches an independent scipy-route recomputation on the hand-filtered subset."""
    rng = np.random.default_rng(404)
    n_real, m_gen, k_dups, dim = 14, 12, 5, 8
    half = dim // 2
    real_vecs = np.zeros((n_real, dim))
    real_vecs[:, :half] = rng.standard_normal((n_real, half))
    gen_vecs = np.zeros((m_gen, dim))
    gen_vecs[:, half:] = rng.standard_normal((m_gen, half))
    for j in range(k_dups):
        gen_vecs[j] = real_vecs[j]
    real, _ = make_set(real_vecs, role="real")
    gen, _ = make_set(gen_vecs, role="generated")

    rep = score(real, gen, threshold=0.6)
    flags_exact = sorted(rep.replicated_ids) == sorted(gen.ids[:k_dups])

    curve = flagged_curve(real, gen, rep)
    baseline = fvd(real, gen).value
    first_ok = abs(curve.points[0].fvd - baseline) <= 1e-9

    ranking = [g for g in rank_by_replication(rep) if g in set(rep.replicated_ids)]
    worst = 0.0
    gen_arr = np.asarray(gen.vectors, dtype=np.float64)
    real_arr = np.asarray(real.vectors, dtype=np.float64)
    mu_r = real_arr.mean(axis=0)
    cov_r = np.cov(real_arr, rowvar=False)
    for p in curve.points:
        removed = set(ranking[: p.removed_count])
        keep_rows = [i for i, gid in enumerate(gen.ids) if gid not in removed]
        sub = gen_arr[keep_rows]
        expected = frechet_scipy(mu_r, cov_r, sub.mean(axis=0), np.cov(sub, rowvar=False))
        worst = max(worst, abs(p.fvd - expected))
    report_line(flags_exact and first_ok and worst <= 1e-6,
                "curve consistency",
                f"flags exact: {flags_exact}, first-point err "
                f"{abs(curve.points[0].fvd - baseline):.1e}, max point err {worst:.2e}")


def test_replication_reward_demonstration():
    """Exact copies score a lower FVD than honest same-distribution samples
    while their copy-similarity is higher; the report shows both together."""
    rng = np.random.default_rng(505)
    dim, n_real, m = 6, 60, 30
    pool = rng.standard_normal((n_real + m, dim))
    real_vecs = pool[:n_real]
    fresh_vecs = pool[n_real:]          # same distribution, disjoint samples
    copy_vecs = real_vecs[:m].copy()    # exact training replicas

    real, real_mf = make_set(real_vecs, role="real")
    copies, gen_mf = make_set(copy_vecs, role="generated")
    fresh, _ = make_set(fresh_vecs, role="generated")

    fvd_copies = fvd(real, copies).value
    fvd_fresh = fvd(real, fresh).value
    avg_copies = score(real, copies).average_top
    avg_fresh = score(real, fresh).average_top

    reward = fvd_copies < fvd_fresh
    detect = avg_copies > avg_fresh

    audit = assemble_audit(real, copies, AuditConfig(), real_mf, gen_mf)
    md = audit.to_markdown()
    metrics_block = md.split("## Metrics")[1].split("##")[0]
    side_by_side = ("VSSCD" in metrics_block) and ("FVD" in metrics_block)

    report_line(reward and detect and side_by_side,
                "replication-reward demonstration",
                f"FVD copies {fvd_copies:.3f} < fresh {fvd_fresh:.3f}; "
                f"avg top VSSCD copies {avg_copies:.3f} > fresh {avg_fresh:.3f}; "
                f"both in one report table: {side_by_side}")


def test_augmentation_exactness():
    """Flip involution, identity parameters, occlusion containment, and the
    hand-enumerated raster cases hold byte-exactly."""
    rng = np.random.default_rng(606)
    img = FrameImage(rng.integers(0, 256, size=(16, 16, 3), dtype=np.int64).astype(np.uint8))

    involution = np.array_equal(flip(flip(img)).pixels, img.pixels)
    identity = (np.array_equal(crop(img, 1.0).pixels, img.pixels)
                and np.array_equal(translate(img, 0.0, 0.0).pixels, img.pixels)
                and np.array_equal(rotate(img, 0.0).pixels, img.pixels))

    occluded = occlude(img, 0.25).pixels
    delta = np.argwhere((occluded != img.pixels).any(axis=2))
    rect = max(1, int(0.25 * 16))
    contained = (len(delta) > 0
                 and bool((occluded[delta[:, 0], delta[:, 1]] == 0).all())
                 and int(np.ptp(delta[:, 0])) + 1 <= rect
                 and int(np.ptp(delta[:, 1])) + 1 <= rect)

    g2 = np.repeat(np.array([[1, 2], [3, 4]], dtype=np.uint8)[:, :, None], 3, axis=2)
    flip_2x2 = flip(FrameImage(g2)).pixels[:, :, 0].tolist() == [[2, 1], [4, 3]]

    g4 = np.repeat(np.arange(1, 17, dtype=np.uint8).reshape(4, 4)[:, :, None], 3, axis=2)
    crop_4x4 = crop(FrameImage(g4), 0.5).pixels[:, :, 0].tolist() == [
        [6, 6, 7, 7], [6, 6, 7, 7], [10, 10, 11, 11], [10, 10, 11, 11]]

    report_line(involution and identity and contained and flip_2x2 and crop_4x4,
                "augmentation exactness",
                f"involution {involution}, identities {identity}, occlusion contained "
                f"{contained}, 2x2 flip {flip_2x2}, 4x4 crop {crop_4x4}")


def test_format_round_trip_and_corruption(tmp_path):
    """read(write(S)) == S; every flipped payload byte is rejected; the
    committed fixtures match their pinned SHA-256 digests."""
    rng = np.random.default_rng(707)
    original, manifest = make_set(rng.standard_normal((3, 4)), role="generated")
    path = tmp_path / "rt.emb"
    write_embedding_set(original, manifest, path)
    loaded, _ = read_embedding_set(path)
    round_trip = loaded == original

    blob = bytearray(path.read_bytes())
    payload = slice(17, 17 + 3 * 4 * 4)
    rejected = 0
    for off in range(payload.start, payload.stop):
        corrupt = bytearray(blob)
        corrupt[off] ^= 0xFF
        path.write_bytes(bytes(corrupt))
        try:
            read_embedding_set(path)
        except ChecksumMismatchError:
            rejected += 1
    all_rejected = rejected == payload.stop - payload.start

    pins = json.loads((FIXTURES / "sha256sums.json").read_text())
    pinned_ok = all(
        hashlib.sha256((FIXTURES / name).read_bytes()).hexdigest() == digest
        for name, digest in pins.items()
    )
    report_line(round_trip and all_rejected and pinned_ok,
                "format round-trip and corruption detection",
                f"round trip {round_trip}, {rejected}/{payload.stop - payload.start} "
                f"corrupt bytes rejected, {len(pins)} fixture hashes pinned")


def test_cli_end_to_end(tmp_path):
    """`audit` on the committed fixtures reproduces the goldens byte for
    byte; failure paths exit with the documented codes and write nothing."""
    work = tmp_path / "work"
    work.mkdir()
    for name in ("real.emb", "real.emb.manifest.json", "gen.emb", "gen.emb.manifest.json"):
        shutil.copy(FIXTURES / name, work / name)

    proc = subprocess.run(
        [sys.executable, "-m", "repaudit.cli", "audit",
         "--real", "real.emb", "--gen", "gen.emb", "--out", "golden"],
        cwd=work, capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    names = ("audit_report.json", "audit_report.md", "similarity_report.csv", "curve.csv")
    identical = all(
        (work / "golden" / n).read_bytes() == (FIXTURES / "golden" / n).read_bytes()
        for n in names
    )

    blob = bytearray((work / "gen.emb").read_bytes())
    blob[20] ^= 0xFF
    (work / "gen.emb").write_bytes(bytes(blob))
    bad = subprocess.run(
        [sys.executable, "-m", "repaudit.cli", "audit",
         "--real", "real.emb", "--gen", "gen.emb", "--out", "bad_out"],
        cwd=work, capture_output=True, text=True,
    )
    corrupt_ok = bad.returncode == 2 and not list((work / "bad_out").glob("*")) \
        if (work / "bad_out").exists() else bad.returncode == 2

    missing = subprocess.run(
        [sys.executable, "-m", "repaudit.cli", "audit",
         "--real", "absent.emb", "--gen", "gen.emb", "--out", "io_out"],
        cwd=work, capture_output=True, text=True,
    )
    io_ok = missing.returncode == 3 and not (work / "io_out").exists()

    report_line(identical and corrupt_ok and io_ok,
                "CLI end-to-end goldens",
                f"4 golden files byte-identical: {identical}; corrupt input exit 2 "
                f"with no outputs: {corrupt_ok}; missing input exit 3: {io_ok}")
