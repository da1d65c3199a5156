"""Independent reference implementations used only by the tests.

Each oracle deliberately takes a different algorithmic route than the
library: similarity via pure-Python loops, covariance via explicit
two-pass accumulation, the Frechet trace term via scipy's Schur-based
sqrtm on the covariance product and via high-precision mpmath
eigenvalues. Agreement between routes is the evidence; nothing here
imports from repaudit.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
import scipy.linalg


def cosine_naive(u, v) -> float:
    """Scalar double-loop cosine; no numpy vector ops."""
    dot = 0.0
    nu = 0.0
    nv = 0.0
    for a, b in zip(list(u), list(v)):
        dot += float(a) * float(b)
        nu += float(a) * float(a)
        nv += float(b) * float(b)
    value = dot / (math.sqrt(nu) * math.sqrt(nv))
    return min(1.0, max(-1.0, value))


def similarity_matrix_naive(real_rows, gen_rows):
    """n x m nested-list similarity table."""
    return [[cosine_naive(r, g) for g in gen_rows] for r in real_rows]


def top_scores_naive(real_rows, gen_rows):
    """Per-generated best score and best real index, lowest index wins ties."""
    table = similarity_matrix_naive(real_rows, gen_rows)
    out = []
    for j in range(len(gen_rows)):
        best_i = 0
        best = table[0][j]
        for i in range(1, len(real_rows)):
            if table[i][j] > best:
                best = table[i][j]
                best_i = i
        out.append((best_i, best))
    return out


def mean_naive(rows):
    n = len(rows)
    d = len(rows[0])
    mu = [0.0] * d
    for row in rows:
        for k in range(d):
            mu[k] += float(row[k])
    return [x / n for x in mu]


def cov_two_pass(rows):
    """Unbiased sample covariance, explicit second pass over residuals."""
    n = len(rows)
    d = len(rows[0])
    mu = mean_naive(rows)
    cov = [[0.0] * d for _ in range(d)]
    for row in rows:
        resid = [float(row[k]) - mu[k] for k in range(d)]
        for a in range(d):
            for b in range(d):
                cov[a][b] += resid[a] * resid[b]
    return [[cov[a][b] / (n - 1) for b in range(d)] for a in range(d)]


def _sqrtm_quiet(a):
    # disp=False returns an error estimate whose computation emits a
    # harmless divide warning on singular input
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        out = scipy.linalg.sqrtm(a, disp=False)
    s = out[0] if isinstance(out, tuple) else out
    if np.iscomplexobj(s):
        s = s.real
    return s


def frechet_scipy(mu_p, cov_p, mu_q, cov_q) -> float:
    """Frechet distance via scipy.linalg.sqrtm on the covariance product."""
    mu_p = np.asarray(mu_p, dtype=np.float64)
    mu_q = np.asarray(mu_q, dtype=np.float64)
    cov_p = np.asarray(cov_p, dtype=np.float64)
    cov_q = np.asarray(cov_q, dtype=np.float64)
    diff = mu_p - mu_q
    covmean = _sqrtm_quiet(cov_p @ cov_q)
    return float(diff @ diff + np.trace(cov_p) + np.trace(cov_q) - 2.0 * np.trace(covmean))


def frechet_mpmath(mu_p, cov_p, mu_q, cov_q, dps: int = 50) -> float:
    """High-precision Frechet distance.

    The trace term uses the eigenvalues of the (generally nonsymmetric)
    product cov_p @ cov_q, which for PSD factors are real and
    nonnegative: tr sqrt(cov_p cov_q) = sum_i sqrt(lambda_i).
    """
    import mpmath as mp

    with mp.workdps(dps):
        mu_p = [mp.mpf(repr(float(x))) for x in mu_p]
        mu_q = [mp.mpf(repr(float(x))) for x in mu_q]
        d = len(mu_p)
        p = mp.matrix([[mp.mpf(repr(float(cov_p[a][b]))) for b in range(d)] for a in range(d)])
        q = mp.matrix([[mp.mpf(repr(float(cov_q[a][b]))) for b in range(d)] for a in range(d)])
        mean_term = mp.fsum((mu_p[k] - mu_q[k]) ** 2 for k in range(d))
        eig = mp.eig(p * q, left=False, right=False)
        trace_sqrt = mp.fsum(mp.sqrt(max(mp.re(lam), mp.mpf(0))) for lam in eig)
        trace_p = mp.fsum(p[k, k] for k in range(d))
        trace_q = mp.fsum(q[k, k] for k in range(d))
        return float(mean_term + trace_p + trace_q - 2 * trace_sqrt)


def sqrtm_scipy(a):
    return _sqrtm_quiet(np.asarray(a, dtype=np.float64))


def random_psd(rng: np.random.Generator, dim: int, rank: int | None = None):
    """Seeded PSD matrix; full rank by default."""
    rank = dim if rank is None else rank
    f = rng.standard_normal((dim, rank))
    return f @ f.T / rank


def random_spd(rng: np.random.Generator, dim: int, jitter: float = 0.5):
    """Strictly positive definite: PSD plus a diagonal floor."""
    return random_psd(rng, dim) + jitter * np.eye(dim)
