"""Input validation helpers.

Thin wrappers around array coercion that raise :class:`ValidationError`
instead of assorted numpy/sklearn exceptions, so callers get a single
error family with the documented CLI exit code.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import ValidationError


def check_matrix(X, *, name: str = "X", dtype=np.float64, min_rows: int = 1) -> np.ndarray:
    """Coerce ``X`` to a finite 2-D float array of at least ``min_rows`` rows."""
    try:
        arr = np.asarray(X, dtype=dtype)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} is not numeric: {exc}") from exc
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-D (rows of descriptor vectors), got shape {arr.shape}")
    if arr.shape[0] < min_rows:
        raise ValidationError(f"{name} needs at least {min_rows} row(s), got {arr.shape[0]}")
    if arr.shape[1] < 1:
        raise ValidationError(f"{name} has zero-length vectors")
    if not np.isfinite(arr).all():
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def check_vector(v, *, name: str = "v", dtype=np.float64) -> np.ndarray:
    """Coerce ``v`` to a finite 1-D float array."""
    try:
        arr = np.asarray(v, dtype=dtype)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} is not numeric: {exc}") from exc
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError(f"{name} is empty")
    if not np.isfinite(arr).all():
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def check_square_symmetric(a, *, name: str = "matrix", tol: float = 1e-8) -> np.ndarray:
    """Coerce to a square matrix that is symmetric within ``tol`` (max abs)."""
    arr = check_matrix(a, name=name)
    if arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {arr.shape}")
    asym = float(np.max(np.abs(arr - arr.T))) if arr.size else 0.0
    if asym > tol:
        raise ValidationError(f"{name} is not symmetric: max|A - A.T| = {asym:.3e} > {tol:.1e}")
    return arr


def check_ids(ids: Sequence[str], count: int, *, name: str = "ids") -> list[str]:
    """Validate an id list: right length, all strings, all unique."""
    out = [str(i) for i in ids]
    if len(out) != count:
        raise ValidationError(f"{name} has {len(out)} entries for {count} vectors")
    if len(set(out)) != len(out):
        dupes = sorted({i for i in out if out.count(i) > 1})
        raise ValidationError(f"{name} contains duplicates: {dupes[:5]}")
    return out


def check_fraction(x: float, *, name: str, lo: float = 0.0, hi: float = 1.0,
                   inclusive_lo: bool = True, inclusive_hi: bool = True) -> float:
    """Validate a scalar fraction against an interval."""
    try:
        val = float(x)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} must be a number, got {x!r}") from exc
    ok_lo = val >= lo if inclusive_lo else val > lo
    ok_hi = val <= hi if inclusive_hi else val < hi
    if not (ok_lo and ok_hi and np.isfinite(val)):
        lob = "[" if inclusive_lo else "("
        hib = "]" if inclusive_hi else ")"
        raise ValidationError(f"{name} must lie in {lob}{lo}, {hi}{hib}, got {val}")
    return val
