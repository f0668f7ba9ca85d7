"""
Series surgeries
Increment shuffling, soft bounding and ARFIMA(0,d,0) fractional reversion
"""

import hashlib
import logging

import numpy as np
from scipy import signal

from analysis.errors import EmptyInputError, SeriesKindError, TransformError
from analysis.series import Series, SeriesKind

logger = logging.getLogger(__name__)

RNG_NAME = "PCG64"
DEFAULT_BOUND = 100_000.0
DEFAULT_TRUNCATION = 1000

_ACCUMULATE_KINDS = (SeriesKind.INCREMENTS, SeriesKind.SHUFFLED, SeriesKind.REVERTED, SeriesKind.SYNTHETIC)
_REVERT_KINDS = (SeriesKind.INCREMENTS, SeriesKind.SHUFFLED, SeriesKind.REVERTED, SeriesKind.SYNTHETIC)


def derive_seed(master_seed: int, *parts: str) -> int:
    """Stable 64-bit seed for a task key, independent of scheduling order"""
    digest = hashlib.blake2b(digest_size=8)
    digest.update(str(int(master_seed)).encode())
    for part in parts:
        digest.update(b"\x1f")
        digest.update(str(part).encode())
    return int.from_bytes(digest.digest(), "big")


def _check_memory(d: float) -> None:
    if not -0.5 < d < 0.5:
        raise TransformError(f"memory parameter d={d} outside (-0.5, 0.5)")


def shuffle_increments(series: Series, seed: int) -> Series:
    """Y_R(i) = Random[Y(i)]: uniform permutation from a seeded PCG64 generator"""
    series.require_non_empty()
    series.require_increments("shuffle_increments")
    rng = np.random.Generator(np.random.PCG64(seed))
    shuffled = rng.permutation(series.values)
    return series.with_values(shuffled, SeriesKind.SHUFFLED, True, "shuffled increments",
                              rng=RNG_NAME, seed=int(seed))


def accumulate(series: Series, start: float = 0) -> Series:
    """X(j) = start + sum of the first j increments"""
    series.require_increments("accumulate")
    if series.kind not in _ACCUMULATE_KINDS:
        raise SeriesKindError(f"cannot accumulate a {series.kind.value} series")
    values = start + np.cumsum(series.values)
    kind = SeriesKind.EMPIRICAL if series.kind is SeriesKind.INCREMENTS else series.kind
    return series.with_values(values, kind, False, f"accumulated {series.kind.value}", start=start)


def bound_series(series: Series, bound: float = DEFAULT_BOUND, start: float = 0) -> Series:
    """X_RB(i+1) = max(min(X_RB(i) + Y(i), B), -B)"""
    if not bound > 0:
        raise TransformError(f"bound must be positive, got {bound}")
    series.require_increments("bound_series")
    level = float(start)
    out = []
    append = out.append
    for step in series.values.tolist():
        level = max(min(level + step, bound), -bound)
        append(level)
    return series.with_values(np.array(out, dtype=np.float64), SeriesKind.BOUNDED, False,
                              "bounded accumulation", bound=float(bound))


def fractional_weights(d: float, n_terms: int) -> np.ndarray:
    """w_j = Gamma(j+d) / (Gamma(d) Gamma(j+1)) by the recursion w_j = w_{j-1} (j-1+d) / j"""
    _check_memory(d)
    if n_terms < 1:
        raise TransformError(f"n_terms must be at least 1, got {n_terms}")
    j = np.arange(1, n_terms, dtype=np.float64)
    return np.concatenate([[1.0], np.cumprod((j - 1.0 + d) / j)])


def fractional_revert(series: Series, d: float, n_terms: int = DEFAULT_TRUNCATION) -> Series:
    """Y_F(i) = sum_{j=0}^{min(i-1, n_terms-1)} w_j Z(i-j), length preserved"""
    series.require_non_empty()
    series.require_increments("fractional_revert")
    if series.kind not in _REVERT_KINDS:
        raise SeriesKindError(f"cannot revert a {series.kind.value} series")
    weights = fractional_weights(d, n_terms)
    z = np.asarray(series.values, dtype=np.float64)
    if d == 0:
        reverted = z.copy()
    else:
        reverted = signal.convolve(z, weights, method="auto")[: len(z)]
    if len(z) <= n_terms:
        logger.warning(f"reversion with {n_terms} terms on {len(z)} samples never leaves warm-up")
    kind = SeriesKind.SYNTHETIC if series.kind is SeriesKind.SYNTHETIC else SeriesKind.REVERTED
    return series.with_values(reverted, kind, True, "fractionally reverted increments",
                              d=float(d), truncation=int(n_terms))


def drop_warmup(series: Series, n_terms: int) -> Series:
    """Remove the first n_terms samples biased by the truncated history"""
    if len(series) <= n_terms:
        raise EmptyInputError(f"series after dropping {n_terms} warm-up samples")
    return series.with_values(series.values[n_terms:], series.kind, series.is_increments,
                              series.meta.source, warmup_dropped=int(n_terms))

