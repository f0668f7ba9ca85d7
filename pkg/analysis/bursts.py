"""
Burst duration analysis
Threshold crossings of a path, burst and inter-burst durations in ticks and the
Hurst estimate H_BD = 2 - eta from the duration PDF P(T) ~ T^-eta
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from analysis.errors import DegenerateSeriesError, InsufficientDataError
from analysis.estimators import ExponentFit, FitRange, LogHistogram, histogram_fit, log_histogram
from analysis.series import Series

logger = logging.getLogger(__name__)

DEFAULT_MULTIPLIERS = (0.5, 1.0, 1.5)
# i.i.d. symmetric walks give eta of about 1.25-1.3 on the default window, not 1.5
DEFAULT_BURST_FIT_RANGE: FitRange = (2.0, 20.0)
WIDE_BURST_FIT_RANGE: FitRange = (3.0, 1000.0)
MIN_DURATIONS = 100


class DurationKind(Enum):
    BURSTS = "bursts"
    INTERBURSTS = "interbursts"
    BOTH = "both"


@dataclass(frozen=True, eq=False)
class DurationSample:
    """Complete burst and inter-burst durations at one threshold"""
    threshold: float
    bursts: np.ndarray
    interbursts: np.ndarray
    discarded_edges: int
    edge_ticks: int = 0

    def __post_init__(self):
        for name in ("bursts", "interbursts"):
            values = np.array(getattr(self, name), dtype=np.int64, copy=True)
            if values.size and values.min() < 1:
                raise ValueError(f"{name} must all be at least one tick")
            values.setflags(write=False)
            object.__setattr__(self, name, values)
        if abs(len(self.bursts) - len(self.interbursts)) > 1:
            raise ValueError(
                f"{len(self.bursts)} bursts and {len(self.interbursts)} interbursts cannot alternate")

    @property
    def total_ticks(self) -> int:
        return int(self.bursts.sum() + self.interbursts.sum() + self.edge_ticks)

    def select(self, kind: DurationKind) -> np.ndarray:
        if kind is DurationKind.BURSTS:
            return self.bursts
        if kind is DurationKind.INTERBURSTS:
            return self.interbursts
        return np.concatenate([self.bursts, self.interbursts])

    def summary(self) -> Dict[str, Any]:
        return {
            "threshold": self.threshold,
            "bursts": int(len(self.bursts)),
            "interbursts": int(len(self.interbursts)),
            "discarded_edges": self.discarded_edges,
            "edge_ticks": self.edge_ticks,
            "mean_burst": float(self.bursts.mean()) if len(self.bursts) else None,
            "mean_interburst": float(self.interbursts.mean()) if len(self.interbursts) else None,
        }


@dataclass(frozen=True)
class BurstFit:
    eta: float
    h_bd: float
    fit: ExponentFit
    kind: DurationKind = DurationKind.BURSTS
    threshold: float = 0.0
    extra: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.h_bd != 2.0 - self.eta:
            raise ValueError(f"h_bd={self.h_bd} is not 2 - eta for eta={self.eta}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eta": self.eta,
            "h_bd": self.h_bd,
            "kind": self.kind.value,
            "threshold": self.threshold,
            "fit": self.fit.to_dict(),
            **self.extra,
        }


def _above(x: Series, threshold: float) -> np.ndarray:
    # X = h sits on the above side
    return np.asarray(x.values, dtype=np.float64) >= threshold


def find_crossings(x: Series, threshold: float) -> List[int]:
    """Indices i where X(i-1) and X(i) fall on different sides of the threshold"""
    x.require_non_empty()
    above = _above(x, threshold)
    return (np.flatnonzero(above[1:] != above[:-1]) + 1).tolist()


def durations(x: Series, threshold: float) -> DurationSample:
    """Split the path at its crossings; the leading and trailing segments are censored and dropped"""
    x.require_non_empty()
    above = _above(x, threshold)
    n = len(above)
    crossings = np.flatnonzero(above[1:] != above[:-1]) + 1

    if len(crossings) == 0:
        return DurationSample(threshold, np.empty(0, np.int64), np.empty(0, np.int64), 1, n - 1)

    edge_ticks = int(crossings[0] + (n - 1 - crossings[-1]))
    gaps = np.diff(crossings)
    starts_above = above[crossings[:-1]]
    return DurationSample(
        threshold=float(threshold),
        bursts=gaps[starts_above],
        interbursts=gaps[~starts_above],
        discarded_edges=2,
        edge_ticks=edge_ticks,
    )


def threshold_sweep(x: Series, multipliers: Sequence[float] = DEFAULT_MULTIPLIERS) -> Dict[float, DurationSample]:
    """One DurationSample per threshold h = multiplier * sigma(X)"""
    x.require_non_empty()
    sigma = float(np.std(np.asarray(x.values, dtype=np.float64)))
    if sigma == 0:
        raise DegenerateSeriesError("zero variance path has no thresholds to sweep")
    return {float(m): durations(x, float(m) * sigma) for m in multipliers}


def duration_histogram(sample: DurationSample, kind: DurationKind = DurationKind.BURSTS,
                       bins_per_decade: int = 10) -> LogHistogram:
    values = sample.select(kind)
    if values.size == 0:
        raise InsufficientDataError(f"no {kind.value} at threshold {sample.threshold}")
    return log_histogram(values, bins_per_decade, integer=True)


def _fit_durations(values: np.ndarray, threshold: float, fit_range: Optional[FitRange], kind: DurationKind,
                   bins_per_decade: int, min_bin_count: int, **extra: Any) -> BurstFit:
    if values.size < MIN_DURATIONS:
        raise InsufficientDataError(f"{values.size} {kind.value} at threshold {threshold}, need {MIN_DURATIONS}")
    if fit_range is not None and fit_range[0] >= values.max():
        raise InsufficientDataError(
            f"fit range {fit_range} starts beyond the longest duration {int(values.max())}")

    histogram = log_histogram(values, bins_per_decade, integer=True)
    line = histogram_fit(histogram, fit_range, min_count=min_bin_count)
    eta = -line.slope
    fit = ExponentFit(
        exponent=eta,
        intercept=line.intercept,
        fit_range=line.fit_range,
        r_squared=line.r_squared,
        std_error=line.std_error,
        n_points=line.n_points,
    )
    logger.debug(f"{kind.value} fit at h={threshold}: eta={eta:.3f} on {values.size} durations")
    return BurstFit(eta=eta, h_bd=2.0 - eta, fit=fit, kind=kind, threshold=threshold,
                    extra={"durations": int(values.size), **extra})


def fit_burst_pdf(sample: DurationSample, fit_range: Optional[FitRange] = DEFAULT_BURST_FIT_RANGE,
                  kind: DurationKind = DurationKind.BURSTS, bins_per_decade: int = 10,
                  min_bin_count: int = 3) -> BurstFit:
    """eta from the log-log slope of the duration PDF; H_BD = 2 - eta"""
    return _fit_durations(sample.select(kind), sample.threshold, fit_range, kind, bins_per_decade, min_bin_count)


def fit_pooled_burst_pdf(samples: Sequence[DurationSample], fit_range: Optional[FitRange] = DEFAULT_BURST_FIT_RANGE,
                         kind: DurationKind = DurationKind.BURSTS, bins_per_decade: int = 10,
                         min_bin_count: int = 3) -> BurstFit:
    """One duration PDF over independent paths cut at the same threshold"""
    if not samples:
        raise InsufficientDataError("no duration samples to pool")
    thresholds = {sample.threshold for sample in samples}
    if len(thresholds) > 1:
        raise ValueError(f"pooled samples must share one threshold, got {sorted(thresholds)}")
    values = np.concatenate([sample.select(kind) for sample in samples])
    return _fit_durations(values, samples[0].threshold, fit_range, kind, bins_per_decade, min_bin_count,
                          paths=len(samples))
