"""
Scaling-exponent estimators
Sample MSD, autocovariance, Absolute Value estimator, Higuchi's method and
power-law tail fits of increment PDFs, all reported as ExponentFit records
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from analysis.errors import DegenerateSeriesError, EstimationError, InsufficientDataError
from analysis.series import Series

logger = logging.getLogger(__name__)

FitRange = Tuple[float, float]

AVE_MIN_BLOCKS = 8
HIGUCHI_MIN_STEPS = 4
DEFAULT_TAIL_FRACTION = 0.01
MIN_TAIL_SAMPLES = 1000


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares power-law fit on log-log points"""
    exponent: float
    intercept: float
    fit_range: FitRange
    r_squared: float
    std_error: float
    n_points: int
    derived: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.fit_range[0] < self.fit_range[1]:
            raise ValueError(f"degenerate fit range {self.fit_range}")
        if self.n_points < 3:
            raise ValueError(f"a fit needs at least 3 points, got {self.n_points}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "exponent": self.exponent,
            "intercept": self.intercept,
            "fit_range": list(self.fit_range),
            "r_squared": self.r_squared,
            "std_error": self.std_error,
            "n_points": self.n_points,
            "derived": dict(self.derived),
        }


@dataclass(frozen=True, eq=False)
class LogHistogram:
    """Histogram on geometric bins, density normalized to integrate to one"""
    bin_edges: np.ndarray
    densities: np.ndarray
    counts: np.ndarray
    integer: bool = False

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    @property
    def centers(self) -> np.ndarray:
        if self.integer:
            # geometric mean of the first and last whole tick in each bin
            return np.sqrt(self.bin_edges[:-1] * (self.bin_edges[1:] - 1))
        return np.sqrt(self.bin_edges[:-1] * self.bin_edges[1:])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "bin_center": self.centers,
            "density": self.densities,
            "count": self.counts,
        })


class _Line(NamedTuple):
    slope: float
    intercept: float
    r_squared: float
    std_error: float
    fit_range: FitRange
    n_points: int


class TailSide(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    ABSOLUTE = "absolute"


def geometric_grid(max_value: int, min_value: int = 1) -> List[int]:
    """Integer grid floor(2^(j/2)) between min_value and max_value"""
    grid = []
    j = 0
    while True:
        n = int(math.floor(2 ** (j / 2)))
        if n > max_value:
            break
        if n >= min_value and (not grid or n != grid[-1]):
            grid.append(n)
        j += 1
    return grid


def _loglog_line(x: Sequence[float], y: Sequence[float], fit_range: Optional[FitRange] = None) -> _Line:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    mask = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    if fit_range is not None:
        mask &= (x >= fit_range[0]) & (x <= fit_range[1])
    if mask.sum() < 3:
        raise InsufficientDataError(f"need at least 3 usable points, found {int(mask.sum())}")
    xs, ys = x[mask], y[mask]
    if xs.min() == xs.max():
        raise InsufficientDataError("all fit points share one abscissa")
    result = stats.linregress(np.log(xs), np.log(ys))
    return _Line(
        slope=float(result.slope),
        intercept=float(result.intercept),
        r_squared=float(result.rvalue ** 2),
        std_error=float(result.stderr),
        fit_range=(float(xs.min()), float(xs.max())),
        n_points=int(mask.sum()),
    )


def _fit_from_line(line: _Line, exponent: float, **derived: Any) -> ExponentFit:
    return ExponentFit(
        exponent=float(exponent),
        intercept=line.intercept,
        fit_range=line.fit_range,
        r_squared=line.r_squared,
        std_error=line.std_error,
        n_points=line.n_points,
        derived=derived,
    )


def default_msd_fit_range(n: int) -> FitRange:
    """k in [10, N/100]"""
    return (10.0, max(n / 100.0, 11.0))


def default_lags(n: int, max_fraction: float = 0.1) -> List[int]:
    return geometric_grid(max(int(n * max_fraction), 1))


def _check_lags(lags: Sequence[int], n: int, minimum: int) -> List[int]:
    checked = [int(k) for k in lags]
    if not checked:
        raise EstimationError("no lags given")
    for k in checked:
        if k < minimum:
            raise EstimationError(f"lag {k} below {minimum}")
        if k >= n:
            raise EstimationError(f"lag {k} not below series length {n}")
    return checked


def sample_msd(x: Series, lags: Optional[Sequence[int]] = None) -> List[Tuple[int, float]]:
    """M_N(k) = (1/(N-k)) sum_i (X_{i+k} - X_i)^2"""
    x.require_non_empty()
    values = np.asarray(x.values, dtype=np.float64)
    n = len(values)
    checked = _check_lags(default_lags(n) if lags is None else lags, n, 1)
    return [(k, float(np.mean((values[k:] - values[:-k]) ** 2))) for k in checked]


def fit_msd_exponent(msd: Sequence[Tuple[int, float]], fit_range: Optional[FitRange] = None) -> ExponentFit:
    """lambda from M_N(k) ~ k^lambda; memory parameter d = (lambda - 1) / 2"""
    points = [(k, m) for k, m in msd if fit_range is None or fit_range[0] <= k <= fit_range[1]]
    zeros = [k for k, m in points if m == 0]
    if zeros:
        logger.warning(f"excluding {len(zeros)} MSD points with M(k)=0 at lags {zeros[:5]}")
    points = [(k, m) for k, m in points if m > 0]
    if len(points) < 3:
        raise InsufficientDataError(f"MSD fit needs 3 points with M(k) > 0, found {len(points)}")
    line = _loglog_line([k for k, _ in points], [m for _, m in points])
    return _fit_from_line(line, line.slope, d=(line.slope - 1.0) / 2.0)


def autocovariance(y: Series, lags: Sequence[int], centered: bool = False) -> List[Tuple[int, float]]:
    """rho(k) = (1/(N-k)) sum_{i=1}^{N-k} Y_i Y_{i+k}; uncentered unless asked"""
    y.require_non_empty()
    values = np.asarray(y.values, dtype=np.float64)
    if centered:
        values = values - values.mean()
    n = len(values)
    checked = _check_lags(lags, n, 0)
    out = []
    for k in checked:
        if k == 0:
            out.append((0, float(np.mean(values * values))))
        else:
            out.append((k, float(np.mean(values[:-k] * values[k:]))))
    return out


def default_block_sizes(n: int, max_size: Optional[int] = None) -> List[int]:
    """AVE grid capped so every block size leaves at least 8 blocks"""
    cap = n // AVE_MIN_BLOCKS
    if max_size is not None:
        cap = min(cap, max_size)
    return geometric_grid(cap)


def ave_hurst(y: Series, block_sizes: Optional[Sequence[int]] = None) -> ExponentFit:
    """Absolute Value estimator: delta_n ~ n^(H_AV - 1)"""
    y.require_non_empty()
    y.require_increments("ave_hurst")
    values = np.asarray(y.values, dtype=np.float64)
    n_total = len(values)
    if np.ptp(values) == 0:
        raise DegenerateSeriesError("constant increments")
    sizes = default_block_sizes(n_total) if block_sizes is None else [int(n) for n in block_sizes]
    overall = values.mean()

    deltas = []
    for n in sizes:
        m = n_total // n if n >= 1 else 0
        if m < AVE_MIN_BLOCKS:
            raise EstimationError(f"block size {n} leaves {m} blocks, need {AVE_MIN_BLOCKS}")
        block_means = values[: m * n].reshape(m, n).mean(axis=1)
        delta = float(np.mean(np.abs(block_means - overall)))
        if delta == 0:
            raise DegenerateSeriesError(f"delta_n = 0 at n = {n}")
        deltas.append(delta)

    line = _loglog_line(sizes, deltas)
    return _fit_from_line(line, 1.0 + line.slope, slope=line.slope)


def default_window_sizes(n: int, max_size: Optional[int] = None) -> List[int]:
    """Higuchi grid capped so every window keeps at least 4 steps"""
    cap = (n - 1) // HIGUCHI_MIN_STEPS
    if max_size is not None:
        cap = min(cap, max_size)
    return geometric_grid(cap)


def higuchi_length(values: np.ndarray, n: int) -> float:
    """L_n = (N-1)/n^3 * sum over offsets of the mean |X_{i+jn} - X_{i+(j-1)n}|"""
    total = len(values)
    steps = np.abs(values[n:] - values[:-n])
    offsets = np.arange(len(steps)) % n
    per_offset = np.bincount(offsets, weights=steps, minlength=n) / np.bincount(offsets, minlength=n)
    return float((total - 1) / n ** 3 * per_offset.sum())


def higuchi_hurst(x: Series, window_sizes: Optional[Sequence[int]] = None) -> ExponentFit:
    """Higuchi's method: L_n ~ n^-D with D = 2 - H"""
    x.require_non_empty()
    x.require_path("higuchi_hurst")
    values = np.asarray(x.values, dtype=np.float64)
    total = len(values)
    sizes = default_window_sizes(total) if window_sizes is None else [int(n) for n in window_sizes]

    lengths = []
    for n in sizes:
        if n < 1 or (total - 1) // n < HIGUCHI_MIN_STEPS:
            raise EstimationError(f"window {n} leaves fewer than {HIGUCHI_MIN_STEPS} steps")
        length = higuchi_length(values, n)
        if length == 0:
            raise DegenerateSeriesError(f"zero path length at n = {n}")
        lengths.append(length)

    line = _loglog_line(sizes, lengths)
    dimension = -line.slope
    return _fit_from_line(line, 2.0 - dimension, D=dimension)


def log_histogram(samples: Sequence[float], bins_per_decade: int = 10, integer: bool = False) -> LogHistogram:
    """Geometric bins spanning [min, max]; integer mode aligns edges to whole ticks"""
    data = np.asarray(samples, dtype=np.float64)
    if data.size == 0:
        raise InsufficientDataError("histogram needs at least one sample")
    if (data <= 0).any():
        raise EstimationError("log histogram needs strictly positive samples")
    if bins_per_decade < 1:
        raise EstimationError(f"bins_per_decade must be positive, got {bins_per_decade}")
    low, high = float(data.min()), float(data.max())

    if integer:
        top = int(math.floor(high)) + 1
        raw = np.floor(low * 10.0 ** (np.arange(0, bins_per_decade * (math.log10(top / low) + 1) + 1) / bins_per_decade))
        edges = np.unique(np.concatenate([raw[raw < top], [top]])).astype(np.float64)
        counts, _ = np.histogram(data, bins=edges)
        # half-open integer bins: [e_k, e_{k+1}) holds e_{k+1} - e_k ticks
        densities = counts / (data.size * np.diff(edges))
        return LogHistogram(edges, densities, counts, integer=True)

    n_bins = int(math.floor(bins_per_decade * math.log10(high / low) + 1e-9)) + 1
    edges = low * 10.0 ** (np.arange(n_bins + 1) / bins_per_decade)
    counts, _ = np.histogram(data, bins=edges)
    densities = counts / (data.size * np.diff(edges))
    return LogHistogram(edges, densities, counts)


def histogram_fit(histogram: LogHistogram, fit_range: Optional[FitRange] = None,
                  min_count: int = 1) -> _Line:
    """Line through log density vs log bin center over bins holding enough samples"""
    keep = histogram.counts >= max(min_count, 1)
    return _loglog_line(histogram.centers[keep], histogram.densities[keep], fit_range)


def hill_estimate(tail: np.ndarray, x_min: float) -> float:
    """Hill estimate of the survival exponent above x_min"""
    logs = np.log(tail / x_min)
    total = logs.sum()
    if total <= 0:
        raise DegenerateSeriesError("tail has no spread above its threshold")
    return float(len(tail) / total)


def select_tail(values: np.ndarray, side: TailSide) -> np.ndarray:
    if side is TailSide.POSITIVE:
        return values[values > 0]
    if side is TailSide.NEGATIVE:
        return -values[values < 0]
    return np.abs(values[values != 0])


def tail_fit(y: Series, side: TailSide = TailSide.ABSOLUTE, tail_fraction: float = DEFAULT_TAIL_FRACTION,
             bins_per_decade: int = 10, min_bin_count: int = 10,
             min_tail_samples: int = MIN_TAIL_SAMPLES) -> ExponentFit:
    """PDF tail P(x) ~ |x|^-nu over the top tail_fraction of magnitudes; alpha = nu - 1"""
    if not 0 < tail_fraction <= 1:
        raise EstimationError(f"tail_fraction must lie in (0, 1], got {tail_fraction}")
    magnitudes = select_tail(np.asarray(y.values, dtype=np.float64), side)
    if magnitudes.size == 0:
        raise InsufficientDataError(f"no {side.value} samples")
    x_min = float(np.quantile(magnitudes, 1.0 - tail_fraction))
    tail = magnitudes[magnitudes >= x_min]
    if tail.size < min_tail_samples:
        raise InsufficientDataError(
            f"{tail.size} samples in the {side.value} tail, need {min_tail_samples}")

    histogram = log_histogram(tail, bins_per_decade)
    line = histogram_fit(histogram, min_count=min_bin_count)
    nu = -line.slope
    if nu <= 1:
        logger.warning(f"non-normalizable fit: nu={nu:.3f} on the {side.value} tail")
    alpha = nu - 1.0
    hill_alpha = hill_estimate(tail, x_min)
    return _fit_from_line(
        line,
        nu,
        side=side.value,
        alpha=alpha,
        inv_alpha=(1.0 / alpha) if alpha > 0 else math.nan,
        hill_nu=1.0 + hill_alpha,
        x_min=x_min,
        tail_samples=int(tail.size),
    )


def tail_histogram(y: Series, side: TailSide = TailSide.ABSOLUTE, bins_per_decade: int = 10) -> LogHistogram:
    """Full-range log histogram of increment magnitudes for plotting"""
    return log_histogram(select_tail(np.asarray(y.values, dtype=np.float64), side), bins_per_decade)
