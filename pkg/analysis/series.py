"""
Series container shared by every stage of the analysis
Holds an immutable array of values with its kind and provenance metadata
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Iterable, Optional

import numpy as np

from analysis.errors import EmptyInputError, SeriesKindError


class SeriesKind(Enum):
    """Position of a series in the transform graph"""
    EMPIRICAL = "empirical"
    INCREMENTS = "increments"
    SHUFFLED = "shuffled"
    BOUNDED = "bounded"
    REVERTED = "reverted"
    SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class SeriesMeta:
    """Provenance carried along with a series"""
    ticker: str = ""
    start_date: str = ""
    end_date: str = ""
    source: str = ""
    extra: Dict[str, Any] = field(default_factory=dict)

    def derive(self, source: str, **extra: Any) -> "SeriesMeta":
        """Copy with a new source description and merged extras"""
        merged = dict(self.extra)
        merged.update(extra)
        return replace(self, source=source, extra=merged)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ticker": self.ticker,
            "start_date": self.start_date,
            "end_date": self.end_date,
            "source": self.source,
            "extra": dict(self.extra),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SeriesMeta":
        return cls(
            ticker=data.get("ticker", ""),
            start_date=data.get("start_date", ""),
            end_date=data.get("end_date", ""),
            source=data.get("source", ""),
            extra=dict(data.get("extra", {})),
        )


@dataclass(frozen=True, eq=False)
class Series:
    """Ordered real values X(j) or Y(i).

    ``is_increments`` separates increment processes (Y, Y_R, Y_F, raw noise) from
    paths (X, X_R, X_RB, X_F) that share a kind.
    """
    values: np.ndarray
    kind: SeriesKind
    meta: SeriesMeta = field(default_factory=SeriesMeta)
    is_increments: bool = False

    def __post_init__(self):
        values = np.array(self.values, copy=True)
        if values.ndim != 1:
            raise ValueError(f"series values must be one-dimensional, got shape {values.shape}")
        if values.dtype.kind not in "iuf":
            values = values.astype(np.float64)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.kind is SeriesKind.INCREMENTS and not self.is_increments:
            object.__setattr__(self, "is_increments", True)
        if self.kind in (SeriesKind.EMPIRICAL, SeriesKind.BOUNDED) and self.is_increments:
            raise SeriesKindError(f"{self.kind.value} series cannot hold increments")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def label(self) -> str:
        """Short name used for artifact file naming"""
        return f"{self.kind.value}_{'increments' if self.is_increments else 'path'}"

    def with_values(self, values: Iterable[float], kind: SeriesKind, is_increments: bool,
                    source: str, **extra: Any) -> "Series":
        """New series that inherits this one's ticker and dates"""
        return Series(np.asarray(values), kind, self.meta.derive(source, **extra), is_increments)

    def require_non_empty(self, what: Optional[str] = None) -> None:
        if len(self.values) == 0:
            raise EmptyInputError(what or f"{self.kind.value} series")

    def require_increments(self, operation: str) -> None:
        if not self.is_increments:
            raise SeriesKindError(f"{operation} expects an increment series, got {self.label}")

    def require_path(self, operation: str) -> None:
        if self.is_increments:
            raise SeriesKindError(f"{operation} expects an accumulated path, got {self.label}")
