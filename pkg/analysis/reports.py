"""
Per-stock exponent reports and the cross-stock summary
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from analysis.errors import InsufficientDataError

# Column order of the empirical vs randomized exponent table
TABLE1_COLUMNS = ["ticker", "lam", "h_av", "h_avr", "h_hig", "h_higr", "h_bd", "h_bdr", "inv_alpha"]
# Column order of the empirical vs reverted exponent table
TABLE2_COLUMNS = ["ticker", "lam", "lam_f", "h_av", "h_avf", "h_hig", "h_higf", "h_bd", "h_bdf"]

MEASURED_FIELDS = (
    "lam", "lam_r", "lam_f",
    "h_av", "h_avr", "h_avf",
    "h_hig", "h_higr", "h_higf",
    "h_bd", "h_bdr", "h_bdf",
    "nu", "nu_f",
)
MEMORY_FIELDS = ("d_msd", "d_av", "d_hig", "d_bd", "d_msdf", "d_avf", "d_higf", "d_bdf")
# memory parameter -> (measured, randomized) exponents it is the difference of
DIFFERENCE_INPUTS = {
    "d_av": ("h_av", "h_avr"),
    "d_hig": ("h_hig", "h_higr"),
    "d_bd": ("h_bd", "h_bdr"),
    "d_avf": ("h_avf", "h_avr"),
    "d_higf": ("h_higf", "h_higr"),
    "d_bdf": ("h_bdf", "h_bdr"),
}


def _difference(a: Optional[float], b: Optional[float]) -> Optional[float]:
    if a is None or b is None:
        return None
    return a - b


def _quadrature(a: Optional[float], b: Optional[float]) -> Optional[float]:
    if a is None or b is None:
        return None
    return math.hypot(a, b)


@dataclass
class StockReport:
    """Every scaling exponent measured for one stock and span; None marks a failed cell"""
    ticker: str
    start_date: str = ""
    end_date: str = ""
    lam: Optional[float] = None
    lam_r: Optional[float] = None
    lam_f: Optional[float] = None
    h_av: Optional[float] = None
    h_avr: Optional[float] = None
    h_avf: Optional[float] = None
    h_hig: Optional[float] = None
    h_higr: Optional[float] = None
    h_higf: Optional[float] = None
    h_bd: Optional[float] = None
    h_bdr: Optional[float] = None
    h_bdf: Optional[float] = None
    nu: Optional[float] = None
    nu_f: Optional[float] = None
    stderr: Dict[str, float] = field(default_factory=dict)
    cell_errors: Dict[str, str] = field(default_factory=dict)
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def alpha(self) -> Optional[float]:
        return None if self.nu is None else self.nu - 1.0

    @property
    def inv_alpha(self) -> Optional[float]:
        alpha = self.alpha
        if alpha is None or alpha <= 0:
            return None
        return 1.0 / alpha

    @property
    def d_msd(self) -> Optional[float]:
        return None if self.lam is None else (self.lam - 1.0) / 2.0

    @property
    def d_msdf(self) -> Optional[float]:
        return None if self.lam_f is None else (self.lam_f - 1.0) / 2.0

    @property
    def d_av(self) -> Optional[float]:
        return _difference(self.h_av, self.h_avr)

    @property
    def d_hig(self) -> Optional[float]:
        return _difference(self.h_hig, self.h_higr)

    @property
    def d_bd(self) -> Optional[float]:
        return _difference(self.h_bd, self.h_bdr)

    @property
    def d_avf(self) -> Optional[float]:
        return _difference(self.h_avf, self.h_avr)

    @property
    def d_higf(self) -> Optional[float]:
        return _difference(self.h_higf, self.h_higr)

    @property
    def d_bdf(self) -> Optional[float]:
        return _difference(self.h_bdf, self.h_bdr)

    @property
    def gamma(self) -> Optional[float]:
        """Codifference decay exponent alpha - alpha * H, using H_AV"""
        alpha = self.alpha
        if alpha is None or self.h_av is None:
            return None
        return alpha - alpha * self.h_av

    @property
    def ok(self) -> bool:
        return not self.cell_errors

    def derived(self) -> Dict[str, Optional[float]]:
        values = {name: getattr(self, name) for name in MEMORY_FIELDS}
        values["alpha"] = self.alpha
        values["inv_alpha"] = self.inv_alpha
        values["gamma"] = self.gamma
        return values

    def derived_stderr(self) -> Dict[str, Optional[float]]:
        """Fit standard errors propagated to the memory parameters and 1/alpha; None where unmeasured"""
        se = self.stderr.get
        errors: Dict[str, Optional[float]] = {}
        for name, (measured, randomized) in DIFFERENCE_INPUTS.items():
            errors[name] = None if getattr(self, name) is None else _quadrature(se(measured), se(randomized))
        for name, lam in (("d_msd", "lam"), ("d_msdf", "lam_f")):
            error = se(lam)
            errors[name] = None if getattr(self, name) is None or error is None else error / 2.0
        error = se("nu")
        errors["inv_alpha"] = None if self.inv_alpha is None or error is None else error / self.alpha ** 2
        return {name: errors[name] for name in (*MEMORY_FIELDS, "inv_alpha")}

    def row(self, columns: Sequence[str]) -> Dict[str, Any]:
        return {column: getattr(self, column) for column in columns}

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["derived"] = self.derived()
        data["derived_stderr"] = self.derived_stderr()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StockReport":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)


@dataclass(frozen=True)
class FieldSummary:
    mean: Optional[float]
    sd: Optional[float]
    count: int


@dataclass(frozen=True)
class AggregateSummary:
    """Cross-stock mean and sample standard deviation of the memory parameters"""
    tickers: List[str]
    fields: Dict[str, FieldSummary]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tickers": list(self.tickers),
            "fields": {name: asdict(summary) for name, summary in self.fields.items()},
        }


def aggregate(reports: Sequence[StockReport], names: Sequence[str] = MEMORY_FIELDS) -> AggregateSummary:
    """Mean and sd (ddof=1) of each memory parameter over the stocks that measured it"""
    if len(reports) < 2:
        raise InsufficientDataError(f"aggregation needs at least 2 reports, got {len(reports)}")

    fields = {}
    for name in names:
        values = np.array([v for v in (getattr(r, name) for r in reports) if v is not None and math.isfinite(v)])
        if values.size == 0:
            fields[name] = FieldSummary(None, None, 0)
        elif values.size == 1:
            fields[name] = FieldSummary(float(values[0]), None, 1)
        else:
            fields[name] = FieldSummary(float(values.mean()), float(values.std(ddof=1)), int(values.size))
    return AggregateSummary(tickers=[r.ticker for r in reports], fields=fields)
