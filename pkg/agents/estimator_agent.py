"""
Estimator Agent
Runs the scaling estimators on their assigned series variants; each report cell
is evaluated in isolation so one failed fit never blocks the others
"""

from typing import Any, Callable, Dict, List, Optional

from agents.base_agent import BaseAgent, CellResults
from analysis.estimators import (
    ExponentFit,
    TailSide,
    autocovariance,
    ave_hurst,
    default_block_sizes,
    default_lags,
    default_msd_fit_range,
    default_window_sizes,
    fit_msd_exponent,
    higuchi_hurst,
    sample_msd,
    tail_fit,
    tail_histogram,
)
from analysis.series import Series
from analysis.transforms import accumulate, drop_warmup

MSD_CELLS = {"lam": "x", "lam_r": "x_r", "lam_f": "x_f"}
AVE_CELLS = {"h_av": "y", "h_avr": "y_r", "h_avf": "y_f"}
HIGUCHI_CELLS = {"h_hig": "x", "h_higr": "x_r", "h_higf": "x_f"}
TAIL_CELLS = {"nu": "y", "nu_f": "y_f"}
REVERTED = ("y_f", "x_f")


class EstimatorAgent(BaseAgent):
    """MSD, Absolute Value, Higuchi and tail-fit cells of a stock report"""

    def __init__(self):
        super().__init__(
            name="Estimator Agent",
            role="Scaling Exponent Estimator",
            tools=["sample_msd", "ave_hurst", "higuchi_hurst", "tail_fit", "autocovariance"]
        )

    def execute_task(self, task_data: Dict[str, Any]) -> Dict[str, Any]:
        """Execute estimation task"""
        return self.dispatch(task_data, {
            "estimate_stock": self.estimate_stock,
        })

    def estimate_stock(self, task_data: Dict[str, Any]) -> Dict[str, Any]:
        valid, message = self.validate_input(task_data, ["ticker", "variants", "settings"])
        if not valid:
            raise KeyError(message)

        ticker = task_data["ticker"]
        variants: Dict[str, Series] = task_data["variants"]
        settings = task_data["settings"]
        truncation = task_data.get("truncation")
        cap = truncation if settings.get("cap_reverted_grids", True) else None
        results = CellResults()

        def cell(name: str, compute: Callable[[], ExponentFit]):
            fit, error = self.run_cell(ticker, name, compute)
            results.record(name, fit, error)

        msd_curves = {}
        for name, variant in MSD_CELLS.items():
            series = variants[variant]
            cell(name, lambda s=series, v=variant: self._msd(s, settings, msd_curves, v))

        for name, variant in AVE_CELLS.items():
            limit = cap if variant in REVERTED else None
            cell(name, lambda s=variants[variant], m=limit: self._ave(s, settings, m))

        for name, variant in HIGUCHI_CELLS.items():
            limit = cap if variant in REVERTED else None
            cell(name, lambda s=variants[variant], m=limit: self._higuchi(s, settings, m))

        for name, variant in TAIL_CELLS.items():
            cell(name, lambda s=variants[variant]: self._tail(s, settings, TailSide.ABSOLUTE))

        self._tail_diagnostics(ticker, variants, settings, results)
        self._autocovariance(ticker, variants["y"], settings, results)
        if truncation and not task_data.get("warmup_dropped"):
            self._warmup_sensitivity(ticker, variants["y_f"], truncation, settings, cap, results)
        results.tables["msd"] = self._msd_table(msd_curves)

        failed = len(results.errors)
        self.log_message(f"Estimated {ticker}", metadata={"cells": len(results.values), "failed_cells": failed})
        return {"ticker": ticker, "results": results}

    def _msd(self, series: Series, settings: Dict[str, Any], curves: Dict[str, Any], variant: str) -> ExponentFit:
        n = len(series)
        lags = default_lags(n, settings.get("msd_max_lag_fraction", 0.1))
        lags = [k for k in lags if k < n]
        curve = sample_msd(series, lags)
        curves[variant] = curve
        fit_range = settings.get("msd_fit_range") or default_msd_fit_range(n)
        return fit_msd_exponent(curve, tuple(fit_range))

    def _ave(self, series: Series, settings: Dict[str, Any], cap: Optional[int]) -> ExponentFit:
        limit = _smaller(settings.get("ave_max_block"), cap)
        return ave_hurst(series, default_block_sizes(len(series), limit))

    def _higuchi(self, series: Series, settings: Dict[str, Any], cap: Optional[int]) -> ExponentFit:
        limit = _smaller(settings.get("higuchi_max_window"), cap)
        return higuchi_hurst(series, default_window_sizes(len(series), limit))

    def _tail(self, series: Series, settings: Dict[str, Any], side: TailSide) -> ExponentFit:
        return tail_fit(
            series,
            side=side,
            tail_fraction=settings.get("tail_fraction", 0.01),
            bins_per_decade=settings.get("tail_bins_per_decade", 10),
            min_bin_count=settings.get("tail_min_bin_count", 10),
            min_tail_samples=settings.get("min_tail_samples", 1000),
        )

    def _tail_diagnostics(self, ticker: str, variants: Dict[str, Series], settings: Dict[str, Any],
                          results: CellResults):
        """Positive, negative and absolute tails of Y and Y_F with plot-ready histograms"""
        tails = {}
        for variant in ("y", "y_f"):
            for side in TailSide:
                key = f"{variant}_{side.value}"
                fit, error = self.run_cell(ticker, f"tail_{key}", lambda s=variants[variant], t=side: self._tail(s, settings, t))
                tails[key] = fit.to_dict() if fit else {"error": error}
                histogram, _ = self.run_cell(
                    ticker, f"tail_histogram_{key}",
                    lambda s=variants[variant], t=side: tail_histogram(s, t, settings.get("tail_bins_per_decade", 10)))
                if histogram is not None:
                    results.histograms[f"tail_{key}"] = histogram
        results.diagnostics["tails"] = tails

    def _autocovariance(self, ticker: str, y: Series, settings: Dict[str, Any], results: CellResults):
        max_lag = min(settings.get("autocov_max_lag", 20), len(y) - 1)
        if max_lag < 0:
            return
        values, error = self.run_cell(
            ticker, "autocovariance",
            lambda: autocovariance(y, range(max_lag + 1), settings.get("autocov_centered", False)))
        results.diagnostics["autocovariance"] = (
            [{"lag": k, "value": v} for k, v in values] if values is not None else {"error": error})

    def _warmup_sensitivity(self, ticker: str, y_f: Series, truncation: int, settings: Dict[str, Any],
                            cap: Optional[int], results: CellResults):
        """H_AVF and H_HigF recomputed without the first truncation samples"""
        note = {"dropped": truncation}
        trimmed, error = self.run_cell(ticker, "warmup_trim", lambda: drop_warmup(y_f, truncation))
        if trimmed is None:
            note["error"] = error
        else:
            ave, ave_error = self.run_cell(ticker, "warmup_h_avf", lambda: self._ave(trimmed, settings, cap))
            hig, hig_error = self.run_cell(
                ticker, "warmup_h_higf", lambda: self._higuchi(accumulate(trimmed, 0.0), settings, cap))
            note["h_avf"] = ave.exponent if ave else None
            note["h_higf"] = hig.exponent if hig else None
            errors = {k: v for k, v in (("h_avf", ave_error), ("h_higf", hig_error)) if v}
            if errors:
                note["errors"] = errors
        results.diagnostics["warmup_sensitivity"] = note

    def _msd_table(self, curves: Dict[str, Any]) -> List[Dict[str, Any]]:
        """Rows of lag vs M(k) for each path variant"""
        lags = sorted({k for curve in curves.values() for k, _ in curve})
        lookup = {variant: dict(curve) for variant, curve in curves.items()}
        return [{"lag": k, **{variant: lookup[variant].get(k) for variant in sorted(lookup)}} for k in lags]


def _smaller(a: Optional[int], b: Optional[int]) -> Optional[int]:
    present = [v for v in (a, b) if v is not None]
    return min(present) if present else None
