"""
Burst Agent
Burst duration cells H_BD, H_BDR and H_BDF at the zero threshold, plus the
sigma-scaled threshold sweeps of the empirical and bounded random paths
"""

from typing import Any, Dict, Optional

from agents.base_agent import BaseAgent, CellResults
from analysis.bursts import (
    DEFAULT_BURST_FIT_RANGE,
    WIDE_BURST_FIT_RANGE,
    DurationKind,
    DurationSample,
    duration_histogram,
    durations,
    fit_burst_pdf,
    threshold_sweep,
)
from analysis.series import Series

BURST_CELLS = {"h_bd": "x", "h_bdr": "x_rb", "h_bdf": "x_f"}
SWEEP_VARIANTS = ("x", "x_rb")


class BurstAgent(BaseAgent):
    """Threshold crossings, duration PDFs and H_BD = 2 - eta"""

    def __init__(self):
        super().__init__(
            name="Burst Agent",
            role="Burst Duration Analyst",
            tools=["find_crossings", "durations", "threshold_sweep", "fit_burst_pdf"]
        )

    def execute_task(self, task_data: Dict[str, Any]) -> Dict[str, Any]:
        """Execute burst analysis task"""
        return self.dispatch(task_data, {
            "burst_stock": self.burst_stock,
        })

    def burst_stock(self, task_data: Dict[str, Any]) -> Dict[str, Any]:
        valid, message = self.validate_input(task_data, ["ticker", "variants", "settings"])
        if not valid:
            raise KeyError(message)

        ticker = task_data["ticker"]
        variants: Dict[str, Series] = task_data["variants"]
        settings = task_data["settings"]
        kind = DurationKind(settings.get("durations", "bursts"))
        sweep_kind = DurationKind(settings.get("sweep_durations", "interbursts"))
        fit_range = tuple(settings.get("fit_range", DEFAULT_BURST_FIT_RANGE))
        bins = settings.get("bins_per_decade", 10)
        min_count = settings.get("min_bin_count", 3)
        results = CellResults()
        window = {}

        for cell, variant in BURST_CELLS.items():
            sample, error = self.run_cell(ticker, f"{cell}_durations", lambda s=variants[variant]: durations(s, 0.0))
            if sample is None:
                results.record(cell, None, error)
                continue
            results.diagnostics[f"{cell}_durations"] = sample.summary()
            fit, error = self.run_cell(ticker, cell, lambda: fit_burst_pdf(sample, fit_range, kind, bins, min_count))
            results.record(cell, fit, error, fit.h_bd if fit else None)
            window[cell] = self._window_sensitivity(ticker, cell, sample, fit, kind, bins, min_count)
            histogram, _ = self.run_cell(ticker, f"{cell}_histogram", lambda: duration_histogram(sample, kind, bins))
            if histogram is not None:
                results.histograms[f"durations_{variant}_{kind.value}"] = histogram

        sweeps = {}
        for variant in SWEEP_VARIANTS:
            samples, error = self.run_cell(
                ticker, f"sweep_{variant}",
                lambda s=variants[variant]: threshold_sweep(s, settings.get("threshold_multipliers", [0.5, 1.0, 1.5])))
            if samples is None:
                sweeps[variant] = {"error": error}
                continue
            per_threshold = {}
            for multiplier, sample in samples.items():
                label = f"{multiplier:g}sigma"
                fit, error = self.run_cell(
                    ticker, f"sweep_{variant}_{label}",
                    lambda s=sample: fit_burst_pdf(s, fit_range, sweep_kind, bins, min_count))
                entry = {"multiplier": multiplier, **sample.summary()}
                entry.update(fit.to_dict() if fit else {"error": error})
                per_threshold[label] = entry
                histogram, _ = self.run_cell(
                    ticker, f"sweep_histogram_{variant}_{label}",
                    lambda s=sample: duration_histogram(s, sweep_kind, bins))
                if histogram is not None:
                    results.histograms[f"sweep_{variant}_{sweep_kind.value}_{label}"] = histogram
            sweeps[variant] = per_threshold
        results.diagnostics["window_sensitivity"] = {
            "fit_range": list(fit_range),
            "wide_fit_range": list(WIDE_BURST_FIT_RANGE),
            "note": "short windows bias eta below the first-passage value 1.5; compare wide_eta",
            "cells": window,
        }
        results.diagnostics["threshold_sweeps"] = sweeps

        self.log_message(f"Burst analysis done for {ticker}", metadata={"failed_cells": len(results.errors)})
        return {"ticker": ticker, "results": results}

    def _window_sensitivity(self, ticker: str, cell: str, sample: DurationSample, fit: Optional[Any],
                            kind: DurationKind, bins: int, min_count: int) -> Dict[str, Any]:
        """The same duration PDF refitted over WIDE_BURST_FIT_RANGE"""
        wide, error = self.run_cell(
            ticker, f"{cell}_wide_window",
            lambda: fit_burst_pdf(sample, WIDE_BURST_FIT_RANGE, kind, bins, min_count))
        entry = {"eta": fit.eta if fit else None, "wide_eta": wide.eta if wide else None}
        if error:
            entry["error"] = error
        return entry
