"""
Report Agent
Assembles StockReports from the estimator and burst cells, writes every
artifact through the ArtifactStore and aggregates the memory parameters
"""

from typing import Any, Dict, List

from agents.base_agent import BaseAgent, CellResults
from analysis.export import SUMMARY_FILE, ArtifactStore, artifact_name
from analysis.reports import TABLE1_COLUMNS, TABLE2_COLUMNS, StockReport, aggregate

COMPARISON_COLUMNS = [
    "ticker", "lam", "lam_f", "d_msd", "d_msdf",
    "h_av", "h_avf", "d_av", "d_avf",
    "h_hig", "h_higf", "d_hig", "d_higf",
    "h_bd", "h_bdf", "d_bd", "d_bdf",
    "nu", "nu_f",
]


class ReportAgent(BaseAgent):
    """Turns cell results into reports, tables and the cross-stock summary"""

    def __init__(self):
        super().__init__(
            name="Report Agent",
            role="Report Assembler / Exporter",
            tools=["StockReport", "aggregate", "ArtifactStore"]
        )

    def execute_task(self, task_data: Dict[str, Any]) -> Dict[str, Any]:
        """Execute reporting task"""
        return self.dispatch(task_data, {
            "assemble": self.assemble,
            "export_cells": self.export_cells,
            "summarize": self.summarize,
        })

    def assemble(self, task_data: Dict[str, Any]) -> Dict[str, Any]:
        valid, message = self.validate_input(task_data, ["ticker", "cells"])
        if not valid:
            raise KeyError(message)

        report = StockReport(
            ticker=task_data["ticker"],
            start_date=task_data.get("start_date", ""),
            end_date=task_data.get("end_date", ""),
        )
        for results in task_data["cells"]:
            for cell, value in results.values.items():
                setattr(report, cell, value)
            report.stderr.update({k: v for k, v in results.stderr.items() if v is not None})
            report.cell_errors.update(results.errors)
            report.diagnostics.update(results.diagnostics)
        report.diagnostics["fits"] = {k: v for results in task_data["cells"] for k, v in results.fits.items()}
        report.diagnostics.update(task_data.get("extra", {}))

        store: ArtifactStore = task_data.get("store")
        paths = []
        if store is not None:
            paths = [str(p) for p in store.write_report(report, TABLE1_COLUMNS)]
        self.log_message(f"Report assembled for {report.ticker}",
                         metadata={"failed_cells": len(report.cell_errors)})
        return {"report": report, "paths": paths}

    def export_cells(self, task_data: Dict[str, Any]) -> Dict[str, Any]:
        """Persist one stage's cells: JSON for values and fits, CSV for histograms and tables"""
        valid, message = self.validate_input(task_data, ["store", "base", "stage", "results"])
        if not valid:
            raise KeyError(message)

        store: ArtifactStore = task_data["store"]
        base = task_data["base"]
        results: CellResults = task_data["results"]
        paths = [store.write_json(f"{base}_{task_data['stage']}.json", results.to_dict())]
        for name, histogram in sorted(results.histograms.items()):
            paths.append(store.write_histogram(f"{base}_hist_{name}.csv", histogram))
        for name, rows in sorted(results.tables.items()):
            if rows:
                paths.append(store.write_table(f"{base}_{name}.csv", rows, list(rows[0].keys())))
        return {"paths": [str(p) for p in paths]}

    def summarize(self, task_data: Dict[str, Any]) -> Dict[str, Any]:
        """Table CSVs for every report and, with two or more stocks, the aggregate summary"""
        valid, message = self.validate_input(task_data, ["reports", "store"])
        if not valid:
            raise KeyError(message)

        reports: List[StockReport] = sorted(task_data["reports"], key=lambda r: r.ticker)
        store: ArtifactStore = task_data["store"]
        paths = [
            store.write_table("table_randomized.csv", [r.row(TABLE1_COLUMNS) for r in reports], TABLE1_COLUMNS),
            store.write_table("table_reverted.csv", [r.row(TABLE2_COLUMNS) for r in reports], TABLE2_COLUMNS),
            store.write_table("exponent_comparison.csv", [r.row(COMPARISON_COLUMNS) for r in reports],
                              COMPARISON_COLUMNS),
        ]

        summary = None
        if len(reports) >= 2:
            summary = aggregate(reports)
            paths.append(store.write_json(SUMMARY_FILE, summary.to_dict()))
        else:
            self.log_message("Fewer than two reports, skipping aggregation", level="warning")
        return {"summary": summary, "paths": [str(p) for p in paths]}


def stock_base(ticker: str, start_date: str, end_date: str) -> str:
    return artifact_name(ticker, start_date, end_date, "")
