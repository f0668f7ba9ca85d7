"""
Artifact persistence
Deterministic CSV and JSON files named {ticker}_{start}_{end}_{kind} under one
output directory, each accompanied by the run configuration for provenance
"""

import json
import math
import re
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from analysis.errors import ExportError
from analysis.estimators import LogHistogram
from analysis.reports import StockReport
from analysis.series import Series, SeriesKind, SeriesMeta

RUN_CONFIG_FILE = "run_config.json"
ERRORS_FILE = "errors.json"
SUMMARY_FILE = "summary.json"


def artifact_name(ticker: str, start_date: str, end_date: str, kind: str) -> str:
    return "_".join(part for part in (ticker, start_date, end_date, kind) if part)


def _clean(value: Any) -> Any:
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats become null"""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def dumps(data: Any) -> str:
    return json.dumps(_clean(data), indent=2, sort_keys=True, allow_nan=False) + "\n"


class ArtifactStore:
    """Reads and writes every artifact of a run below ``root``"""

    def __init__(self, root: Path, provenance: Optional[Dict[str, Any]] = None):
        self.root = Path(root)
        self.provenance = provenance or {}

    def path(self, filename: str) -> Path:
        return self.root / filename

    def _write_text(self, path: Path, text: str) -> Path:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        except OSError as e:
            raise ExportError(path, e.strerror or str(e))
        return path

    def _read_text(self, path: Path) -> str:
        try:
            return path.read_text(encoding="utf-8")
        except OSError as e:
            raise ExportError(path, e.strerror or str(e))

    def write_json(self, filename: str, payload: Any, with_provenance: bool = True) -> Path:
        document = {"provenance": self.provenance, "payload": payload} if with_provenance else payload
        return self._write_text(self.path(filename), dumps(document))

    def read_json(self, filename: str, with_provenance: bool = True) -> Any:
        path = self.path(filename)
        try:
            document = json.loads(self._read_text(path))
        except json.JSONDecodeError as e:
            raise ExportError(path, f"invalid JSON: {e}")
        return document.get("payload") if with_provenance else document

    def write_run_config(self) -> Path:
        return self.write_json(RUN_CONFIG_FILE, self.provenance, with_provenance=False)

    def write_table(self, filename: str, rows: Sequence[Dict[str, Any]], columns: Sequence[str]) -> Path:
        frame = pd.DataFrame(list(rows), columns=list(columns))
        path = self.path(filename)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            frame.to_csv(path, index=False, na_rep="", lineterminator="\n")
        except OSError as e:
            raise ExportError(path, e.strerror or str(e))
        return path

    def read_table(self, filename: str) -> pd.DataFrame:
        path = self.path(filename)
        try:
            return pd.read_csv(path, float_precision="round_trip")
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise ExportError(path, str(e))

    def write_histogram(self, filename: str, histogram: LogHistogram) -> Path:
        frame = histogram.to_frame()
        return self.write_table(filename, frame.to_dict("records"), list(frame.columns))

    def write_report(self, report: StockReport, columns: Sequence[str]) -> List[Path]:
        """Structured JSON plus a one-row CSV in the given column order"""
        base = artifact_name(report.ticker, report.start_date, report.end_date, "report")
        return [
            self.write_json(f"{base}.json", report.to_dict()),
            self.write_table(f"{base}.csv", [report.row(columns)], columns),
        ]

    def load_report(self, filename: str) -> StockReport:
        return StockReport.from_dict(self.read_json(filename))

    def load_reports(self) -> List[StockReport]:
        return [self.load_report(path.name) for path in sorted(self.root.glob("*_report.json"))]

    def write_series(self, series: Series, kind: Optional[str] = None) -> Path:
        """Single-column CSV of values and a JSON sidecar with kind and metadata"""
        meta = series.meta
        base = artifact_name(meta.ticker, meta.start_date, meta.end_date, kind or series.label)
        self.write_table(f"{base}.csv", [{"value": v} for v in series.values.tolist()], ["value"])
        self.write_json(f"{base}.meta.json", {
            "kind": series.kind.value,
            "is_increments": series.is_increments,
            "length": len(series),
            "meta": meta.to_dict(),
        })
        return self.path(f"{base}.csv")

    def load_series(self, base: str) -> Series:
        sidecar = self.read_json(f"{base}.meta.json")
        frame = self.read_table(f"{base}.csv")
        if "value" not in frame.columns:
            raise ExportError(self.path(f"{base}.csv"), "missing value column")
        values = frame["value"].to_numpy(dtype=np.float64)
        if len(values) != sidecar["length"]:
            raise ExportError(self.path(f"{base}.csv"), f"expected {sidecar['length']} values, found {len(values)}")
        return Series(values, SeriesKind(sidecar["kind"]), SeriesMeta.from_dict(sidecar["meta"]),
                      sidecar["is_increments"])

    def find_base(self, ticker: str, kind: str) -> str:
        """Stem shared by a ticker's artifacts, located through its {kind}.meta.json sidecar"""
        pattern = re.compile(rf"^({re.escape(ticker)}(?:_\d{{4}}-\d{{2}}-\d{{2}}){{0,2}})_{re.escape(kind)}\.meta\.json$")
        matches = sorted(m.group(1) for m in (pattern.match(p.name) for p in self.root.glob(f"{ticker}*.meta.json")) if m)
        if not matches:
            raise ExportError(self.root, f"no stored {kind} series for {ticker}")
        if len(matches) > 1:
            raise ExportError(self.root, f"several stored {kind} series for {ticker}: {', '.join(matches)}")
        return matches[0]

    def write_errors(self, failures: Iterable[Dict[str, Any]]) -> Path:
        """Machine-readable manifest of every failed stock or cell"""
        return self.write_json(ERRORS_FILE, {"failures": list(failures)})

    def read_errors(self) -> List[Dict[str, Any]]:
        if not self.path(ERRORS_FILE).exists():
            return []
        return self.read_json(ERRORS_FILE).get("failures", [])
