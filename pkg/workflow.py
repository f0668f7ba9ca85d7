"""
Analysis Workflow Management
Orchestrates ingestion, transforms, estimators, burst analysis and reporting
for every configured stock on a worker pool
"""

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from agents.base_agent import AgentHub, CellResults
from agents.burst_agent import BurstAgent
from agents.estimator_agent import EstimatorAgent
from agents.generator_agent import GeneratorAgent
from agents.ingest_agent import IngestAgent
from agents.report_agent import ReportAgent, stock_base
from agents.transform_agent import VARIANTS, TransformAgent
from analysis.errors import OrderflowError
from analysis.export import ERRORS_FILE, ArtifactStore
from analysis.reports import StockReport
from utils.config import RunConfig, get_config
from utils.logger import setup_logger, system_logger

STAGES = ("ingest", "transform", "estimate", "burst", "report")


class WorkflowStatus(Enum):
    """Workflow execution status"""
    IDLE = "idle"
    INITIALIZING = "initializing"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


class StageFailure(OrderflowError):
    """A stage of one stock's pipeline could not complete"""

    def __init__(self, ticker: str, stage: str, error: str, error_type: str = "Error"):
        self.ticker = ticker
        self.stage = stage
        self.error = error
        self.error_type = error_type
        super().__init__(f"{ticker} failed at {stage}: {error}")

    def to_dict(self) -> Dict[str, Any]:
        return {"ticker": self.ticker, "stage": self.stage, "error_type": self.error_type, "error": self.error}


class AnalysisWorkflow:
    """Main workflow orchestrator for the order-flow analysis pipeline"""

    def __init__(self, config: Optional[RunConfig] = None):
        self.config = config or get_config()
        self.logger = setup_logger("analysis_workflow")

        self.agents = {}
        self.hub = AgentHub()

        self.current_status = WorkflowStatus.IDLE
        self.current_run_id = None
        self.workflow_history = []
        self._lock = threading.Lock()

        self.metrics = {
            "total_runs": 0,
            "successful_runs": 0,
            "failed_runs": 0,
            "average_duration_seconds": 0,
            "stocks_processed": 0,
            "stocks_failed": 0
        }

    @property
    def store(self) -> ArtifactStore:
        return ArtifactStore(Path(self.config.output.output_dir), self.config.provenance())

    def initialize(self) -> bool:
        """Initialize the workflow system and all agents"""
        self.current_status = WorkflowStatus.INITIALIZING
        agent_classes = [
            ("ingest", IngestAgent),
            ("generator", GeneratorAgent),
            ("transform", TransformAgent),
            ("estimator", EstimatorAgent),
            ("burst", BurstAgent),
            ("report", ReportAgent)
        ]

        for agent_name, agent_class in agent_classes:
            agent = agent_class()
            self.agents[agent_name] = agent
            self.hub.register_agent(agent_name, agent)

        self.current_status = WorkflowStatus.IDLE
        system_logger.log_system_event(
            "workflow_initialization",
            "Analysis workflow initialized",
            {"agents_count": len(self.agents), "tickers": self.config.all_tickers}
        )
        return True

    def _call(self, agent: str, ticker: str, stage: str, task_data: Dict[str, Any]) -> Dict[str, Any]:
        response = self.hub.dispatch(agent, task_data)
        if not response.get("success"):
            raise StageFailure(ticker, stage, response.get("error", "unknown error"), response.get("error_type", "Error"))
        return response.get("data", {})

    def load_stock(self, ticker: str) -> Dict[str, Any]:
        """X and Y for a ticker, read from LOBSTER files or generated from its synthetic spec"""
        if ticker in self.config.synthetic:
            return self._call("generator", ticker, "ingest", {
                "task_type": "generate_stock",
                "ticker": ticker,
                "spec": self.config.synthetic[ticker],
            })
        ingest = self.config.ingest
        start, end = ingest.date_range
        return self._call("ingest", ticker, "ingest", {
            "task_type": "load_stock",
            "ticker": ticker,
            "data_root": ingest.data_root,
            "depth": ingest.depth,
            "date_range": (start, end) if (start or end) else None,
            "jobs": ingest.ingest_jobs,
        })

    def _load_cells(self, store: ArtifactStore, base: str, stage: str, ticker: str) -> CellResults:
        try:
            return CellResults.from_dict(store.read_json(f"{base}_{stage}.json"))
        except OrderflowError as e:
            raise StageFailure(ticker, stage, str(e), type(e).__name__)

    def _load_variants(self, store: ArtifactStore, ticker: str, names: Tuple[str, ...]) -> Dict[str, Any]:
        try:
            base = store.find_base(ticker, "y")
            return {name: store.load_series(f"{base}_{name}") for name in names}
        except OrderflowError as e:
            raise StageFailure(ticker, "load", str(e), type(e).__name__)

    def run_stock(self, ticker: str, start_stage: str = "ingest", through: str = "report",
                  store: Optional[ArtifactStore] = None) -> Tuple[Optional[StockReport], List[Dict[str, Any]]]:
        """Run one stock from ``start_stage`` through ``through``; returns its report (when reached) and cell failures"""
        store = store or self.store
        stages = STAGES[STAGES.index(start_stage): STAGES.index(through) + 1]
        dump = self.config.output.dump_series
        variants: Dict[str, Any] = {}
        cells: Dict[str, CellResults] = {}
        extra: Dict[str, Any] = {}

        if stages[0] == "transform":
            variants = self._load_variants(store, ticker, ("x", "y"))
        elif stages[0] in ("estimate", "burst"):
            variants = self._load_variants(store, ticker, VARIANTS)

        for stage in stages:
            system_logger.log_stock_pipeline(ticker, stage, "started")
            if stage == "ingest":
                loaded = self.load_stock(ticker)
                variants = {"x": loaded["x"], "y": loaded["y"]}
                extra = {"days": loaded["days"], "events": loaded["events"]}
                if dump or through == "ingest":
                    self._persist(store, ticker, stage, variants)
            elif stage == "transform":
                settings = vars(self.config.transform)
                data = self._call("transform", ticker, stage, {
                    "task_type": "build_variants",
                    "x": variants["x"],
                    "y": variants["y"],
                    "settings": dict(settings),
                })
                variants = data["variants"]
                extra["shuffle_seed"] = data["seed"]
                if dump or through == "transform":
                    self._persist(store, ticker, stage, variants)
            elif stage == "estimate":
                data = self._call("estimator", ticker, stage, {
                    "task_type": "estimate_stock",
                    "ticker": ticker,
                    "variants": variants,
                    "settings": dict(vars(self.config.estimators)),
                    "truncation": self.config.transform.truncation,
                    "warmup_dropped": self.config.transform.drop_warmup,
                })
                cells["estimates"] = data["results"]
                self._export_cells(store, ticker, variants["y"], "estimates", cells["estimates"])
            elif stage == "burst":
                data = self._call("burst", ticker, stage, {
                    "task_type": "burst_stock",
                    "ticker": ticker,
                    "variants": variants,
                    "settings": dict(vars(self.config.bursts)),
                })
                cells["bursts"] = data["results"]
                self._export_cells(store, ticker, variants["y"], "bursts", cells["bursts"])
            elif stage == "report":
                start_date, end_date = self._dates(store, ticker, variants)
                base = stock_base(ticker, start_date, end_date)
                for name in ("estimates", "bursts"):
                    if name not in cells:
                        cells[name] = self._load_cells(store, base, name, ticker)
                data = self._call("report", ticker, stage, {
                    "task_type": "assemble",
                    "ticker": ticker,
                    "start_date": start_date,
                    "end_date": end_date,
                    "cells": [cells["estimates"], cells["bursts"]],
                    "extra": extra,
                    "store": store,
                })
                system_logger.log_stock_pipeline(ticker, stage, "completed")
                report = data["report"]
                return report, self._cell_failures(ticker, report.cell_errors)
            system_logger.log_stock_pipeline(ticker, stage, "completed")

        failures = []
        for results in cells.values():
            failures.extend(self._cell_failures(ticker, results.errors))
        return None, failures

    def _dates(self, store: ArtifactStore, ticker: str, variants: Dict[str, Any]) -> Tuple[str, str]:
        if "y" in variants:
            meta = variants["y"].meta
            return meta.start_date, meta.end_date
        try:
            meta = store.load_series(f"{store.find_base(ticker, 'y')}_y").meta
        except OrderflowError as e:
            raise StageFailure(ticker, "report", str(e), type(e).__name__)
        return meta.start_date, meta.end_date

    def _persist(self, store: ArtifactStore, ticker: str, stage: str, variants: Dict[str, Any]):
        try:
            for name, series in variants.items():
                store.write_series(series, name)
        except OrderflowError as e:
            raise StageFailure(ticker, stage, str(e), type(e).__name__)

    def _export_cells(self, store: ArtifactStore, ticker: str, y, stage: str, results: CellResults):
        self._call("report", ticker, stage, {
            "task_type": "export_cells",
            "store": store,
            "base": stock_base(ticker, y.meta.start_date, y.meta.end_date),
            "stage": stage,
            "results": results,
        })

    @staticmethod
    def _cell_failures(ticker: str, errors: Dict[str, str]) -> List[Dict[str, Any]]:
        return [{"ticker": ticker, "cell": cell, "error": error} for cell, error in sorted(errors.items())]

    def _run_stock_safe(self, ticker: str, start_stage: str, through: str, store: ArtifactStore):
        try:
            report, cell_failures = self.run_stock(ticker, start_stage, through, store)
            return ticker, report, cell_failures, None
        except StageFailure as e:
            system_logger.log_stock_pipeline(ticker, e.stage, "failed", {"error": e.error})
            return ticker, None, [], e.to_dict()
        except OrderflowError as e:
            system_logger.log_stock_pipeline(ticker, "load", "failed", {"error": str(e)})
            return ticker, None, [], StageFailure(ticker, "load", str(e), type(e).__name__).to_dict()

    def run_all(self, tickers: Optional[List[str]] = None, start_stage: str = "ingest",
                through: str = "report") -> Dict[str, Any]:
        """Fan stocks out to the worker pool, merge results and write the run manifest"""
        if start_stage not in STAGES or through not in STAGES:
            raise ValueError(f"stages must be among {', '.join(STAGES)}")
        if STAGES.index(start_stage) > STAGES.index(through):
            raise ValueError(f"cannot run from {start_stage} through {through}")
        if not self.agents:
            self.initialize()
        if start_stage == "ingest" and self.config.ingest.tickers:
            self.config.validate_paths()
        with self._lock:
            if self.current_status is WorkflowStatus.RUNNING:
                return {"success": False, "error": "Workflow already running", "current_run_id": self.current_run_id}
            self.current_status = WorkflowStatus.RUNNING
            self.current_run_id = str(uuid.uuid4())

        run_id = self.current_run_id
        tickers = list(tickers or self.config.all_tickers)
        started = datetime.utcnow()
        store = self.store
        try:
            store.write_run_config()
        except OrderflowError:
            with self._lock:
                self.current_status = WorkflowStatus.FAILED
                self.current_run_id = None
            raise
        system_logger.bind_run(run_id)
        system_logger.log_workflow_stage("run", "started", {"run_id": run_id, "tickers": tickers,
                                                            "from": start_stage, "through": through})

        with ThreadPoolExecutor(max_workers=self.config.output.jobs) as pool:
            outcomes = list(pool.map(lambda t: self._run_stock_safe(t, start_stage, through, store), tickers))

        reports = []
        failures = []
        for ticker, report, cell_failures, stock_failure in outcomes:
            if report is not None:
                reports.append(report)
            failures.extend(cell_failures)
            if stock_failure:
                failures.append(stock_failure)

        summary = None
        if through == "report" and reports:
            response = self.hub.dispatch("report", {"task_type": "summarize", "reports": reports, "store": store})
            if response.get("success"):
                summary = response["data"]["summary"]
            else:
                failures.append({"ticker": None, "stage": "summary", "error_type": response.get("error_type"),
                                 "error": response.get("error")})

        if failures:
            store.write_errors(failures)
        elif store.path(ERRORS_FILE).exists():
            store.path(ERRORS_FILE).unlink()

        duration = (datetime.utcnow() - started).total_seconds()
        success = not failures
        failed_stocks = sum(1 for _, _, _, stock_failure in outcomes if stock_failure)
        run = {
            "run_id": run_id,
            "started_at": started.isoformat(),
            "duration_seconds": duration,
            "from": start_stage,
            "through": through,
            "tickers": tickers,
            "success": success,
            "failures": len(failures),
        }
        self.complete_run(run, failed_stocks, len(tickers))
        system_logger.log_workflow_stage("run", "completed" if success else "failed", run)
        system_logger.log_performance_metric("run_duration", duration, "seconds", {"run_id": run_id})
        system_logger.bind_run(None)

        return {
            "success": success,
            "run_id": run_id,
            "duration_seconds": duration,
            "reports": reports,
            "summary": summary,
            "failures": failures,
        }

    def complete_run(self, run: Dict[str, Any], failed_stocks: int, total_stocks: int):
        """Move a run to history and update metrics"""
        with self._lock:
            self.workflow_history.append(run)
            if len(self.workflow_history) > 100:
                self.workflow_history = self.workflow_history[-100:]

            self.metrics["total_runs"] += 1
            if run["success"]:
                self.metrics["successful_runs"] += 1
            else:
                self.metrics["failed_runs"] += 1
            total = self.metrics["average_duration_seconds"] * (self.metrics["total_runs"] - 1)
            self.metrics["average_duration_seconds"] = (total + run["duration_seconds"]) / self.metrics["total_runs"]
            self.metrics["stocks_processed"] += total_stocks
            self.metrics["stocks_failed"] += failed_stocks

            self.current_run_id = None
            self.current_status = WorkflowStatus.COMPLETED if run["success"] else WorkflowStatus.FAILED

    def get_workflow_status(self) -> Dict[str, Any]:
        """Get current workflow status and metrics"""
        return {
            "current_status": self.current_status.value,
            "current_run_id": self.current_run_id,
            "metrics": dict(self.metrics),
            "agents_status": self.hub.get_agent_status(),
            "tickers": self.config.all_tickers,
            "output_dir": self.config.output.output_dir,
            "recent_runs": self.workflow_history[-5:]
        }

    def get_workflow_history(self, limit: int = 50) -> List[Dict[str, Any]]:
        """Get workflow execution history"""
        return self.workflow_history[-limit:]
