"""
Logging utility for the order-flow analysis
JSON or plain-text records on stderr and an optional log file; settings come
from the environment at import and from the run configuration once it is loaded
"""

import json
import logging
import os
import uuid
from datetime import datetime
from typing import Any, Dict, List, Optional

TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

_settings: Dict[str, Any] = {
    "level": os.getenv("LOG_LEVEL", "INFO").upper(),
    "json_logging": os.getenv("JSON_LOGGING", "true").lower() == "true",
    "log_file": os.getenv("LOG_FILE") or None,
}
# logger name -> explicit level, or None to follow the global setting
_managed: Dict[str, Optional[str]] = {}


class JSONFormatter(logging.Formatter):
    """One JSON object per record; ``extra_fields`` are merged in at the top level"""

    def format(self, record):
        entry = {
            "timestamp": datetime.utcnow().isoformat() + "Z",
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        entry.update(getattr(record, "extra_fields", {}))
        # numpy scalars and paths end up here through metadata
        return json.dumps(entry, default=str)


def _level_number(level: str) -> int:
    return getattr(logging, str(level).upper(), logging.INFO)


def _handlers(level: int) -> List[logging.Handler]:
    formatter = JSONFormatter() if _settings["json_logging"] else logging.Formatter(TEXT_FORMAT)
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if _settings["log_file"]:
        try:
            handlers.append(logging.FileHandler(_settings["log_file"]))
        except OSError as e:
            logging.getLogger(__name__).warning(f"Failed to setup file logging to {_settings['log_file']}: {e}")
    for handler in handlers:
        handler.setLevel(level)
        handler.setFormatter(formatter)
    return handlers


def _install(logger: logging.Logger, level: Optional[str]):
    number = _level_number(level or _settings["level"])
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        if isinstance(handler, logging.FileHandler):
            handler.close()
    logger.setLevel(number)
    for handler in _handlers(number):
        logger.addHandler(handler)


def setup_logger(name: str, level: str = None) -> logging.Logger:
    """Logger with the current handlers; repeated calls reuse it unless a new level is given"""
    logger = logging.getLogger(name)
    if name in _managed and level is None and logger.handlers:
        return logger
    _managed[name] = level
    _install(logger, level)
    return logger


def configure_logging(level: Optional[str] = None, json_logging: Optional[bool] = None,
                      log_file: Optional[str] = None) -> logging.Logger:
    """Apply run configuration to every managed logger and the numerical core's ``analysis`` tree"""
    if level is not None:
        _settings["level"] = level.upper()
    if json_logging is not None:
        _settings["json_logging"] = json_logging
    if log_file is not None:
        _settings["log_file"] = log_file or None
    _managed.setdefault("analysis", None)
    for name, explicit in _managed.items():
        _install(logging.getLogger(name), explicit)
    return logging.getLogger("analysis")


class SystemLogger:
    """Structured events for runs, stock stages and report cells"""

    def __init__(self, system_name: str = "OrderflowMemory"):
        self.system_name = system_name
        self.logger = setup_logger(system_name)
        self.session_id = str(uuid.uuid4())[:8]
        self.run_id: Optional[str] = None

    def bind_run(self, run_id: Optional[str]):
        """Tag subsequent events with a run id; None clears it"""
        self.run_id = run_id

    def log_system_event(self, event_type: str, message: str, metadata: Dict[str, Any] = None, level: str = "info"):
        fields = {"event_type": event_type, "system": self.system_name, "session_id": self.session_id}
        if self.run_id is not None:
            fields["run_id"] = self.run_id
        fields.update(metadata or {})
        self.logger.log(_level_number(level), message, extra={"extra_fields": fields})

    def _event(self, event_type: str, message: str, fields: Dict[str, Any], metadata: Optional[Dict[str, Any]],
               level: str):
        self.log_system_event(event_type, message, {**fields, **(metadata or {})}, level)

    def log_workflow_stage(self, stage: str, status: str, metadata: Dict[str, Any] = None):
        self._event("workflow_stage", f"Workflow stage {stage}: {status}",
                    {"workflow_stage": stage, "status": status}, metadata,
                    "warning" if status == "failed" else "info")

    def log_stock_pipeline(self, ticker: str, stage: str, status: str, metadata: Dict[str, Any] = None):
        self._event("stock_pipeline", f"{ticker} - {stage}: {status}",
                    {"ticker": ticker, "pipeline_stage": stage, "status": status}, metadata,
                    "error" if status == "failed" else "info")

    def log_estimator_cell(self, ticker: str, cell: str, status: str, metadata: Dict[str, Any] = None):
        self._event("estimator_cell", f"{ticker} {cell}: {status}",
                    {"ticker": ticker, "cell": cell, "status": status}, metadata,
                    "warning" if status == "failed" else "debug")

    def log_performance_metric(self, metric_name: str, value: float, unit: str = "", metadata: Dict[str, Any] = None):
        self._event("performance_metric", f"{metric_name}: {value} {unit}".rstrip(),
                    {"metric_name": metric_name, "value": value, "unit": unit}, metadata, "info")


# Global system logger instance
system_logger = SystemLogger()
