"""
Base Agent Class
Shared plumbing for the pipeline agents: structured logging, task routing and
per-cell failure isolation
"""

import json
import logging
import time
import uuid
from abc import ABC, abstractmethod
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional, Tuple

from analysis.errors import OrderflowError
from utils.logger import setup_logger, system_logger


class BaseAgent(ABC):
    """Abstract base class for all agents in the pipeline"""

    def __init__(self, name: str, role: str, tools: List[str] = None):
        self.name = name
        self.role = role
        self.tools = tools or []
        self.agent_id = str(uuid.uuid4())
        self.logger = setup_logger("agent." + "_".join(name.lower().split()))
        self.state: Dict[str, Any] = {}
        self.task_history: List[Dict[str, str]] = []

    def log_message(self, message: str, level: str = "info", metadata: Dict[str, Any] = None):
        """Log with the agent's id and name attached"""
        payload = {"agent_id": self.agent_id, "agent_name": self.name, "message": message, **(metadata or {})}
        self.logger.log(getattr(logging, level.upper(), logging.INFO), json.dumps(payload, default=str))

    def update_state(self, key: str, value: Any):
        self.state[key] = value
        self.log_message(f"State updated: {key}", level="debug", metadata={"state_key": key})

    def get_state(self, key: str, default: Any = None) -> Any:
        return self.state.get(key, default)

    def validate_input(self, data: Dict[str, Any], required_fields: List[str]) -> Tuple[bool, str]:
        """Check a task payload; the message names every missing field"""
        missing = [field for field in required_fields if field not in data]
        if not missing:
            return True, "Valid"
        message = "Missing required fields: " + ", ".join(missing)
        self.log_message(message, level="error")
        return False, message

    def create_response(self, success: bool, data: Dict[str, Any] = None, error: str = None,
                        error_type: str = None) -> Dict[str, Any]:
        """Envelope shared by every agent reply"""
        response = {"agent": self.name, "agent_id": self.agent_id,
                    "timestamp": datetime.utcnow().isoformat(), "success": success}
        if success:
            if data:
                response["data"] = data
        elif error:
            response.update(error=error, error_type=error_type or "Error")
        return response

    def run_cell(self, ticker: str, cell: str, compute: Callable[[], Any]) -> Tuple[Optional[Any], Optional[str]]:
        """Evaluate one report cell; an analysis error is returned, never raised"""
        started = time.perf_counter()
        try:
            value = compute()
        except (OrderflowError, ValueError, ArithmeticError) as e:
            message = f"{type(e).__name__}: {e}"
            system_logger.log_estimator_cell(ticker, cell, "failed", {"error": message})
            return None, message
        system_logger.log_estimator_cell(ticker, cell, "completed",
                                         {"duration_ms": round((time.perf_counter() - started) * 1000, 3)})
        return value, None

    def dispatch(self, task_data: Dict[str, Any], handlers: Dict[str, Callable[[Dict[str, Any]], Dict[str, Any]]]) -> Dict[str, Any]:
        """Route a task to its handler and convert failures into error responses"""
        task_type = task_data.get("task_type")
        handler = handlers.get(task_type)
        if handler is None:
            return self.create_response(False, error=f"Unknown task type: {task_type}", error_type="UnknownTask")

        self.task_history.append({"task_type": task_type, "started_at": datetime.utcnow().isoformat()})
        try:
            return self.create_response(True, handler(task_data))
        except OrderflowError as e:
            self.log_message(f"{task_type} failed: {e}", level="error", metadata={"error_type": type(e).__name__})
            return self.create_response(False, error=str(e), error_type=type(e).__name__)
        except (ValueError, KeyError, OSError) as e:
            self.log_message(f"{task_type} failed: {e}", level="error", metadata={"error_type": type(e).__name__})
            return self.create_response(False, error=f"{type(e).__name__}: {e}", error_type=type(e).__name__)

    @abstractmethod
    def execute_task(self, task_data: Dict[str, Any]) -> Dict[str, Any]:
        """Run one task; subclasses route ``task_type`` through ``dispatch``"""

    def get_capabilities(self) -> Dict[str, Any]:
        """Identity plus the stocks this agent has state for and how many tasks it ran"""
        return {"name": self.name, "role": self.role, "tools": self.tools, "agent_id": self.agent_id,
                "state_keys": sorted(self.state), "task_count": len(self.task_history)}


class AgentHub:
    """Registry the workflow uses to address agents by name"""

    def __init__(self):
        self.agents = {}
        self.logger = setup_logger("agent_hub")

    def register_agent(self, key: str, agent: BaseAgent):
        """Register an agent with the hub"""
        self.agents[key] = agent
        self.logger.info(f"Agent registered: {agent.name} ({agent.role})")

    def dispatch(self, key: str, task_data: Dict[str, Any]) -> Dict[str, Any]:
        """Hand a task to a registered agent"""
        if key not in self.agents:
            error_msg = f"Target agent not found: {key}"
            self.logger.error(error_msg)
            return {"success": False, "error": error_msg, "error_type": "UnknownAgent"}
        return self.agents[key].execute_task(task_data)

    def get_agent_status(self) -> Dict[str, Any]:
        """Get status of all registered agents"""
        return {key: agent.get_capabilities() for key, agent in self.agents.items()}


class CellResults:
    """Values, errors and fits collected for one stock by one agent"""

    def __init__(self):
        self.values: Dict[str, Optional[float]] = {}
        self.stderr: Dict[str, float] = {}
        self.errors: Dict[str, str] = {}
        self.fits: Dict[str, Dict[str, Any]] = {}
        self.diagnostics: Dict[str, Any] = {}
        self.histograms: Dict[str, Any] = {}
        self.tables: Dict[str, List[Dict[str, Any]]] = {}

    def record(self, cell: str, fit: Optional[Any], error: Optional[str], value: Optional[float] = None):
        """Store a fit under ``cell``; ``value`` overrides the fit's exponent"""
        if error is not None or fit is None:
            self.values[cell] = None
            self.errors[cell] = error or "no result"
            return
        fit_dict = fit.to_dict()
        self.values[cell] = fit.exponent if value is None else value
        self.stderr[cell] = fit_dict.get("std_error", fit_dict.get("fit", {}).get("std_error"))
        self.fits[cell] = fit_dict

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready part; histograms and tables are written as CSV separately"""
        return {
            "values": self.values,
            "stderr": self.stderr,
            "errors": self.errors,
            "fits": self.fits,
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CellResults":
        results = cls()
        results.values = dict(data.get("values", {}))
        results.stderr = dict(data.get("stderr", {}))
        results.errors = dict(data.get("errors", {}))
        results.fits = dict(data.get("fits", {}))
        results.diagnostics = dict(data.get("diagnostics", {}))
        return results
