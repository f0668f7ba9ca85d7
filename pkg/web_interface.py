"""
Web Interface for the order-flow analysis
Flask JSON service over a results directory: run status, stock reports,
cross-stock summary, failure manifest and run triggering
"""

import threading
from datetime import datetime
from pathlib import Path
from typing import Optional

from flask import Flask, jsonify, request

from analysis.errors import OrderflowError
from analysis.export import ERRORS_FILE, RUN_CONFIG_FILE, SUMMARY_FILE
from utils.config import get_config
from utils.logger import setup_logger, system_logger
from workflow import STAGES, AnalysisWorkflow, WorkflowStatus


def create_app(workflow: Optional[AnalysisWorkflow] = None):
    """Create and configure Flask application"""
    app = Flask(__name__)
    config = workflow.config if workflow is not None else get_config()
    app.config['DEBUG'] = config.web.debug

    logger = setup_logger("web_interface")

    def get_workflow() -> AnalysisWorkflow:
        nonlocal workflow
        if workflow is None:
            workflow = AnalysisWorkflow(config)
            workflow.initialize()
        return workflow

    def store():
        return get_workflow().store

    def failure(error: str, status: int):
        return jsonify({
            "success": False,
            "error": error,
            "timestamp": datetime.utcnow().isoformat()
        }), status

    @app.route('/api/status')
    def api_status():
        """Workflow status and metrics"""
        return jsonify({
            "success": True,
            "data": get_workflow().get_workflow_status(),
            "timestamp": datetime.utcnow().isoformat()
        })

    @app.route('/api/reports')
    def api_reports():
        """Every stored stock report"""
        try:
            reports = store().load_reports()
        except OrderflowError as e:
            logger.error(f"Report listing error: {e}")
            return failure(str(e), 500)
        return jsonify({
            "success": True,
            "data": [report.to_dict() for report in reports],
            "count": len(reports)
        })

    @app.route('/api/reports/<ticker>')
    def api_report(ticker):
        """Stored report of one ticker"""
        matches = sorted(Path(store().root).glob(f"{ticker}_*report.json"))
        if not matches:
            return failure(f"No report for {ticker}", 404)
        try:
            report = store().load_report(matches[-1].name)
        except OrderflowError as e:
            return failure(str(e), 500)
        return jsonify({"success": True, "data": report.to_dict()})

    @app.route('/api/summary')
    def api_summary():
        """Cross-stock memory parameter summary"""
        if not store().path(SUMMARY_FILE).exists():
            return failure("No summary available; aggregation needs at least two reports", 404)
        try:
            return jsonify({"success": True, "data": store().read_json(SUMMARY_FILE)})
        except OrderflowError as e:
            return failure(str(e), 500)

    @app.route('/api/errors')
    def api_errors():
        """Failure manifest of the last run"""
        try:
            failures = store().read_errors()
        except OrderflowError as e:
            return failure(str(e), 500)
        return jsonify({"success": True, "data": failures, "count": len(failures),
                        "manifest": ERRORS_FILE})

    @app.route('/api/config')
    def api_config():
        """Configuration used for the results on disk, or the live one"""
        path = store().path(RUN_CONFIG_FILE)
        if path.exists():
            try:
                return jsonify({"success": True, "source": RUN_CONFIG_FILE,
                                "data": store().read_json(RUN_CONFIG_FILE, with_provenance=False)})
            except OrderflowError as e:
                return failure(str(e), 500)
        return jsonify({"success": True, "source": "live", "data": get_workflow().config.provenance()})

    @app.route('/api/trigger-run', methods=['POST'])
    def api_trigger_run():
        """Start a run in the background"""
        wf = get_workflow()
        payload = request.get_json(silent=True) or {}
        stage = payload.get("stage", "ingest")
        tickers = payload.get("tickers")
        if stage not in STAGES:
            return failure(f"Unknown stage: {stage}", 400)
        if tickers is not None and not (isinstance(tickers, list) and all(isinstance(t, str) for t in tickers)):
            return failure("tickers must be a list of strings", 400)
        if wf.current_status is WorkflowStatus.RUNNING:
            return jsonify({
                "success": False,
                "error": "Workflow already running",
                "current_run_id": wf.current_run_id
            }), 409

        def run():
            try:
                wf.run_all(tickers, start_stage=stage)
            except OrderflowError as e:
                logger.error(f"Triggered run failed: {e}")

        threading.Thread(target=run, daemon=True).start()
        system_logger.log_system_event(
            "manual_run_trigger",
            "Run triggered via web interface",
            {"stage": stage, "tickers": tickers}
        )
        return jsonify({"success": True, "message": "Run started", "stage": stage}), 202

    @app.errorhandler(404)
    def not_found(error):
        """Handle 404 errors"""
        return failure("Not found", 404)

    @app.errorhandler(500)
    def internal_error(error):
        """Handle 500 errors"""
        logger.error(f"Internal server error: {error}")
        return failure("Internal server error", 500)

    return app
