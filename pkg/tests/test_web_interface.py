"""
Unit tests for the JSON web interface
"""

import os
import sys
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from analysis.export import SUMMARY_FILE
from analysis.reports import TABLE1_COLUMNS, StockReport
from utils.config import RunConfig
from web_interface import create_app
from workflow import AnalysisWorkflow, WorkflowStatus


class TestWebInterface(unittest.TestCase):
    """Test the Flask routes over a results directory"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        config = RunConfig.from_dict({"output": {"output_dir": self.tmp.name}})
        self.workflow = AnalysisWorkflow(config)
        self.workflow.initialize()
        self.client = create_app(self.workflow).test_client()

    def tearDown(self):
        self.tmp.cleanup()

    def write_report(self, ticker, h_av):
        report = StockReport(ticker=ticker, start_date="2012-06-21", end_date="2012-07-20",
                             h_av=h_av, h_avr=0.5)
        self.workflow.store.write_report(report, TABLE1_COLUMNS)

    def test_status(self):
        response = self.client.get('/api/status')
        self.assertEqual(response.status_code, 200)
        data = response.get_json()
        self.assertTrue(data["success"])
        self.assertEqual(data["data"]["current_status"], "idle")

    def test_reports(self):
        self.assertEqual(self.client.get('/api/reports').get_json()["count"], 0)
        self.write_report("AAPL", 0.27)
        self.write_report("CSCO", 0.31)

        listing = self.client.get('/api/reports').get_json()
        self.assertEqual(listing["count"], 2)
        self.assertEqual([r["ticker"] for r in listing["data"]], ["AAPL", "CSCO"])

        single = self.client.get('/api/reports/CSCO')
        self.assertEqual(single.status_code, 200)
        self.assertEqual(single.get_json()["data"]["h_av"], 0.31)
        self.assertEqual(self.client.get('/api/reports/MSFT').status_code, 404)

    def test_summary(self):
        self.assertEqual(self.client.get('/api/summary').status_code, 404)
        self.workflow.store.write_json(SUMMARY_FILE, {"count": 2})
        response = self.client.get('/api/summary')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.get_json()["data"], {"count": 2})

    def test_errors(self):
        self.assertEqual(self.client.get('/api/errors').get_json()["count"], 0)
        self.workflow.store.write_errors([{"ticker": "MSFT", "stage": "ingest", "error": "no files"}])
        data = self.client.get('/api/errors').get_json()
        self.assertEqual(data["count"], 1)
        self.assertEqual(data["manifest"], "errors.json")

    def test_config(self):
        live = self.client.get('/api/config').get_json()
        self.assertEqual(live["source"], "live")
        self.assertIn("transform", live["data"]["config"])

        self.workflow.store.write_run_config()
        stored = self.client.get('/api/config').get_json()
        self.assertEqual(stored["source"], "run_config.json")
        self.assertEqual(stored["data"], live["data"])

    def test_trigger_run_validation(self):
        response = self.client.post('/api/trigger-run', json={"stage": "plot"})
        self.assertEqual(response.status_code, 400)
        response = self.client.post('/api/trigger-run', json={"tickers": "AAPL"})
        self.assertEqual(response.status_code, 400)

    def test_trigger_run(self):
        with patch.object(self.workflow, "run_all") as run_all, \
                patch("web_interface.threading.Thread") as thread:
            response = self.client.post('/api/trigger-run', json={"stage": "estimate", "tickers": ["AAPL"]})
            self.assertEqual(response.status_code, 202)
            self.assertEqual(response.get_json()["stage"], "estimate")
            thread.return_value.start.assert_called_once()
            thread.call_args.kwargs["target"]()
            run_all.assert_called_once_with(["AAPL"], start_stage="estimate")

    def test_trigger_while_running(self):
        self.workflow.current_status = WorkflowStatus.RUNNING
        response = self.client.post('/api/trigger-run', json={})
        self.assertEqual(response.status_code, 409)

    def test_unknown_route(self):
        response = self.client.get('/api/nothing')
        self.assertEqual(response.status_code, 404)
        self.assertFalse(response.get_json()["success"])


if __name__ == "__main__":
    unittest.main(verbosity=2)
