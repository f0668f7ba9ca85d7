"""
Unit tests for structured logging
"""

import json
import logging
import os
import sys
import tempfile
import unittest

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from utils import logger as log_module
from utils.logger import JSONFormatter, SystemLogger, configure_logging, setup_logger


class TestLogging(unittest.TestCase):
    """Test formatter, logger setup and run configuration"""

    def setUp(self):
        self.saved = dict(log_module._settings)

    def tearDown(self):
        configure_logging(self.saved["level"], self.saved["json_logging"], self.saved["log_file"] or "")

    def test_json_formatter_merges_fields(self):
        record = logging.makeLogRecord({"name": "t", "levelname": "INFO", "msg": "done",
                                        "extra_fields": {"ticker": "CSCO", "value": float("nan")}})
        entry = json.loads(JSONFormatter().format(record))
        self.assertEqual(entry["message"], "done")
        self.assertEqual(entry["ticker"], "CSCO")

    def test_setup_is_idempotent(self):
        logger = setup_logger("test.idempotent")
        count = len(logger.handlers)
        self.assertIs(setup_logger("test.idempotent"), logger)
        self.assertEqual(len(logger.handlers), count)

    def test_configure_logging_applies_file_and_level(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "run.log")
            logger = setup_logger("test.configured")
            configure_logging("WARNING", True, path)
            self.assertEqual(logger.level, logging.WARNING)
            self.assertEqual(logging.getLogger("analysis").level, logging.WARNING)
            events = SystemLogger("test.system")
            events.bind_run("run-1")
            events.log_stock_pipeline("CSCO", "ingest", "failed", {"error": "no files"})
            events.log_estimator_cell("CSCO", "h_av", "completed")
            configure_logging(log_file="")
            with open(path) as handle:
                lines = [json.loads(line) for line in handle if line.strip()]
        self.assertEqual(len(lines), 1)
        self.assertEqual(lines[0]["run_id"], "run-1")
        self.assertEqual(lines[0]["pipeline_stage"], "ingest")
        self.assertEqual(lines[0]["level"], "ERROR")


if __name__ == "__main__":
    unittest.main(verbosity=2)
