"""
Unit tests for the command line entry point
"""

import io
import json
import os
import sys
import tempfile
import unittest
from contextlib import redirect_stdout
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from main import EXIT_CONFIG, EXIT_OK, build_parser, load_config, main
from utils.config import set_config


def run_main(argv):
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        code = main(argv)
    return code, json.loads(buffer.getvalue())


class TestCommandLine(unittest.TestCase):
    """Test argument parsing, config layering and exit codes"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)
        self.config_path = self.root / "run.json"
        self.config_path.write_text(json.dumps({
            "ingest": {"tickers": ["CSCO"], "data_root": str(self.root)},
            "synthetic": {
                "SYNA": {"d": -0.3, "length": 4096, "seed": 1},
                "SYNB": {"noise": {"kind": "stable", "alpha": 1.5}, "length": 4096, "seed": 2},
            },
        }))

    def tearDown(self):
        set_config(None)
        self.tmp.cleanup()

    def test_parser(self):
        args = build_parser().parse_args(["run-all", "--stage", "estimate", "--seed", "5", "--jobs", "2"])
        self.assertEqual(args.command, "run-all")
        self.assertEqual(args.stage, "estimate")
        self.assertEqual((args.seed, args.jobs), (5, 2))
        with self.assertRaises(SystemExit):
            build_parser().parse_args(["run-all", "--stage", "plot"])

    def test_flags_override_file(self):
        args = build_parser().parse_args([
            "estimate", "--config", str(self.config_path), "--tickers", "SYNA,CSCO",
            "--seed", "9", "--out", str(self.root / "out"),
        ])
        config = load_config(args)
        self.assertEqual(config.ingest.tickers, ["CSCO"])
        self.assertEqual(sorted(config.synthetic), ["SYNA"])
        self.assertEqual(config.transform.seed, 9)
        self.assertEqual(config.output.output_dir, str(self.root / "out"))

    def test_bad_config_file(self):
        self.config_path.write_text(json.dumps({"transform": {"d": 0.9}}))
        code, output = run_main(["run-all", "--config", str(self.config_path)])
        self.assertEqual(code, EXIT_CONFIG)
        self.assertEqual(output["error_type"], "ConfigurationError")
        self.assertTrue(output["problems"])

    def test_missing_data_root(self):
        self.config_path.write_text(json.dumps({"ingest": {"tickers": ["CSCO"], "data_root": str(self.root / "absent")}}))
        code, output = run_main(["ingest", "--config", str(self.config_path), "--tickers", "CSCO",
                                 "--out", str(self.root / "out")])
        self.assertEqual(code, EXIT_CONFIG)
        self.assertEqual(output["error_type"], "ConfigurationError")

    def test_generate_then_transform(self):
        out = self.root / "out"
        code, output = run_main(["generate", "--config", str(self.config_path), "--out", str(out)])
        self.assertEqual(code, EXIT_OK, output)
        self.assertTrue(output["success"])
        self.assertTrue((out / "SYNA_y.csv").exists())
        self.assertTrue((out / "SYNB_x.meta.json").exists())

        code, output = run_main(["transform", "--config", str(self.config_path), "--tickers", "SYNA",
                                 "--out", str(out)])
        self.assertEqual(code, EXIT_OK, output)
        self.assertTrue((out / "SYNA_y_f.csv").exists())
        self.assertFalse((out / "SYNB_y_f.csv").exists())

    def test_generate_without_synthetic_tickers(self):
        self.config_path.write_text(json.dumps({"ingest": {"tickers": ["CSCO"], "data_root": str(self.root)}}))
        code = main(["generate", "--config", str(self.config_path), "--out", str(self.root / "out")])
        self.assertEqual(code, EXIT_CONFIG)


if __name__ == "__main__":
    unittest.main(verbosity=2)
