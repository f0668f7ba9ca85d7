#!/usr/bin/env python3
"""
Order-flow memory analysis
Command line entry point: run pipeline stages or serve the results API
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

# Load environment variables from .env file
try:
    from dotenv import load_dotenv
    env_path = Path('.') / '.env'
    if env_path.exists():
        load_dotenv(env_path)
except ImportError:
    pass

from analysis.errors import ConfigurationError, OrderflowError
from utils.config import RunConfig, set_config
from utils.logger import configure_logging, setup_logger
from workflow import STAGES, AnalysisWorkflow

logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_CONFIG = 2

# subcommand -> (first stage, last stage)
STAGE_COMMANDS = {
    "ingest": ("ingest", "ingest"),
    "transform": ("transform", "transform"),
    "estimate": ("estimate", "estimate"),
    "burst": ("burst", "burst"),
    "report": ("report", "report"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orderflow-memory",
        description="Scaling exponents and long-range memory of order disbalance series",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration file")
    common.add_argument("--tickers", help="comma-separated tickers, overriding the configuration")
    common.add_argument("--seed", type=int, help="master seed for shuffling")
    common.add_argument("--out", help="output directory")
    common.add_argument("--jobs", type=int, help="stocks processed in parallel")

    commands = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("ingest", "parse LOBSTER files and store X and Y per ticker"),
        ("transform", "build shuffled, bounded and reverted variants from stored X and Y"),
        ("estimate", "run MSD, Absolute Value, Higuchi and tail-fit cells on stored variants"),
        ("burst", "run burst duration cells and threshold sweeps on stored variants"),
        ("report", "assemble reports and the cross-stock summary from stored cells"),
    ):
        commands.add_parser(name, parents=[common], help=help_text)
    generate = commands.add_parser("generate", parents=[common],
                                   help="generate the configured synthetic tickers and store X and Y")
    generate.set_defaults(synthetic_only=True)
    run_all = commands.add_parser("run-all", parents=[common], help="run every stage in memory")
    run_all.add_argument("--stage", choices=STAGES, default="ingest", help="resume from this stage")
    serve = commands.add_parser("serve", parents=[common], help="serve the results API")
    serve.add_argument("--host", help="bind address")
    serve.add_argument("--port", type=int, help="port")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """File, then environment, then command line flags"""
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    config.update_from_env()
    if args.tickers:
        requested = [t.strip() for t in args.tickers.split(",") if t.strip()]
        config.ingest.tickers = [t for t in requested if t not in config.synthetic]
        config.synthetic = {t: spec for t, spec in config.synthetic.items() if t in requested}
    if args.seed is not None:
        config.transform.seed = args.seed
    if args.out:
        config.output.output_dir = args.out
    if args.jobs is not None:
        config.output.jobs = args.jobs
    config._validate_config()
    return set_config(config)


def run_command(args: argparse.Namespace, config: RunConfig) -> int:
    workflow = AnalysisWorkflow(config)
    workflow.initialize()

    if args.command == "serve":
        from web_interface import create_app

        app = create_app(workflow)
        app.run(host=args.host or config.web.host, port=args.port or config.web.port,
                debug=config.web.debug, threaded=True)
        return EXIT_OK

    tickers: Optional[List[str]] = None
    if args.command == "generate":
        start, through = "ingest", "ingest"
        tickers = sorted(config.synthetic)
        if not tickers:
            logger.error("No synthetic tickers configured")
            return EXIT_CONFIG
    elif args.command == "run-all":
        start, through = args.stage, "report"
    else:
        start, through = STAGE_COMMANDS[args.command]

    result = workflow.run_all(tickers, start_stage=start, through=through)
    print(json.dumps({
        "success": result["success"],
        "run_id": result.get("run_id"),
        "reports": [report.ticker for report in result.get("reports", [])],
        "failures": result.get("failures", []),
        "output_dir": config.output.output_dir,
    }, indent=2, default=str))
    return EXIT_OK if result["success"] else EXIT_FAILURES


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
    except ConfigurationError as e:
        logger.error(str(e))
        print(json.dumps({"success": False, "error_type": "ConfigurationError", "problems": e.problems}, indent=2))
        return EXIT_CONFIG
    configure_logging(config.logging.log_level, config.logging.json_logging, config.logging.log_file or "")

    try:
        return run_command(args, config)
    except ConfigurationError as e:
        logger.error(str(e))
        print(json.dumps({"success": False, "error_type": "ConfigurationError", "problems": e.problems}, indent=2))
        return EXIT_CONFIG
    except OrderflowError as e:
        logger.error(f"Run failed: {e}")
        print(json.dumps({"success": False, "error_type": type(e).__name__, "error": str(e)}, indent=2))
        return EXIT_FAILURES


if __name__ == "__main__":
    sys.exit(main())
