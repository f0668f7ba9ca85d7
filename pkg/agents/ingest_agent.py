"""
Ingest Agent
Finds a ticker's LOBSTER day files, parses them on a worker pool and joins the
daily order disbalance series into one increment series and one joint path
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List

from agents.base_agent import BaseAgent
from analysis.lob_ingest import DEFAULT_DEPTH, discover_day_files, join_daily, joint_path, load_day


class IngestAgent(BaseAgent):
    """Turns LOBSTER file pairs into X and Y series"""

    def __init__(self):
        super().__init__(
            name="Ingest Agent",
            role="LOBSTER Reader / Disbalance Builder",
            tools=["discover_day_files", "parse_messages", "parse_orderbook", "build_disbalance", "join_daily"]
        )

    def execute_task(self, task_data: Dict[str, Any]) -> Dict[str, Any]:
        """Execute ingest task"""
        return self.dispatch(task_data, {
            "load_stock": self.load_stock,
        })

    def load_stock(self, task_data: Dict[str, Any]) -> Dict[str, Any]:
        valid, message = self.validate_input(task_data, ["ticker", "data_root"])
        if not valid:
            raise KeyError(message)

        ticker = task_data["ticker"]
        depth = task_data.get("depth", DEFAULT_DEPTH)
        files = discover_day_files(task_data["data_root"], ticker, depth, task_data.get("date_range"))
        self.log_message(f"Loading {len(files)} days for {ticker}", metadata={"ticker": ticker, "depth": depth})

        jobs = max(1, int(task_data.get("jobs", 1)))
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            days: List = list(pool.map(lambda f: load_day(f, depth), files))

        y = join_daily(days)
        x = joint_path(days)
        events = sum(len(day) for day in days)
        self.update_state(f"loaded:{ticker}", {"days": len(days), "events": events})
        self.log_message(f"Joined {ticker}", metadata={"days": len(days), "increments": len(y)})
        return {
            "ticker": ticker,
            "days": [f.day for f in files],
            "events": events,
            "x": x,
            "y": y,
        }
