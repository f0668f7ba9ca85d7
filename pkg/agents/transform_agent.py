"""
Transform Agent
Builds the series variants every estimator cell reads: shuffled increments and
their accumulation, the bounded random walk and the fractionally reverted series
"""

from typing import Any, Dict

from agents.base_agent import BaseAgent
from analysis.series import Series
from analysis.transforms import (
    accumulate,
    bound_series,
    derive_seed,
    drop_warmup,
    fractional_revert,
    shuffle_increments,
)

VARIANTS = ("x", "y", "y_r", "x_r", "x_rb", "y_f", "x_f")


def shuffle_seed(master_seed: int, y: Series) -> int:
    """One seed per (ticker, joined span), independent of scheduling order"""
    return derive_seed(master_seed, y.meta.ticker, y.meta.start_date, y.meta.end_date)


class TransformAgent(BaseAgent):
    """Derives X_R, X_RB and X_F from the empirical increments"""

    def __init__(self):
        super().__init__(
            name="Transform Agent",
            role="Series Surgeon",
            tools=["shuffle_increments", "accumulate", "bound_series", "fractional_revert"]
        )

    def execute_task(self, task_data: Dict[str, Any]) -> Dict[str, Any]:
        """Execute transform task"""
        return self.dispatch(task_data, {
            "build_variants": self.build_variants,
        })

    def build_variants(self, task_data: Dict[str, Any]) -> Dict[str, Any]:
        valid, message = self.validate_input(task_data, ["x", "y", "settings"])
        if not valid:
            raise KeyError(message)

        x: Series = task_data["x"]
        y: Series = task_data["y"]
        settings = task_data["settings"]
        seed = shuffle_seed(settings["seed"], y)

        y_r = shuffle_increments(y, seed)
        x_r = accumulate(y_r, float(x.values[0]))
        x_rb = bound_series(y_r, settings["bound"], 0.0)
        y_f = fractional_revert(y_r, settings["d"], settings["truncation"])
        if settings.get("drop_warmup"):
            y_f = drop_warmup(y_f, settings["truncation"])
        x_f = accumulate(y_f, 0.0)

        self.log_message(f"Built variants for {y.meta.ticker}",
                         metadata={"seed": seed, "length": len(y), "d": settings["d"]})
        return {
            "seed": seed,
            "variants": {"x": x, "y": y, "y_r": y_r, "x_r": x_r, "x_rb": x_rb, "y_f": y_f, "x_f": x_f},
        }
