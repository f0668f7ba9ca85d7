"""
Generator Agent
Produces synthetic "stocks" from ARFIMA(0,d,0) specifications so the whole
pipeline can run against series whose exponents are known
"""

from typing import Any, Dict

from agents.base_agent import BaseAgent
from analysis.series import Series, SeriesKind, SeriesMeta
from analysis.synth import GenSpec, gen_arfima_increments
from analysis.transforms import accumulate


class GeneratorAgent(BaseAgent):
    """Synthetic series in the same shape the ingest agent returns"""

    def __init__(self):
        super().__init__(
            name="Generator Agent",
            role="Synthetic Series Generator",
            tools=["gen_noise", "gen_arfima_increments", "gen_arfima"]
        )

    def execute_task(self, task_data: Dict[str, Any]) -> Dict[str, Any]:
        """Execute generation task"""
        return self.dispatch(task_data, {
            "generate_stock": self.generate_stock,
        })

    def generate_stock(self, task_data: Dict[str, Any]) -> Dict[str, Any]:
        valid, message = self.validate_input(task_data, ["ticker", "spec"])
        if not valid:
            raise KeyError(message)

        ticker = task_data["ticker"]
        spec = task_data["spec"]
        if not isinstance(spec, GenSpec):
            spec = GenSpec.from_dict(spec)

        generated = gen_arfima_increments(spec)
        meta = SeriesMeta(
            ticker=ticker,
            source=f"synthetic ARFIMA(0,{spec.d},0) with {spec.noise.describe()}",
            extra={"generator": spec.to_dict(), **generated.meta.extra},
        )
        # relabelled as plain increments so the stock pipeline treats it like ingested data
        y = Series(generated.values, SeriesKind.INCREMENTS, meta, True)
        x = accumulate(y, 0.0)
        self.log_message(f"Generated {ticker}", metadata={"length": spec.length, "d": spec.d,
                                                          "noise": spec.noise.describe()})
        return {"ticker": ticker, "days": [], "events": spec.length, "x": x, "y": y}
