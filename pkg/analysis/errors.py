"""
Exception hierarchy for the order-flow analysis toolkit
"""

from typing import Iterable, Optional


class OrderflowError(Exception):
    """Base class for every error raised by the toolkit"""


class ConfigurationError(OrderflowError, ValueError):
    """Run configuration failed validation"""

    def __init__(self, problems: Iterable[str]):
        self.problems = list(problems)
        super().__init__("Configuration validation failed:\n" + "\n".join(f"- {p}" for p in self.problems))


class EmptyInputError(OrderflowError, ValueError):
    """Input held no usable records"""

    def __init__(self, what: str = "input"):
        super().__init__(f"empty {what}")


class LobsterFormatError(OrderflowError, ValueError):
    """Malformed row in a LOBSTER message or orderbook file"""

    def __init__(self, path: str, line: int, reason: str):
        self.path = str(path)
        self.line = line
        self.reason = reason
        super().__init__(f"{self.path}: line {line}: {reason}")


class MissingDataError(OrderflowError, FileNotFoundError):
    """Data files for a ticker are absent or unpaired"""

    def __init__(self, ticker: str, gaps: Iterable[str]):
        self.ticker = ticker
        self.gaps = list(gaps)
        super().__init__(f"missing data for {ticker}: " + "; ".join(self.gaps))


class SeriesKindError(OrderflowError, ValueError):
    """Operation applied to a series of the wrong kind"""


class TransformError(OrderflowError, ValueError):
    """Invalid transform parameters"""


class GeneratorError(OrderflowError, ValueError):
    """Invalid synthetic generator specification"""


class EstimationError(OrderflowError, ValueError):
    """An estimator could not produce a fit"""


class DegenerateSeriesError(EstimationError):
    """Series carries no variation the estimator can scale"""

    def __init__(self, detail: Optional[str] = None):
        message = "degenerate series"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class InsufficientDataError(EstimationError):
    """Too few samples or points for a reliable fit"""


class ExportError(OrderflowError, OSError):
    """Writing or reading an artifact failed"""

    def __init__(self, path: str, reason: str):
        self.path = str(path)
        super().__init__(f"{self.path}: {reason}")
