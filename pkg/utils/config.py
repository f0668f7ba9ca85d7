"""
Configuration management for the order-flow memory analysis
Handles the JSON run file, environment overrides and validation
"""

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from analysis.errors import ConfigurationError, GeneratorError
from analysis.synth import GenSpec


@dataclass
class IngestConfig:
    """LOBSTER input settings"""
    data_root: str = field(default_factory=lambda: os.getenv("ORDERFLOW_DATA_ROOT", "data"))
    tickers: List[str] = field(default_factory=list)
    date_range: Tuple[str, str] = ("", "")
    depth: int = 10
    ingest_jobs: int = 4


@dataclass
class TransformConfig:
    """Series surgery settings"""
    seed: int = 0
    bound: float = 100_000.0
    d: float = -0.3
    truncation: int = 1000
    drop_warmup: bool = False


@dataclass
class EstimatorConfig:
    """Grids and fit windows for the scaling estimators"""
    msd_max_lag_fraction: float = 0.1
    msd_fit_range: Optional[Tuple[float, float]] = None
    ave_max_block: Optional[int] = None
    higuchi_max_window: Optional[int] = None
    # reverted series lose memory beyond the truncation, cap their grids there
    cap_reverted_grids: bool = True
    tail_fraction: float = 0.01
    tail_bins_per_decade: int = 10
    tail_min_bin_count: int = 10
    min_tail_samples: int = 1000
    autocov_max_lag: int = 20
    autocov_centered: bool = False


@dataclass
class BurstConfig:
    """Threshold crossing and duration fit settings"""
    threshold_multipliers: List[float] = field(default_factory=lambda: [0.5, 1.0, 1.5])
    fit_range: Tuple[float, float] = (2.0, 20.0)
    durations: str = "bursts"
    sweep_durations: str = "interbursts"
    bins_per_decade: int = 10
    min_bin_count: int = 3


@dataclass
class OutputConfig:
    """Where and what to persist"""
    output_dir: str = field(default_factory=lambda: os.getenv("ORDERFLOW_OUTPUT_DIR", "results"))
    dump_series: bool = False
    jobs: int = 1


@dataclass
class LoggingConfig:
    """Logging configuration"""
    log_level: str = field(default_factory=lambda: os.getenv("LOG_LEVEL", "INFO"))
    json_logging: bool = field(default_factory=lambda: os.getenv("JSON_LOGGING", "true").lower() == "true")
    log_file: Optional[str] = field(default_factory=lambda: os.getenv("LOG_FILE"))


@dataclass
class WebInterfaceConfig:
    """Results service configuration"""
    host: str = "0.0.0.0"
    port: int = 5000
    debug: bool = field(default_factory=lambda: os.getenv("FLASK_DEBUG", "false").lower() == "true")


_SECTIONS = {
    "ingest": IngestConfig,
    "transform": TransformConfig,
    "estimators": EstimatorConfig,
    "bursts": BurstConfig,
    "output": OutputConfig,
    "logging": LoggingConfig,
    "web": WebInterfaceConfig,
}

_TUPLE_FIELDS = {("ingest", "date_range"), ("estimators", "msd_fit_range"), ("bursts", "fit_range")}

_DURATION_CHOICES = ("bursts", "interbursts", "both")


class RunConfig:
    """Main configuration class that aggregates all settings"""

    def __init__(self, sections: Optional[Dict[str, Any]] = None,
                 synthetic: Optional[Dict[str, GenSpec]] = None, validate: bool = True):
        sections = sections or {}
        self.ingest: IngestConfig = sections.get("ingest") or IngestConfig()
        self.transform: TransformConfig = sections.get("transform") or TransformConfig()
        self.estimators: EstimatorConfig = sections.get("estimators") or EstimatorConfig()
        self.bursts: BurstConfig = sections.get("bursts") or BurstConfig()
        self.output: OutputConfig = sections.get("output") or OutputConfig()
        self.logging: LoggingConfig = sections.get("logging") or LoggingConfig()
        self.web: WebInterfaceConfig = sections.get("web") or WebInterfaceConfig()
        self.synthetic: Dict[str, GenSpec] = dict(synthetic or {})

        self.system_name = "OrderflowMemory"
        self.version = "1.0.0"

        if validate:
            self._validate_config()

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        problems = []
        sections = {}
        for name, section_cls in _SECTIONS.items():
            values = dict(data.get(name) or {})
            for key in list(values):
                if (name, key) in _TUPLE_FIELDS and values[key] is not None:
                    values[key] = tuple(values[key])
            try:
                sections[name] = section_cls(**values)
            except TypeError as e:
                problems.append(f"section '{name}': {e}")

        synthetic = {}
        for ticker, spec in (data.get("synthetic") or {}).items():
            try:
                synthetic[ticker] = GenSpec.from_dict(spec)
            except (GeneratorError, TypeError, ValueError) as e:
                problems.append(f"synthetic '{ticker}': {e}")

        unknown = sorted(set(data) - set(_SECTIONS) - {"synthetic"})
        if unknown:
            problems.append(f"unknown sections: {', '.join(unknown)}")
        if problems:
            raise ConfigurationError(problems)
        return cls(sections, synthetic)

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as handle:
                data = json.load(handle)
        except OSError as e:
            raise ConfigurationError([f"cannot read config file {path}: {e.strerror or e}"])
        except json.JSONDecodeError as e:
            raise ConfigurationError([f"config file {path} is not valid JSON: {e}"])
        if not isinstance(data, dict):
            raise ConfigurationError([f"config file {path} must hold a JSON object"])
        return cls.from_dict(data)

    def _validate_config(self, check_paths: bool = False):
        """Validate configuration settings, reporting every problem at once"""
        validation_errors = []

        start, end = self.ingest.date_range
        if start and end and start > end:
            validation_errors.append(f"date_range start {start} is after end {end}")
        if self.ingest.depth < 1:
            validation_errors.append("depth must be at least 1")
        if self.ingest.ingest_jobs < 1:
            validation_errors.append("ingest_jobs must be at least 1")
        if check_paths and self.ingest.tickers and not Path(self.ingest.data_root).is_dir():
            validation_errors.append(f"data_root {self.ingest.data_root} is not a directory")

        overlap = sorted(set(self.ingest.tickers) & set(self.synthetic))
        if overlap:
            validation_errors.append(f"tickers both empirical and synthetic: {', '.join(overlap)}")

        if not self.transform.bound > 0:
            validation_errors.append("bound must be positive")
        if not -0.5 < self.transform.d < 0.5:
            validation_errors.append("d must lie in (-0.5, 0.5)")
        if self.transform.truncation < 1:
            validation_errors.append("truncation must be at least 1")

        if not 0 < self.estimators.msd_max_lag_fraction < 1:
            validation_errors.append("msd_max_lag_fraction must lie in (0, 1)")
        if not 0 < self.estimators.tail_fraction <= 1:
            validation_errors.append("tail_fraction must lie in (0, 1]")
        if self.estimators.tail_bins_per_decade < 1:
            validation_errors.append("tail_bins_per_decade must be at least 1")
        if self.estimators.autocov_max_lag < 0:
            validation_errors.append("autocov_max_lag must not be negative")
        fit_range = self.estimators.msd_fit_range
        if fit_range is not None and not 0 < fit_range[0] < fit_range[1]:
            validation_errors.append("msd_fit_range must be an increasing positive pair")

        if not 0 < self.bursts.fit_range[0] < self.bursts.fit_range[1]:
            validation_errors.append("burst fit_range must be an increasing positive pair")
        if any(m < 0 for m in self.bursts.threshold_multipliers):
            validation_errors.append("threshold multipliers must not be negative")
        for name in ("durations", "sweep_durations"):
            if getattr(self.bursts, name) not in _DURATION_CHOICES:
                validation_errors.append(f"bursts.{name} must be one of {', '.join(_DURATION_CHOICES)}")
        if self.bursts.bins_per_decade < 1:
            validation_errors.append("burst bins_per_decade must be at least 1")

        if self.output.jobs < 1:
            validation_errors.append("jobs must be at least 1")
        if not (1 <= self.web.port <= 65535):
            validation_errors.append("Web interface port must be between 1 and 65535")

        if validation_errors:
            raise ConfigurationError(validation_errors)

    def validate_paths(self):
        """Full validation including filesystem checks made at run start"""
        self._validate_config(check_paths=True)

    @property
    def all_tickers(self) -> List[str]:
        return list(self.ingest.tickers) + sorted(self.synthetic)

    def to_dict(self) -> Dict[str, Any]:
        """Complete, JSON-ready configuration; embedded verbatim in every output"""
        data = {name: asdict(getattr(self, attr)) for name, attr in
                (("ingest", "ingest"), ("transform", "transform"), ("estimators", "estimators"),
                 ("bursts", "bursts"), ("output", "output"), ("logging", "logging"), ("web", "web"))}
        for section, key in _TUPLE_FIELDS:
            value = data[section][key]
            if value is not None:
                data[section][key] = list(value)
        data["synthetic"] = {ticker: spec.to_dict() for ticker, spec in sorted(self.synthetic.items())}
        return data

    def provenance(self) -> Dict[str, Any]:
        """Config section embedded in artifacts; host-local settings are left out"""
        data = self.to_dict()
        for volatile in ("logging", "web"):
            data.pop(volatile)
        data["output"].pop("output_dir")
        data["output"].pop("jobs")
        return {"system": self.system_name, "version": self.version, "seed": self.transform.seed,
                "config": data}

    def update_from_env(self):
        """Update configuration from environment variables"""
        if os.getenv("ORDERFLOW_DATA_ROOT"):
            self.ingest.data_root = os.getenv("ORDERFLOW_DATA_ROOT")

        if os.getenv("ORDERFLOW_OUTPUT_DIR"):
            self.output.output_dir = os.getenv("ORDERFLOW_OUTPUT_DIR")

        if os.getenv("ORDERFLOW_SEED"):
            try:
                self.transform.seed = int(os.getenv("ORDERFLOW_SEED"))
            except ValueError:
                raise ConfigurationError([f"ORDERFLOW_SEED must be an integer, got {os.getenv('ORDERFLOW_SEED')}"])

        if os.getenv("ORDERFLOW_JOBS"):
            try:
                self.output.jobs = int(os.getenv("ORDERFLOW_JOBS"))
            except ValueError:
                raise ConfigurationError([f"ORDERFLOW_JOBS must be an integer, got {os.getenv('ORDERFLOW_JOBS')}"])

        if os.getenv("ORDERFLOW_TICKERS"):
            tickers = os.getenv("ORDERFLOW_TICKERS").split(",")
            self.ingest.tickers = [ticker.strip() for ticker in tickers if ticker.strip()]

        # Re-validate after updates
        self._validate_config()
        return self


# Global configuration instance
_config_instance = None


def get_config() -> RunConfig:
    """Get the global configuration instance"""
    global _config_instance
    if _config_instance is None:
        _config_instance = RunConfig().update_from_env()
    return _config_instance


def set_config(config: RunConfig) -> RunConfig:
    """Install an explicitly loaded configuration as the global instance"""
    global _config_instance
    _config_instance = config
    return _config_instance


def reload_config(path: Optional[str] = None) -> RunConfig:
    """Reload configuration from a file (when given) and the environment"""
    global _config_instance
    config = RunConfig.from_file(path) if path else RunConfig()
    _config_instance = config.update_from_env()
    return _config_instance
