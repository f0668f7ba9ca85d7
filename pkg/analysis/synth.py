"""
Synthetic generators
Gaussian, symmetric alpha-stable and symmetric Pareto noise, accumulated into
ARFIMA(0,d,0) sample paths that act as oracles for the estimators
"""

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict

import numpy as np

from analysis.errors import GeneratorError
from analysis.series import Series, SeriesKind, SeriesMeta
from analysis.transforms import DEFAULT_TRUNCATION, RNG_NAME, accumulate, fractional_revert


class NoiseKind(Enum):
    GAUSSIAN = "gaussian"
    STABLE = "stable"
    PARETO_SYMMETRIC = "pareto_symmetric"


@dataclass(frozen=True)
class NoiseSpec:
    """Marginal law of the innovations; unused parameters are ignored"""
    kind: NoiseKind = NoiseKind.GAUSSIAN
    sigma: float = 1.0
    alpha: float = 2.0
    scale: float = 1.0
    nu: float = 3.0
    x_min: float = 1.0

    def describe(self) -> str:
        if self.kind is NoiseKind.GAUSSIAN:
            return f"gaussian(sigma={self.sigma})"
        if self.kind is NoiseKind.STABLE:
            return f"stable(alpha={self.alpha}, scale={self.scale})"
        return f"pareto_symmetric(nu={self.nu}, x_min={self.x_min})"


@dataclass(frozen=True)
class GenSpec:
    """What to generate: noise law, memory d, length and seed"""
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    d: float = 0.0
    length: int = 2 ** 17
    seed: int = 0
    truncation: int = DEFAULT_TRUNCATION

    def __post_init__(self):
        problems = []
        noise = self.noise
        if noise.kind is NoiseKind.GAUSSIAN and not noise.sigma > 0:
            problems.append(f"sigma must be positive, got {noise.sigma}")
        if noise.kind is NoiseKind.STABLE:
            if not 0 < noise.alpha <= 2:
                problems.append(f"alpha must lie in (0, 2], got {noise.alpha}")
            if not noise.scale > 0:
                problems.append(f"scale must be positive, got {noise.scale}")
        if noise.kind is NoiseKind.PARETO_SYMMETRIC:
            if not noise.nu > 1:
                problems.append(f"nu must exceed 1, got {noise.nu}")
            if not noise.x_min > 0:
                problems.append(f"x_min must be positive, got {noise.x_min}")
        if not -0.5 < self.d < 0.5:
            problems.append(f"d must lie in (-0.5, 0.5), got {self.d}")
        if self.length < 1:
            problems.append(f"length must be positive, got {self.length}")
        if self.truncation < 1:
            problems.append(f"truncation must be positive, got {self.truncation}")
        if problems:
            raise GeneratorError("; ".join(problems))

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["noise"]["kind"] = self.noise.kind.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GenSpec":
        noise_data = dict(data.get("noise", {}))
        noise_data["kind"] = NoiseKind(noise_data.get("kind", NoiseKind.GAUSSIAN.value))
        try:
            noise = NoiseSpec(**noise_data)
        except TypeError as e:
            raise GeneratorError(f"bad noise specification: {e}")
        fields = {k: data[k] for k in ("d", "length", "seed", "truncation") if k in data}
        return cls(noise=noise, **fields)


def symmetric_stable(rng: np.random.Generator, alpha: float, size: int, scale: float = 1.0) -> np.ndarray:
    """Chambers-Mallows-Stuck transform for the symmetric (beta = 0) case"""
    v = rng.uniform(-np.pi / 2, np.pi / 2, size)
    w = rng.exponential(1.0, size)
    if alpha == 1:
        return scale * np.tan(v)
    x = (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)) * (np.cos(v - alpha * v) / w) ** ((1.0 - alpha) / alpha)
    return scale * x


def symmetric_pareto(rng: np.random.Generator, nu: float, size: int, x_min: float = 1.0) -> np.ndarray:
    """Pareto magnitude with density exponent nu, times a fair random sign"""
    magnitude = x_min * rng.uniform(0.0, 1.0, size) ** (-1.0 / (nu - 1.0))
    sign = rng.choice(np.array([-1.0, 1.0]), size)
    return sign * magnitude


def gen_noise(spec: GenSpec) -> Series:
    """N i.i.d. innovations, deterministic for the GenSpec seed"""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    noise = spec.noise
    if noise.kind is NoiseKind.GAUSSIAN:
        values = rng.normal(0.0, noise.sigma, spec.length)
    elif noise.kind is NoiseKind.STABLE:
        values = symmetric_stable(rng, noise.alpha, spec.length, noise.scale)
    else:
        values = symmetric_pareto(rng, noise.nu, spec.length, noise.x_min)
    meta = SeriesMeta(
        ticker="SYNTH",
        source=f"synthetic noise {noise.describe()}",
        extra={"rng": RNG_NAME, "seed": int(spec.seed)},
    )
    return Series(values, SeriesKind.SYNTHETIC, meta, True)


def gen_arfima_increments(spec: GenSpec) -> Series:
    """Fractional sum of the noise: ARFIMA(0,d,0) increments"""
    return fractional_revert(gen_noise(spec), spec.d, spec.truncation)


def gen_arfima(spec: GenSpec) -> Series:
    """Accumulated ARFIMA(0,d,0): a discrete FLSM-like path"""
    return accumulate(gen_arfima_increments(spec), 0.0)
