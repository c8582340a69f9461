"""Duration distributions: sampling, moment-matched construction, densities.

All durations are nonnegative seconds. The family set is fixed; each family
stores its own natural parameters:

    fixed(value)            degenerate point mass
    uniform(low, high)      low <= high, low >= 0 for durations
    normal(mean, std)       sampled with redraw-then-clamp truncation at 0
    exponential(mean)       mean > 0
    lognormal(mu, sigma)    parameters of the underlying normal
    gamma(shape, scale)     shape > 0, scale > 0
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random

FAMILIES = ("fixed", "uniform", "normal", "exponential", "lognormal", "gamma")

_ARITY = {
    "fixed": 1,
    "uniform": 2,
    "normal": 2,
    "exponential": 1,
    "lognormal": 2,
    "gamma": 2,
}

# Redraws before giving up and clamping a negative normal draw to zero.
_MAX_REDRAWS = 100


class DistributionError(ValueError):
    """Invalid family or parameterization."""


@dataclass(frozen=True)
class DistributionSpec:
    family: str
    params: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.family not in _ARITY:
            raise DistributionError(f"unknown distribution family: {self.family!r}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(self.params) != _ARITY[self.family]:
            raise DistributionError(
                f"{self.family} takes {_ARITY[self.family]} parameter(s), got {len(self.params)}"
            )
        p = self.params
        if self.family == "fixed" and p[0] < 0:
            raise DistributionError("fixed duration must be nonnegative")
        if self.family == "uniform" and not (0 <= p[0] <= p[1]):
            raise DistributionError(f"uniform bounds must satisfy 0 <= low <= high, got {p}")
        if self.family == "normal" and p[1] < 0:
            raise DistributionError("normal std must be nonnegative")
        if self.family == "exponential" and p[0] <= 0:
            raise DistributionError("exponential mean must be positive")
        if self.family == "lognormal" and p[1] < 0:
            raise DistributionError("lognormal sigma must be nonnegative")
        if self.family == "gamma" and (p[0] <= 0 or p[1] <= 0):
            raise DistributionError("gamma shape and scale must be positive")

    # -- sampling ---------------------------------------------------------------

    def sample(self, rng: Random) -> float:
        """One nonnegative draw; advances the rng deterministically."""
        f, p = self.family, self.params
        if f == "fixed":
            return p[0]
        if f == "uniform":
            return rng.uniform(p[0], p[1])
        if f == "exponential":
            return rng.expovariate(1.0 / p[0])
        if f == "lognormal":
            return rng.lognormvariate(p[0], p[1])
        if f == "gamma":
            return rng.gammavariate(p[0], p[1])
        # normal: redraw negatives, clamp as a last resort
        for _ in range(_MAX_REDRAWS):
            x = rng.normalvariate(p[0], p[1])
            if x >= 0:
                return x
        return 0.0

    def mean(self) -> float:
        f, p = self.family, self.params
        if f == "fixed":
            return p[0]
        if f == "uniform":
            return (p[0] + p[1]) / 2
        if f == "normal":
            return p[0]
        if f == "exponential":
            return p[0]
        if f == "lognormal":
            return math.exp(p[0] + p[1] ** 2 / 2)
        return p[0] * p[1]  # gamma

    # -- density, for curve-fit residual comparison ------------------------------

    def pdf(self, x: float) -> float:
        f, p = self.family, self.params
        if f == "uniform":
            low, high = p
            if high == low:
                return 0.0
            return 1.0 / (high - low) if low <= x <= high else 0.0
        if f == "normal":
            mu, sigma = p
            if sigma == 0:
                return 0.0
            z = (x - mu) / sigma
            return math.exp(-0.5 * z * z) / (sigma * math.sqrt(2 * math.pi))
        if f == "exponential":
            mean = p[0]
            return math.exp(-x / mean) / mean if x >= 0 else 0.0
        if f == "lognormal":
            mu, sigma = p
            if x <= 0 or sigma == 0:
                return 0.0
            z = (math.log(x) - mu) / sigma
            return math.exp(-0.5 * z * z) / (x * sigma * math.sqrt(2 * math.pi))
        if f == "gamma":
            shape, scale = p
            if x <= 0:
                return 0.0
            logpdf = (
                (shape - 1) * math.log(x)
                - x / scale
                - math.lgamma(shape)
                - shape * math.log(scale)
            )
            return math.exp(logpdf)
        raise DistributionError(f"{f} has no density")

    @classmethod
    def from_moments(cls, family: str, mean: float, var: float) -> "DistributionSpec | None":
        """Moment-matched spec, or None when the family cannot hit the moments."""
        if family == "fixed":
            return cls("fixed", (max(mean, 0.0),)) if var == 0 else None
        if var <= 0:
            return None
        if family == "uniform":
            half = math.sqrt(3 * var)
            return cls("uniform", (max(0.0, mean - half), mean + half))
        if family == "normal":
            return cls("normal", (mean, math.sqrt(var)))
        if family == "exponential":
            return cls("exponential", (mean,)) if mean > 0 else None
        if family == "lognormal":
            if mean <= 0:
                return None
            sigma2 = math.log(1 + var / mean**2)
            mu = math.log(mean) - sigma2 / 2
            return cls("lognormal", (mu, math.sqrt(sigma2)))
        if family == "gamma":
            if mean <= 0:
                return None
            return cls("gamma", (mean**2 / var, var / mean))
        raise DistributionError(f"unknown distribution family: {family!r}")

    # -- serialization ------------------------------------------------------------

    def to_json(self) -> dict:
        return {"family": self.family, "params": list(self.params)}

    @classmethod
    def from_json(cls, obj: dict) -> "DistributionSpec":
        return cls(obj["family"], tuple(obj["params"]))


def sample(dist: DistributionSpec, rng: Random) -> float:
    """Draw one duration; pure function of (dist, rng state)."""
    return dist.sample(rng)
