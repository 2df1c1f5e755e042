"""Search configuration knobs and their validity ranges."""

from __future__ import annotations

from dataclasses import dataclass, replace


class ConfigError(ValueError):
    """A configuration field is outside its valid range."""


ALPHA_MODES = ("median", "fixed")
UPDATE_POLICIES = ("once", "per_pair")


@dataclass(frozen=True)
class SearchConfig:
    """Every knob of the sampling search.

    iterations      -- evaluation budget (each draw consumes one, cached or not)
    alpha_mode      -- "median": threshold is the running median of observed
                       scores; "fixed": threshold is alpha_value
    alpha_value     -- required threshold when alpha_mode == "fixed"
    update_policy   -- "once": any entry sharing >= 1 dimension pair with the
                       sampled combination is scaled by the factor once;
                       "per_pair": scaled by factor**(number of shared pairs)
    clamp_min/max   -- bounds applied to the score/threshold factor
    failure_factor  -- fixed penalty factor applied on evaluation failures
    exclusion_floor -- entries below exclusion_floor * uniform mass are
                       permanently excluded; 0 disables exclusion
    cache_evaluations -- reuse the first evaluation of a combination on redraws
    seed            -- RNG seed; equal seeds give identical runs
    """

    iterations: int = 60
    alpha_mode: str = "median"
    alpha_value: float | None = None
    update_policy: str = "per_pair"
    clamp_min: float = 0.1
    clamp_max: float = 10.0
    failure_factor: float = 0.4
    exclusion_floor: float = 0.05
    cache_evaluations: bool = True
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.iterations, int) or self.iterations < 1:
            raise ConfigError(f"iterations must be an integer >= 1, got {self.iterations}")
        if self.alpha_mode not in ALPHA_MODES:
            raise ConfigError(f"alpha_mode must be one of {ALPHA_MODES}, got {self.alpha_mode!r}")
        if self.alpha_mode == "fixed":
            if self.alpha_value is None or not self.alpha_value > 0:
                raise ConfigError("alpha_value must be > 0 when alpha_mode is 'fixed'")
        if self.update_policy not in UPDATE_POLICIES:
            raise ConfigError(
                f"update_policy must be one of {UPDATE_POLICIES}, got {self.update_policy!r}"
            )
        if not (0 < self.clamp_min <= 1 <= self.clamp_max):
            raise ConfigError(
                f"clamp bounds must satisfy 0 < clamp_min <= 1 <= clamp_max, "
                f"got [{self.clamp_min}, {self.clamp_max}]"
            )
        # 1.0 is allowed as the degenerate "no penalty" setting.
        if not 0 < self.failure_factor <= 1:
            raise ConfigError(f"failure_factor must be in (0, 1], got {self.failure_factor}")
        if not 0 <= self.exclusion_floor < 1:
            raise ConfigError(f"exclusion_floor must be in [0, 1), got {self.exclusion_floor}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed}")

    def with_iterations(self, iterations: int) -> "SearchConfig":
        return replace(self, iterations=iterations)

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "alpha_mode": self.alpha_mode,
            "alpha_value": self.alpha_value,
            "update_policy": self.update_policy,
            "clamp_min": self.clamp_min,
            "clamp_max": self.clamp_max,
            "failure_factor": self.failure_factor,
            "exclusion_floor": self.exclusion_floor,
            "cache_evaluations": self.cache_evaluations,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SearchConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)
