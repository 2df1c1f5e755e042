"""Deterministic synthetic landscapes for exercising the search.

A landscape assigns every combination a closed-form quality score: a base
level, multiplied by the bonus of every planted pair the combination
contains, times optional log-normal noise. Pairs may also carry a failure
probability, so whole regions of the space can be made to fail. The score
splits into (accuracy, time) as accuracy = m * time_unit at a fixed
time_unit, so the search's own scoring recovers m exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..space import Combination, Dimension, SearchSpace
from .base import Evaluation


class LandscapeError(ValueError):
    """A planted pair references an unknown dimension or value."""


@dataclass(frozen=True)
class PlantedPair:
    """Effect attached to all combinations holding `values` on `dims`."""

    dims: tuple[str, str]
    values: tuple[str, str]
    bonus: float = 1.0
    failure_probability: float = 0.0

    def __post_init__(self):
        if len(self.dims) != 2 or self.dims[0] == self.dims[1]:
            raise LandscapeError(f"a planted pair needs two distinct dimensions, got {self.dims}")
        if self.bonus <= 0:
            raise LandscapeError(f"pair bonus must be > 0, got {self.bonus}")
        if not 0 <= self.failure_probability <= 1:
            raise LandscapeError(
                f"failure_probability must be in [0, 1], got {self.failure_probability}"
            )


@dataclass(frozen=True)
class LandscapeSpec:
    space: SearchSpace
    base_m: float = 1.0
    noise: float = 0.0
    pairs: tuple[PlantedPair, ...] = ()
    time_unit: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        if self.base_m <= 0:
            raise LandscapeError(f"base_m must be > 0, got {self.base_m}")
        if self.noise < 0:
            raise LandscapeError(f"noise must be >= 0, got {self.noise}")
        if self.time_unit <= 0:
            raise LandscapeError(f"time_unit must be > 0, got {self.time_unit}")
        names = self.space.names
        for pair in self.pairs:
            for dim_name, value in zip(pair.dims, pair.values):
                if dim_name not in names:
                    raise LandscapeError(f"planted pair references unknown dimension {dim_name!r}")
                dim = self.space.dimensions[names.index(dim_name)]
                if value not in dim.values:
                    raise LandscapeError(
                        f"planted pair references unknown value {value!r} "
                        f"in dimension {dim_name!r}"
                    )

    @classmethod
    def from_sizes(cls, sizes, **kwargs) -> "LandscapeSpec":
        """Auto-named space: dimension d{i} with values d{i}v{j}."""
        dims = tuple(
            Dimension(f"d{i}", tuple(f"d{i}v{j}" for j in range(size)))
            for i, size in enumerate(sizes)
        )
        return cls(space=SearchSpace(dims), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "LandscapeSpec":
        data = dict(data)
        if "sizes" in data:
            sizes = data.pop("sizes")
            space = SearchSpace(
                tuple(
                    Dimension(f"d{i}", tuple(f"d{i}v{j}" for j in range(size)))
                    for i, size in enumerate(sizes)
                )
            )
        else:
            space = SearchSpace.from_dict(data.pop("space"))
        pairs = tuple(
            PlantedPair(
                dims=tuple(p["dims"]),
                values=tuple(p["values"]),
                bonus=p.get("bonus", 1.0),
                failure_probability=p.get("failure_probability", 0.0),
            )
            for p in data.pop("pairs", [])
        )
        return cls(space=space, pairs=pairs, **data)


class SyntheticEvaluator:
    """Pure function of (spec, seed, combination)."""

    def __init__(self, spec: LandscapeSpec, seed: int):
        self.spec = spec
        self.space = spec.space
        self.seed = seed
        rng = np.random.default_rng(seed)
        total = self.space.total
        # Draw both arrays unconditionally so the terrain for a given seed
        # does not depend on which knobs are enabled.
        noise_z = rng.standard_normal(total)
        self._failure_draws = rng.random(total)
        if spec.noise > 0:
            self._noise_mult = np.exp(spec.noise * noise_z)
        else:
            self._noise_mult = np.ones(total)
        names = self.space.names
        self._pair_coords = []
        for pair in spec.pairs:
            coords = []
            for dim_name, value in zip(pair.dims, pair.values):
                d = names.index(dim_name)
                coords.append((d, self.space.dimensions[d].values.index(value)))
            self._pair_coords.append((pair, coords))

    def _pairs_containing(self, comb: Combination):
        for pair, coords in self._pair_coords:
            if all(comb.indices[d] == v for d, v in coords):
                yield pair

    def m_of(self, comb: Combination) -> float:
        """Closed-form score of a combination, before the accuracy clamp."""
        m = self.spec.base_m
        for pair in self._pairs_containing(comb):
            m *= pair.bonus
        return m * float(self._noise_mult[self.space.flat_index(comb)])

    def failure_probability_of(self, comb: Combination) -> float:
        keep = 1.0
        for pair in self._pairs_containing(comb):
            keep *= 1.0 - pair.failure_probability
        return 1.0 - keep

    def evaluate(self, comb: Combination) -> Evaluation:
        flat = self.space.flat_index(comb)
        p_fail = self.failure_probability_of(comb)
        if p_fail > 0 and self._failure_draws[flat] < p_fail:
            return Evaluation.failure("incompatible", detail="planted failure")
        accuracy = min(1.0, self.m_of(comb) * self.spec.time_unit)
        return Evaluation.success(accuracy, self.spec.time_unit)


def synthetic_landscape(spec: LandscapeSpec, seed: int) -> SyntheticEvaluator:
    return SyntheticEvaluator(spec, seed)
