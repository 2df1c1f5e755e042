"""The sampling-search state machine.

State: a probability vector with one entry per combination in the space,
permanent exclusion flags, and the history of observed scores that feeds
the adaptive threshold.

Per iteration: draw a combination from the vector, evaluate it, score it
as accuracy/time, and reweight every combination that shares a dimension
pair with the draw by (score / threshold), clamped. Entries falling below
the exclusion floor are zeroed for good; the rest renormalise to sum 1.
Failures apply a fixed penalty factor through the same pairwise mechanism.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .config import SearchConfig
from .space import Combination, SearchSpace, SpaceError

MASS_TOLERANCE = 1e-9


class SearchExhaustedError(RuntimeError):
    """Every combination has been excluded from sampling."""


class DegenerateDistributionWarning(RuntimeWarning):
    """An update would have excluded every remaining combination."""


@dataclass
class SamplingState:
    """Mutable state of one search run. Not safe for concurrent mutation."""

    space: SearchSpace
    u: np.ndarray                      # float64 mass per flat index, sums to 1
    excluded: np.ndarray               # bool per flat index, never unset
    observed_m: list[float] = field(default_factory=list)
    rng: np.random.Generator = None
    seed: int = 0
    degenerate: bool = False           # set once the exclusion guard fired

    @property
    def n_active(self) -> int:
        return int((~self.excluded).sum())

    def active_mass(self) -> float:
        return float(self.u[~self.excluded].sum())

    def probability(self, flat: int) -> float:
        return float(self.u[flat])

    def argmax_combination(self) -> Combination:
        """Highest-probability combination; ties break to the lowest flat index."""
        return self.space.combination_at(int(np.argmax(self.u)))

    def copy(self) -> "SamplingState":
        dup = SamplingState(
            space=self.space,
            u=self.u.copy(),
            excluded=self.excluded.copy(),
            observed_m=list(self.observed_m),
            rng=np.random.Generator(type(self.rng.bit_generator)()),
            seed=self.seed,
            degenerate=self.degenerate,
        )
        dup.rng.bit_generator.state = self.rng.bit_generator.state
        return dup


def init_state(space: SearchSpace, config: SearchConfig) -> SamplingState:
    """Uniform mass over every combination, nothing excluded, fresh RNG."""
    total = space.total
    return SamplingState(
        space=space,
        u=np.full(total, 1.0 / total, dtype=np.float64),
        excluded=np.zeros(total, dtype=bool),
        observed_m=[],
        rng=np.random.default_rng(config.seed),
        seed=config.seed,
    )


def sample(state: SamplingState) -> Combination:
    """Draw one combination with probability equal to its mass entry."""
    if state.excluded.all():
        raise SearchExhaustedError("all combinations are excluded")
    cum = np.cumsum(state.u)
    r = state.rng.random()
    flat = int(np.searchsorted(cum, r, side="right"))
    if flat >= state.space.total:
        # r landed beyond the last cumulative value (float rounding):
        # fall back to the last combination still in play.
        flat = int(np.flatnonzero(~state.excluded)[-1])
    return state.space.combination_at(flat)


def score(accuracy: float, time_s: float) -> float:
    """Quality measure: accuracy per second of inference. Higher is better."""
    if time_s <= 0:
        raise ValueError(f"time_s must be > 0, got {time_s} (evaluator bug)")
    if not 0 <= accuracy <= 1:
        raise ValueError(f"accuracy must be in [0, 1], got {accuracy}")
    return accuracy / time_s


def shared_pair_count(a: Combination, b: Combination) -> int:
    """Number of unordered dimension pairs on which a and b agree in both
    coordinates. Equal combinations share all C(ndim, 2) pairs."""
    if len(a) != len(b):
        raise SpaceError("combinations come from different spaces")
    agree = sum(x == y for x, y in zip(a.indices, b.indices))
    return agree * (agree - 1) // 2


def _resolve_alpha(state: SamplingState, config: SearchConfig) -> float:
    if config.alpha_mode == "fixed":
        return float(config.alpha_value)
    return float(np.median(state.observed_m))


def _apply_pairwise(
    state: SamplingState,
    sampled: Combination,
    factor: float,
    config: SearchConfig,
) -> None:
    """Scale sharers, apply the exclusion floor, renormalise. In place."""
    if factor == 1.0:
        return  # identity update: no evidence shift, masses untouched

    _kernels.apply_pair_update(
        state.u,
        state.space,
        sampled.indices,
        factor,
        once=(config.update_policy == "once"),
    )

    if config.exclusion_floor > 0:
        threshold = config.exclusion_floor / state.space.total
        active = ~state.excluded
        below = active & (state.u < threshold)
        if below.sum() == active.sum():
            # Everything left would die: keep the heaviest entry alive so the
            # search can still report a best-so-far.
            active_idx = np.flatnonzero(active)
            keep = active_idx[int(np.argmax(state.u[active_idx]))]
            below[keep] = False
            state.degenerate = True
            warnings.warn(
                "exclusion floor would remove every remaining combination; "
                f"keeping flat index {int(keep)} active",
                DegenerateDistributionWarning,
                stacklevel=3,
            )
        state.u[below] = 0.0
        state.excluded |= below

    total_mass = float(state.u.sum())
    if total_mass <= 0:
        raise SearchExhaustedError("probability mass vanished")
    if total_mass != 1.0:
        state.u /= total_mass


def pair_checker(
    state: SamplingState,
    sampled: Combination,
    m: float,
    config: SearchConfig,
) -> SamplingState:
    """Reweight all combinations sharing a dimension pair with `sampled`
    by clamp(m / threshold), then exclude and renormalise.

    Under the running-median threshold the very first observation is its
    own median, so the update is skipped (the factor would be 1).
    """
    if m < 0:
        raise ValueError(f"score must be >= 0, got {m}")
    first = not state.observed_m
    state.observed_m.append(float(m))
    if config.alpha_mode == "median" and first:
        return state
    alpha = _resolve_alpha(state, config)
    if alpha <= 0:
        # Every observed score is 0: no direction to move in.
        factor = 1.0 if m == 0 else config.clamp_max
    else:
        factor = min(max(m / alpha, config.clamp_min), config.clamp_max)
    _apply_pairwise(state, sampled, factor, config)
    return state


def record_failure(
    state: SamplingState,
    sampled: Combination,
    config: SearchConfig,
) -> SamplingState:
    """Penalise sharers of a failed combination by the fixed failure factor.

    Failures carry no score, so the threshold history is left untouched.
    """
    _apply_pairwise(state, sampled, config.failure_factor, config)
    return state
