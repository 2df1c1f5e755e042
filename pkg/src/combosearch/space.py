"""Categorical search spaces and mixed-radix combination indexing.

A search space is an ordered list of named dimensions, each holding an
ordered list of value labels. A candidate is one value per dimension; the
full candidate set is the Cartesian product. Candidates map bijectively
to flat integer indices via mixed-radix encoding (row-major in dimension
order, i.e. the last dimension varies fastest).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

# Flat indices are carried in int64 arrays; leave generous headroom.
MAX_COMBINATIONS = 2**62


class SpaceError(ValueError):
    """Invalid search-space definition."""


@dataclass(frozen=True)
class Dimension:
    name: str
    values: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.name:
            raise SpaceError("dimension name must be non-empty")
        if len(self.values) < 1:
            raise SpaceError(f"dimension {self.name!r} has no values")
        if len(set(self.values)) != len(self.values):
            raise SpaceError(f"dimension {self.name!r} has duplicate value labels")

    @property
    def size(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Combination:
    """One value index per dimension, in dimension order."""

    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class SearchSpace:
    dimensions: tuple[Dimension, ...]

    def __post_init__(self):
        object.__setattr__(self, "dimensions", tuple(self.dimensions))
        if len(self.dimensions) < 2:
            raise SpaceError("a search space needs at least 2 dimensions")
        names = [d.name for d in self.dimensions]
        if len(set(names)) != len(names):
            raise SpaceError(f"duplicate dimension names: {names}")
        if math.prod(d.size for d in self.dimensions) > MAX_COMBINATIONS:
            raise SpaceError("combination count overflows index arithmetic")

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(d.size for d in self.dimensions)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dimensions)

    @property
    def total(self) -> int:
        return math.prod(self.sizes)

    @property
    def ndim(self) -> int:
        return len(self.dimensions)

    @cached_property
    def radices(self) -> np.ndarray:
        return np.array(self.sizes, dtype=np.int64)

    @cached_property
    def digits_matrix(self) -> np.ndarray:
        """(total, ndim) int64 matrix: row f holds the decoded indices of flat f."""
        out = np.empty((self.total, self.ndim), dtype=np.int64)
        rem = np.arange(self.total, dtype=np.int64)
        for j in range(self.ndim - 1, -1, -1):
            out[:, j] = rem % self.sizes[j]
            rem //= self.sizes[j]
        return out

    def flat_index(self, comb: Combination) -> int:
        if len(comb) != self.ndim:
            raise SpaceError(
                f"combination has {len(comb)} indices, space has {self.ndim} dimensions"
            )
        flat = 0
        for dim, idx in zip(self.dimensions, comb.indices):
            if not 0 <= idx < dim.size:
                raise SpaceError(f"index {idx} out of range for dimension {dim.name!r}")
            flat = flat * dim.size + idx
        return flat

    def combination_at(self, flat: int) -> Combination:
        if not 0 <= flat < self.total:
            raise SpaceError(f"flat index {flat} out of range [0, {self.total})")
        indices = [0] * self.ndim
        rem = int(flat)
        for j in range(self.ndim - 1, -1, -1):
            rem, indices[j] = divmod(rem, self.sizes[j])
        return Combination(tuple(indices))

    def labels(self, comb: Combination) -> tuple[str, ...]:
        if len(comb) != self.ndim:
            raise SpaceError("combination does not belong to this space")
        return tuple(
            dim.values[idx] for dim, idx in zip(self.dimensions, comb.indices)
        )

    def combination_from_labels(self, labels) -> Combination:
        """Build a combination from value labels, given in dimension order."""
        labels = tuple(labels)
        if len(labels) != self.ndim:
            raise SpaceError(
                f"expected {self.ndim} labels, got {len(labels)}"
            )
        indices = []
        for dim, label in zip(self.dimensions, labels):
            try:
                indices.append(dim.values.index(label))
            except ValueError:
                raise SpaceError(
                    f"label {label!r} not in dimension {dim.name!r}"
                ) from None
        return Combination(tuple(indices))

    def to_dict(self) -> dict:
        return {
            "dimensions": [
                {"name": d.name, "values": list(d.values)} for d in self.dimensions
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SearchSpace":
        try:
            dims = tuple(
                Dimension(name=d["name"], values=tuple(d["values"]))
                for d in data["dimensions"]
            )
        except (KeyError, TypeError) as exc:
            raise SpaceError(f"malformed space definition: {exc}") from exc
        return cls(dims)


def load_space(path) -> SearchSpace:
    """Read a space definition from a JSON file."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpaceError(f"{path}: invalid JSON ({exc})") from exc
    return SearchSpace.from_dict(data)


def save_space(path, space: SearchSpace) -> None:
    Path(path).write_text(
        json.dumps(space.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
