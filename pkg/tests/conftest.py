import numpy as np
import pytest

from combosearch import Dimension, SearchSpace, TableOracle
from combosearch.data import bundled_dataset_path


@pytest.fixture(scope="session")
def bundled_path():
    return bundled_dataset_path()


@pytest.fixture(scope="session")
def oracle513(bundled_path):
    return TableOracle.from_csv(bundled_path, 513)


@pytest.fixture(scope="session")
def oracle284(bundled_path):
    return TableOracle.from_csv(bundled_path, 284)


@pytest.fixture
def space222():
    return SearchSpace(
        (
            Dimension("a", ("a0", "a1")),
            Dimension("b", ("b0", "b1")),
            Dimension("c", ("c0", "c1")),
        )
    )


def random_space(rng: np.random.Generator, ndim: int, max_size: int = 5) -> SearchSpace:
    sizes = rng.integers(1, max_size + 1, size=ndim)
    if (sizes == 1).all():
        sizes[rng.integers(ndim)] = 2
    dims = tuple(
        Dimension(f"d{i}", tuple(f"d{i}v{j}" for j in range(int(s))))
        for i, s in enumerate(sizes)
    )
    return SearchSpace(dims)
