import numpy as np
import pytest


def random_spd(rng: np.random.Generator, p: int, scale: float = 1.0) -> np.ndarray:
    """A well-conditioned random symmetric positive definite matrix."""
    a = rng.standard_normal((p, p))
    return scale * (a @ a.T / p + np.eye(p))


def random_grouped(rng: np.random.Generator, counts, p: int, spread: float = 2.0):
    """Random dataset with one shifted cluster per group."""
    from rlda.datamodel import GroupedDataset

    blocks, labels = [], []
    for g, n_g in enumerate(counts):
        center = spread * rng.standard_normal(p)
        blocks.append(center + rng.standard_normal((n_g, p)))
        labels.extend([g] * n_g)
    names = tuple(f"g{g + 1}" for g in range(len(counts)))
    return GroupedDataset(np.vstack(blocks), np.array(labels), names)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
