import numpy as np
import pytest

from neurochan import Plant


@pytest.fixture
def three_channel_plant() -> Plant:
    """Two-state drift with a shift block and three input channels."""
    return Plant(A=[[0.0, 1.0], [0.0, 0.0]], B=[[0.0, 1.0, 1.0], [1.0, 0.0, 1.0]])


@pytest.fixture
def resilient_lift() -> np.ndarray:
    """A lift of the shift drift supported on channel 2 only."""
    return np.array([[0.0, 0.0], [0.0, 1.0], [0.0, 0.0]])


def random_plant(rng, n: int, m: int, sv_floor: float = 0.3) -> Plant:
    """A well-conditioned random plant with all n x n minors of B nonzero."""
    while True:
        B = rng.uniform(-1.0, 1.0, (n, m))
        s = np.linalg.svd(B, compute_uv=False)
        if s[-1] < sv_floor:
            continue
        plant = Plant(A=rng.uniform(-1.0, 1.0, (n, n)), B=B)
        if plant.minors_nonzero:
            return plant


def sorted_eigs(M) -> np.ndarray:
    return np.sort_complex(np.linalg.eigvals(np.asarray(M, dtype=float)))
