"""The controlled system: a drift matrix A and a wide input matrix B."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from . import numerics
from .errors import DimensionError, DomainError, RankError

# All n x n minors of B are checked only up to this many channels (the count
# of minors grows combinatorially).
MINOR_CHECK_MAX_CHANNELS = 10
MINOR_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Plant:
    """State evolution dx/dt = A x + B u with more input channels than states."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = numerics.as_square(self.A, "A")
        B = numerics.as_matrix(self.B, "B")
        n = A.shape[0]
        if B.shape[0] != n:
            raise DimensionError(f"B has {B.shape[0]} rows, expected {n}")
        if B.shape[1] <= n:
            raise DomainError(
                f"need more input channels than states, got m={B.shape[1]} with n={n}"
            )
        s = np.linalg.svd(B, compute_uv=False)
        if s[-1] <= numerics.SINGULARITY_RTOL * s[0]:
            raise RankError("B is rank deficient: its rows do not span the state space")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @cached_property
    def bbt(self) -> np.ndarray:
        return self.B @ self.B.T

    @cached_property
    def minors_nonzero(self) -> bool | None:
        """Whether every n x n minor of B is nonzero; None when unchecked (m too large)."""
        if self.m > MINOR_CHECK_MAX_CHANNELS:
            return None
        for cols in combinations(range(self.m), self.n):
            if abs(np.linalg.det(self.B[:, cols])) <= MINOR_TOL:
                return False
        return True


def system_matrices(system) -> tuple[np.ndarray, np.ndarray]:
    """Accept a Plant or a bare (A, B) pair and return validated matrices.

    The bare form admits square input matrices (m == n), which the Plant type
    itself rejects; classification over the dropout lattice is still well
    defined there.
    """
    if isinstance(system, Plant):
        return system.A, system.B
    A, B = system
    A = numerics.as_square(A, "A")
    B = numerics.as_matrix(B, "B")
    if B.shape[0] != A.shape[0]:
        raise DimensionError(f"B has {B.shape[0]} rows, expected {A.shape[0]}")
    return A, B
