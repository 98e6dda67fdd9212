"""Lifting the drift into input-coefficient space.

Because B is wide with full row rank, the matrix equation B X = A has an
n(m-n)-parameter affine family of solutions X ("lifts" of A).  A lift whose
rows vanish outside a channel set I survives the projection onto I unchanged,
which is what makes dropout-proof set-point offsets possible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .channels import ChannelSet
from .errors import DimensionError, DomainError, InfeasibleError, RankError
from .plant import Plant

LIFT_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LiftFamily:
    """Affine family of solutions X of B X = A: one particular solution plus a
    basis of the nullspace of X -> B X."""

    particular: np.ndarray
    basis: list[np.ndarray]
    dim: int

    def element(self, coefficients) -> np.ndarray:
        coefficients = np.asarray(coefficients, dtype=float).reshape(-1)
        if coefficients.size != self.dim:
            raise DimensionError(f"expected {self.dim} coefficients, got {coefficients.size}")
        out = self.particular.copy()
        for c, E in zip(coefficients, self.basis):
            out += c * E
        return out

    def to_json_dict(self) -> dict:
        return {
            "particular": self.particular.tolist(),
            "basis": [E.tolist() for E in self.basis],
            "dim": self.dim,
        }


def lift_particular(plant: Plant) -> np.ndarray:
    """The minimum-norm lift B^T (B B^T)^{-1} A."""
    G = plant.bbt
    try:
        X = np.linalg.solve(G, plant.A)
    except np.linalg.LinAlgError as exc:  # unreachable for a valid Plant
        raise RankError("B B^T is singular") from exc
    Ahat = plant.B.T @ X
    residual = np.linalg.norm(plant.B @ Ahat - plant.A)
    if residual >= LIFT_RESIDUAL_TOL:
        raise RankError(f"lift residual {residual:.3e} exceeds {LIFT_RESIDUAL_TOL:.0e}")
    return Ahat


def lift_nullspace_basis(plant: Plant) -> LiftFamily:
    """Basis of the solution family of B X = A.

    Each basis element places one nullspace vector of B into one column; the
    n(m-n) single-column matrices so produced are linearly independent and are
    annihilated by X -> B X.
    """
    kernel = numerics.nullspace(plant.B)
    basis = []
    for vec in kernel:
        for col in range(plant.n):
            E = np.zeros((plant.m, plant.n))
            E[:, col] = vec
            basis.append(E)
    return LiftFamily(
        particular=lift_particular(plant), basis=basis, dim=plant.n * (plant.m - plant.n)
    )


def lift_invariant(plant: Plant, channels: ChannelSet) -> np.ndarray:
    """The lift supported on ``channels`` only: rows outside the set are zero.

    Requires the surviving columns of B to span the state space on their own
    (rank(B P) = n); the supported rows are then the minimum-norm solution over
    those columns.
    """
    if channels.m != plant.m:
        raise DimensionError(f"channel set is over m={channels.m}, plant has m={plant.m}")
    cols = channels.positions()
    B_I = plant.B[:, cols]
    s = np.linalg.svd(B_I, compute_uv=False) if cols else np.zeros(0)
    if s.size < plant.n or s.min() <= numerics.SINGULARITY_RTOL * (s.max() if s.size else 0.0):
        raise InfeasibleError(
            f"channels {channels.label()} do not span the state space: "
            f"no lift supported on them exists under the rank-n contract"
        )
    rows = B_I.T @ np.linalg.solve(B_I @ B_I.T, plant.A)
    Ahat = np.zeros((plant.m, plant.n))
    Ahat[cols, :] = rows
    return Ahat


def invariant_family_dim(plant: Plant, k: int) -> int:
    """Dimension n(m-n-k) of the lift family once k channels must carry zero rows."""
    if not (0 <= k <= plant.m - plant.n):
        raise DomainError(f"dropped-channel count k={k} outside 0..{plant.m - plant.n}")
    return plant.n * (plant.m - plant.n - k)
