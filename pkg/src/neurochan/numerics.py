"""Small dense-matrix kernels: exponentials, spectra, Gramians, rank.

Everything here is desk scale (state dimension up to roughly a dozen) and
delegates the heavy lifting to LAPACK through numpy/scipy.  Rank and
singularity decisions share a single relative singular-value cutoff so that
every caller agrees on what "nonsingular" means.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .channels import ChannelSet
from .errors import DimensionError, DomainError

# Margins strictly below this count as Hurwitz ("open left half plane" needs
# a numeric boundary).
HURWITZ_TOL = -1e-9

# Relative singular-value cutoff for rank and nonsingularity decisions.
SINGULARITY_RTOL = 1e-9


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(M, dtype=float)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    return arr


def as_square(M, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(M, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


def as_vector(v, size: int | None = None, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    if size is not None and arr.size != size:
        raise DimensionError(f"{name} must have length {size}, got {arr.size}")
    return arr


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues of a square matrix, with the largest real part broken out."""

    eigenvalues: np.ndarray
    max_real_part: float

    @classmethod
    def of(cls, values) -> "Spectrum":
        vals = np.sort_complex(np.asarray(values, dtype=complex))
        return cls(eigenvalues=vals, max_real_part=float(vals.real.max()))


def mat_exp(M, t: float = 1.0) -> np.ndarray:
    """exp(M t) by scaling-and-squaring (scipy's Pade implementation)."""
    M = as_square(M)
    return scipy.linalg.expm(M * float(t))


def eigenvalues(M) -> Spectrum:
    """Eigenvalues with multiplicity, sorted by (real, imag)."""
    M = as_square(M)
    return Spectrum.of(np.linalg.eigvals(M))


def hurwitz_margin(M) -> float:
    """Largest eigenvalue real part; the matrix is Hurwitz iff this is < HURWITZ_TOL."""
    return eigenvalues(M).max_real_part


def is_hurwitz(M) -> bool:
    return hurwitz_margin(M) < HURWITZ_TOL


def gramian(A, B, P, T: float) -> np.ndarray:
    """Finite-horizon controllability Gramian of (A, B P) over [0, T].

    ``P`` may be a ChannelSet or an explicit m x m projection matrix.  The
    integral of exp(A s) B P B^T exp(A^T s) is read off a single exponential
    of the augmented 2n x 2n block matrix [[-A, BPB^T], [0, A^T]] (Van Loan),
    so the result is exact up to the accuracy of the matrix exponential.
    """
    A = as_square(A, "A")
    B = as_matrix(B, "B")
    n = A.shape[0]
    if B.shape[0] != n:
        raise DimensionError(f"B has {B.shape[0]} rows, expected {n}")
    if T <= 0:
        raise DomainError(f"horizon T must be positive, got {T}")
    if isinstance(P, ChannelSet):
        P = P.projection()
    P = as_square(P, "P")
    if P.shape[0] != B.shape[1]:
        raise DimensionError(f"projection is {P.shape[0]} x {P.shape[0]}, expected {B.shape[1]}")
    Q = B @ P @ B.T
    blk = np.zeros((2 * n, 2 * n))
    blk[:n, :n] = -A
    blk[:n, n:] = Q
    blk[n:, n:] = A.T
    E = scipy.linalg.expm(blk * float(T))
    W = E[n:, n:].T @ E[:n, n:]
    return 0.5 * (W + W.T)


def ctrb_matrix(A, B) -> np.ndarray:
    """The block matrix [B, AB, ..., A^(n-1) B]."""
    A = as_square(A, "A")
    B = as_matrix(B, "B")
    if B.shape[0] != A.shape[0]:
        raise DimensionError(f"B has {B.shape[0]} rows, expected {A.shape[0]}")
    blocks = [B]
    for _ in range(A.shape[0] - 1):
        blocks.append(A @ blocks[-1])
    return np.hstack(blocks)


def ctrb_rank(A, B) -> int:
    """Rank of the controllability matrix, by singular values."""
    s = np.linalg.svd(ctrb_matrix(A, B), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > SINGULARITY_RTOL * s[0]))


def nullspace(M) -> list[np.ndarray]:
    """Orthonormal basis of the right nullspace, as a list of 1-D vectors."""
    M = as_matrix(M)
    _, s, vh = np.linalg.svd(M)
    cutoff = SINGULARITY_RTOL * (s[0] if s.size else 0.0)
    rank = int(np.count_nonzero(s > cutoff))
    return [vh[i].copy() for i in range(rank, M.shape[1])]


def smallest_singular_value(M) -> float:
    s = np.linalg.svd(as_matrix(M), compute_uv=False)
    return float(s[-1]) if s.size else 0.0


def is_nonsingular(M) -> bool:
    """True when the smallest singular value clears the shared relative cutoff."""
    s = np.linalg.svd(as_square(M), compute_uv=False)
    return s.size > 0 and s[-1] > SINGULARITY_RTOL * s[0]
