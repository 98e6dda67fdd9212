"""Unit-norm input frames with flat Gram spectra.

Spreading unit column vectors evenly over the circle or a higher sphere makes
B B^T diagonal with entries that grow linearly in the number of columns, which
is the right scaling regime for feedback through many weak channels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError


@dataclass(frozen=True)
class FrameSpec:
    """Geometry of an evenly spaced frame.

    For n == 2 give the column count m directly; for n >= 3 give the per-angle
    counts (N_1, ..., N_{n-1}), each > 2.  The polar angle runs over N_1 + 1
    values (both poles included), the remaining angles over full turns, so the
    sphere frame has (N_1 + 1) N_2 ... N_{n-1} columns, pole duplicates kept.
    """

    n: int
    m: int | None = None
    counts: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"ambient dimension must be >= 2, got {self.n}")
        if self.n == 2:
            if self.m is None or self.counts is not None:
                raise DomainError("planar frames take a column count m and no angle counts")
            if self.m <= 2:
                raise DomainError(f"need more than 2 columns, got m={self.m}")
        else:
            if self.counts is None or self.m is not None:
                raise DomainError("sphere frames take angle counts, not a direct column count")
            counts = tuple(int(c) for c in self.counts)
            if len(counts) != self.n - 1:
                raise DimensionError(
                    f"need {self.n - 1} angle counts for n={self.n}, got {len(counts)}"
                )
            if any(c <= 2 for c in counts):
                raise DomainError(f"every angle count must exceed 2, got {counts}")
            object.__setattr__(self, "counts", counts)

    @property
    def column_count(self) -> int:
        if self.n == 2:
            return self.m
        return (self.counts[0] + 1) * math.prod(self.counts[1:])


def circle_frame(m: int) -> np.ndarray:
    """2 x m matrix of unit columns uniformly spaced on the circle.

    B B^T is exactly (m/2) I.
    """
    if m <= 2:
        raise DomainError(f"need more than 2 columns, got m={m}")
    angles = 2.0 * np.pi * np.arange(1, m + 1) / m
    return np.vstack([np.cos(angles), np.sin(angles)])


def sphere_frame(spec: FrameSpec) -> np.ndarray:
    """n x m matrix of unit columns at evenly spaced generalized Euler angles.

    The polar angle theta_1 takes j pi / N_1 for j = 0..N_1 and every other
    angle theta_k takes 2 j pi / N_k for j = 1..N_k.  Columns are ordered
    lexicographically in the angle indices.  B B^T comes out diagonal with
    largest entry (N_1 + 2)/2 * N_2 ... N_{n-1}.
    """
    if spec.n < 3:
        raise DomainError("use circle_frame for the planar case")
    counts = spec.counts
    grids = [np.pi * np.arange(0, counts[0] + 1) / counts[0]]
    for N in counts[1:]:
        grids.append(2.0 * np.pi * np.arange(1, N + 1) / N)
    mesh = np.meshgrid(*grids, indexing="ij")
    thetas = [g.reshape(-1) for g in mesh]

    n = spec.n
    m = thetas[0].size
    B = np.empty((n, m))
    B[n - 1] = np.cos(thetas[0])
    sin_prod = np.sin(thetas[0])
    for k in range(1, n - 1):
        B[n - 1 - k] = sin_prod * np.cos(thetas[k])
        sin_prod = sin_prod * np.sin(thetas[k])
    B[0] = sin_prod
    return B


def gram_spectrum(B) -> np.ndarray:
    """Eigenvalues of B B^T, ascending."""
    B = np.asarray(B, dtype=float)
    return np.linalg.eigvalsh(B @ B.T)


def circle_gram_radius(m: int) -> float:
    """Spectral radius of B B^T for the m-column circle frame."""
    return m / 2.0


def sphere_gram_peak(spec: FrameSpec) -> float:
    """Largest eigenvalue of B B^T for the sphere frame with the given counts."""
    if spec.n < 3:
        raise DomainError("sphere_gram_peak applies to n >= 3 frames")
    return (spec.counts[0] + 2) / 2.0 * math.prod(spec.counts[1:])
