"""The channel-dropout lattice: subset enumeration and controllability classification."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from ._parallel import parallel_map
from .channels import ChannelSet, projection_matrix  # noqa: F401  (re-exported)
from .errors import CapacityError, DomainError
from .plant import system_matrices

# Hard ceiling on how many subsets any one call may enumerate.
ENUMERATION_GUARD = 2**20


def enumerate_subsets(m: int, k_min: int = 0, k_max: int | None = None) -> list[ChannelSet]:
    """All channel subsets with cardinality in [k_min, k_max], ordered by
    (cardinality, lexicographic)."""
    if k_max is None:
        k_max = m
    if not (0 <= k_min <= k_max <= m):
        raise DomainError(f"need 0 <= k_min <= k_max <= m, got ({k_min}, {k_max}, {m})")
    total = sum(math.comb(m, k) for k in range(k_min, k_max + 1))
    if total > ENUMERATION_GUARD:
        raise CapacityError(f"{total} subsets exceed the enumeration guard {ENUMERATION_GUARD}")
    out = []
    for k in range(k_min, k_max + 1):
        for combo in itertools.combinations(range(1, m + 1), k):
            out.append(ChannelSet(m, combo))
    return out


def enumerate_supersets(root: ChannelSet) -> list[ChannelSet]:
    """Every superset of ``root`` inside 1..m, ordered by (cardinality, lexicographic)."""
    rest = root.complement()
    if 2 ** len(rest) > ENUMERATION_GUARD:
        raise CapacityError(f"2^{len(rest)} supersets exceed the enumeration guard")
    supersets = []
    for k in range(len(rest) + 1):
        for extra in itertools.combinations(rest, k):
            supersets.append(root.union(extra))
    supersets.sort(key=lambda c: (c.cardinality, c.indices))
    return supersets


@dataclass(frozen=True, eq=False)
class SubsetRecord:
    """Per-subset result of a lattice sweep; unused fields stay None."""

    channels: ChannelSet
    controllable: bool | None = None
    hurwitz_margin: float | None = None
    gramian_min_singular_value: float | None = None

    @property
    def cardinality(self) -> int:
        return self.channels.cardinality

    @property
    def passed(self) -> bool | None:
        if self.controllable is not None:
            return self.controllable
        if self.hurwitz_margin is not None:
            return self.hurwitz_margin < numerics.HURWITZ_TOL
        return None


@dataclass(eq=False)
class LatticeReport:
    """Results of sweeping a family of channel subsets."""

    records: list[SubsetRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def record_for(self, channels: ChannelSet) -> SubsetRecord:
        for rec in self.records:
            if rec.channels == channels:
                return rec
        raise KeyError(f"no record for {channels.label()}")

    def counts_by_cardinality(self) -> dict[int, tuple[int, int]]:
        """cardinality -> (number passing, number swept)."""
        out: dict[int, tuple[int, int]] = {}
        for rec in self.records:
            npass, ntot = out.get(rec.cardinality, (0, 0))
            out[rec.cardinality] = (npass + (1 if rec.passed else 0), ntot + 1)
        return dict(sorted(out.items()))

    def failures(self) -> list[SubsetRecord]:
        return [rec for rec in self.records if rec.passed is False]

    def all_pass(self) -> bool:
        return all(rec.passed for rec in self.records)

    def to_csv_rows(self) -> tuple[list[str], list[list]]:
        with_ctrb = any(rec.controllable is not None for rec in self.records)
        with_margin = any(rec.hurwitz_margin is not None for rec in self.records)
        header = ["indices", "cardinality"]
        if with_ctrb:
            header += ["controllable", "gramian_min_singular_value"]
        if with_margin:
            header += ["hurwitz_margin", "hurwitz"]
        rows = []
        for rec in self.records:
            row: list = [rec.channels.label(), rec.cardinality]
            if with_ctrb:
                row += [rec.controllable, rec.gramian_min_singular_value]
            if with_margin:
                row += [rec.hurwitz_margin, rec.hurwitz_margin < numerics.HURWITZ_TOL]
            rows.append(row)
        return header, rows


def classify_controllability(
    system, T: float = 1.0, k_min: int = 0, k_max: int | None = None
) -> LatticeReport:
    """Decide, for every channel subset, whether the surviving channels keep the
    pair controllable.

    The decision is the rank of the controllability matrix of (A, B P); the
    finite-horizon Gramian's smallest singular value is recorded alongside as a
    cross-check (the two agree wherever the horizon Gramian is well scaled).
    """
    A, B = system_matrices(system)
    if T <= 0:
        raise DomainError(f"horizon T must be positive, got {T}")
    n = A.shape[0]
    subsets = enumerate_subsets(B.shape[1], k_min, k_max)

    def sweep(channels: ChannelSet) -> SubsetRecord:
        P = channels.projection()
        rank = numerics.ctrb_rank(A, B @ P)
        W = numerics.gramian(A, B, P, T)
        return SubsetRecord(
            channels,
            controllable=(rank == n),
            gramian_min_singular_value=numerics.smallest_singular_value(W),
        )

    return LatticeReport(parallel_map(sweep, subsets))
