"""Channel index sets and their 0/1 coordinate projections.

Channels are numbered 1..m.  A :class:`ChannelSet` names the channels that are
active; its projection matrix zeroes the inputs of every other channel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError


@dataclass(frozen=True)
class ChannelSet:
    """A subset of the input channels 1..m."""

    m: int
    indices: tuple[int, ...] = ()

    def __post_init__(self):
        if self.m < 0:
            raise DomainError(f"channel count must be nonnegative, got {self.m}")
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(set(idx)) != len(idx):
            raise DomainError(f"duplicate channel indices in {idx}")
        if idx and (idx[0] < 1 or idx[-1] > self.m):
            raise DomainError(f"channel indices {idx} outside 1..{self.m}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def full(cls, m: int) -> "ChannelSet":
        return cls(m, tuple(range(1, m + 1)))

    @classmethod
    def empty(cls, m: int) -> "ChannelSet":
        return cls(m, ())

    @classmethod
    def from_mask(cls, mask) -> "ChannelSet":
        mask = np.asarray(mask, dtype=bool)
        return cls(mask.size, tuple(int(i) + 1 for i in np.flatnonzero(mask)))

    @property
    def cardinality(self) -> int:
        return len(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, channel) -> bool:
        return channel in self.indices

    def mask(self) -> np.ndarray:
        """Boolean activity mask over 0-based channel positions."""
        out = np.zeros(self.m, dtype=bool)
        for i in self.indices:
            out[i - 1] = True
        return out

    def projection(self) -> np.ndarray:
        """The m x m diagonal 0/1 projection onto the active channels."""
        return np.diag(self.mask().astype(float))

    def positions(self) -> list[int]:
        """0-based column positions of the active channels."""
        return [i - 1 for i in self.indices]

    def complement(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.m + 1) if i not in self.indices)

    def issubset(self, other: "ChannelSet") -> bool:
        return set(self.indices) <= set(other.indices)

    def union(self, extra) -> "ChannelSet":
        return ChannelSet(self.m, tuple(set(self.indices) | set(extra)))

    def label(self) -> str:
        return "{" + ",".join(str(i) for i in self.indices) + "}"


def projection_matrix(channels: ChannelSet) -> np.ndarray:
    """Diagonal 0/1 matrix selecting the channels in ``channels``."""
    if not isinstance(channels, ChannelSet):
        raise DimensionError("projection_matrix expects a ChannelSet")
    return channels.projection()
