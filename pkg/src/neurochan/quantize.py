"""Sampled-data discretizations and binary-input emulation of a target flow.

The emulation problem: pick each channel's input from a small alphabet
({-1,+1}, optionally with 0 for a dropped channel) so that the achieved field
A x + B u is as close as possible, in the Euclidean norm, to the field H x of
a prescribed Hurwitz matrix H.  The selection is an exhaustive argmin over the
alphabet, with ties broken toward the lexicographically smallest input
(-1 < 0 < +1) so that replays are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import numerics
from .errors import CapacityError, DivergenceError, DomainError, UnsupportedError
from .intermittency import Trajectory
from .lifting import lift_particular
from .plant import Plant

ALPHABETS = {"pm_one": (-1.0, 1.0), "pm_one_or_off": (-1.0, 0.0, 1.0)}
MAX_CHANNELS = {"pm_one": 20, "pm_one_or_off": 12}
DIVERGENCE_RADIUS = 1e6

# Residuals within this of the minimum count as tied.
TIE_TOL = 1e-9

_CHUNK = 1 << 14


@dataclass(frozen=True, eq=False)
class Discretization:
    """One-step map x(k+1) = F x(k) + G u(k) at step size h."""

    h: float
    F: np.ndarray
    G: np.ndarray
    order: str  # "exact" or "euler"


def discretize(plant: Plant, h: float, order: str = "exact") -> Discretization:
    """Zero-order-hold discretization of the plant.

    "exact" uses F = exp(A h) and G = (integral of exp(A s) ds) B, both read
    off one exponential of the augmented block [[A, I], [0, 0]].  "euler" is
    the first-order map F = I + h A (with A reconstructed from B and its
    minimum-norm lift) and G = h B.
    """
    if h <= 0:
        raise DomainError(f"step size h must be positive, got {h}")
    n = plant.n
    if order == "exact":
        blk = np.zeros((2 * n, 2 * n))
        blk[:n, :n] = plant.A
        blk[:n, n:] = np.eye(n)
        E = scipy.linalg.expm(blk * h)
        return Discretization(h=h, F=E[:n, :n], G=E[:n, n:] @ plant.B, order=order)
    if order == "euler":
        F = np.eye(n) + h * (plant.B @ lift_particular(plant))
        return Discretization(h=h, F=F, G=h * plant.B, order=order)
    raise DomainError(f"unknown discretization order {order!r}")


@dataclass(frozen=True, eq=False)
class EmulationTarget:
    """A Hurwitz flow to emulate with quantized inputs.

    ``column_weights`` scale the columns of B before selection; None means
    normalize every column to unit length so all channels push equally hard.
    """

    H: np.ndarray
    h: float
    alphabet: str = "pm_one"
    column_weights: np.ndarray | None = None

    def __post_init__(self):
        H = numerics.as_square(self.H, "H")
        if not numerics.is_hurwitz(H):
            raise DomainError("target flow matrix H must be Hurwitz")
        if self.h <= 0:
            raise DomainError(f"step size h must be positive, got {self.h}")
        if self.alphabet not in ALPHABETS:
            raise DomainError(f"unknown alphabet {self.alphabet!r}, expected one of {tuple(ALPHABETS)}")
        object.__setattr__(self, "H", H)
        if self.column_weights is not None:
            w = numerics.as_vector(self.column_weights, name="column_weights")
            if np.any(w <= 0):
                raise DomainError("column weights must be positive")
            object.__setattr__(self, "column_weights", w)


def effective_input_matrix(target: EmulationTarget, plant: Plant) -> np.ndarray:
    """B with its columns scaled by the target's weights (unit norms by default)."""
    if target.column_weights is None:
        return plant.B / np.linalg.norm(plant.B, axis=0)
    if target.column_weights.size != plant.m:
        raise DomainError(
            f"{target.column_weights.size} column weights for {plant.m} channels"
        )
    return plant.B * target.column_weights


@dataclass(frozen=True, eq=False)
class SelectionResult:
    """A chosen quantized input, its field mismatch, and how degenerate the argmin was."""

    u: np.ndarray
    residual: float
    tie_count: int


class _Selector:
    """Exhaustive argmin over alphabet^m, with candidates enumerated in
    lexicographic order and their field vectors precomputed in chunks."""

    def __init__(self, target: EmulationTarget, plant: Plant):
        levels = ALPHABETS[target.alphabet]
        cap = MAX_CHANNELS[target.alphabet]
        if plant.m > cap:
            raise CapacityError(
                f"exhaustive search over {len(levels)}^{plant.m} inputs exceeds the "
                f"m <= {cap} guard for alphabet {target.alphabet!r}"
            )
        self.levels = np.array(levels)
        self.m = plant.m
        self.count = len(levels) ** plant.m
        self.A = plant.A
        self.H = target.H
        self.B_eff = effective_input_matrix(target, plant)
        # field vectors B u for every candidate, chunked to bound memory
        self._chunks = []
        for start in range(0, self.count, _CHUNK):
            stop = min(start + _CHUNK, self.count)
            self._chunks.append((start, self.B_eff @ self._candidates(start, stop)))

    def _candidates(self, start: int, stop: int) -> np.ndarray:
        # candidate i has digits of i in base len(levels), channel 1 most
        # significant, so ascending i is ascending lexicographic u
        idx = np.arange(start, stop)
        U = np.empty((self.m, stop - start))
        base = len(self.levels)
        for ch in range(self.m - 1, -1, -1):
            U[ch] = self.levels[idx % base]
            idx = idx // base
        return U

    def input_for(self, label: int) -> np.ndarray:
        return self._candidates(label, label + 1)[:, 0]

    def select(self, x) -> SelectionResult:
        labels, residuals, ties = self.select_batch(np.asarray(x, dtype=float).reshape(1, -1))
        return SelectionResult(
            u=self.input_for(int(labels[0])),
            residual=float(residuals[0]),
            tie_count=int(ties[0]),
        )

    def select_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """For each row x of X: the winning candidate label, its residual
        ||H x - (A x + B u)||, and the number of tied minimizers."""
        W = (self.H - self.A) @ X.T  # target-minus-drift field, one column per x
        N = X.shape[0]
        best = np.full(N, np.inf)
        for _, BU in self._chunks:
            d2 = (
                np.einsum("ij,ij->j", BU, BU)[:, None]
                - 2.0 * BU.T @ W
                + np.einsum("ij,ij->j", W, W)[None, :]
            )
            np.minimum(best, d2.min(axis=0), out=best)
        r_min = np.sqrt(np.clip(best, 0.0, None))
        cutoff = (r_min + TIE_TOL * (1.0 + r_min)) ** 2
        labels = np.full(N, -1, dtype=np.int64)
        ties = np.zeros(N, dtype=np.int64)
        for start, BU in self._chunks:
            d2 = (
                np.einsum("ij,ij->j", BU, BU)[:, None]
                - 2.0 * BU.T @ W
                + np.einsum("ij,ij->j", W, W)[None, :]
            )
            tied = d2 <= cutoff[None, :]
            ties += tied.sum(axis=0)
            first = tied.argmax(axis=0)
            hit = tied[first, np.arange(N)] & (labels < 0)
            labels[hit] = start + first[hit]
        return labels, r_min, ties

    def residual_of(self, x: np.ndarray, u: np.ndarray) -> float:
        return float(np.linalg.norm((self.H - self.A) @ x - self.B_eff @ u))


def select_input(target: EmulationTarget, plant: Plant, x) -> SelectionResult:
    """Quantized input whose field best matches H x at the state x (exhaustive)."""
    return _Selector(target, plant).select(x)


def select_gated(target: EmulationTarget, plant: Plant, x) -> SelectionResult:
    """Selection over {-1, 0, +1}: the 0 level models a channel gated off."""
    if target.alphabet != "pm_one_or_off":
        raise DomainError("gated selection requires the pm_one_or_off alphabet")
    return _Selector(target, plant).select(x)


def simulate_emulation(
    target: EmulationTarget, plant: Plant, x0, steps: int
) -> Trajectory:
    """Iterate x(k+1) = x(k) + h (A x(k) + B u(k)) with the selected inputs.

    Aborts if the state leaves the radius-1e6 ball.  The per-step field
    mismatches are kept in the trajectory metadata under "residuals".
    """
    if steps < 1:
        raise DomainError(f"need at least one step, got {steps}")
    sel = _Selector(target, plant)
    h = target.h
    x = numerics.as_vector(x0, plant.n, "x0")

    states = np.empty((steps + 1, plant.n))
    inputs = np.empty((steps + 1, plant.m))
    residuals = np.empty(steps + 1)
    states[0] = x
    for k in range(steps):
        result = sel.select(x)
        inputs[k] = result.u
        residuals[k] = result.residual
        x = x + h * (plant.A @ x + sel.B_eff @ result.u)
        if np.linalg.norm(x) > DIVERGENCE_RADIUS:
            raise DivergenceError(
                f"state norm exceeded {DIVERGENCE_RADIUS:.0e} at step {k + 1}"
            )
        states[k + 1] = x
    final = sel.select(x)  # selection at the final state, for aligned records
    inputs[steps] = final.u
    residuals[steps] = final.residual

    return Trajectory(
        times=h * np.arange(steps + 1),
        states=states,
        inputs=inputs,
        active=inputs != 0.0,
        metadata={"h": h, "alphabet": target.alphabet, "residuals": residuals},
    )


@dataclass(eq=False)
class CellMap:
    """The selection function sampled on a planar grid.

    Labels are candidate indices in the selector's lexicographic order;
    ``input_for`` decodes a label back into the input vector.
    """

    xs: np.ndarray
    ys: np.ndarray
    labels: np.ndarray  # (len(ys), len(xs))
    residuals: np.ndarray
    tie_counts: np.ndarray
    levels: tuple[float, ...]
    m: int
    metadata: dict = field(default_factory=dict)

    def input_for(self, label: int) -> np.ndarray:
        digits = np.empty(self.m)
        base = len(self.levels)
        for ch in range(self.m - 1, -1, -1):
            digits[ch] = self.levels[label % base]
            label //= base
        return digits

    def distinct_labels(self) -> np.ndarray:
        return np.unique(self.labels)

    def to_csv_rows(self) -> tuple[list[str], list[list]]:
        header = ["x1", "x2", "label"]
        rows = []
        for iy, y in enumerate(self.ys):
            for ix, x in enumerate(self.xs):
                rows.append([float(x), float(y), int(self.labels[iy, ix])])
        return header, rows


def cell_map(
    target: EmulationTarget, plant: Plant, bounds=(-2.0, 2.0), resolution: int = 101
) -> CellMap:
    """Evaluate the selection on a square grid and return the induced partition."""
    if plant.n != 2:
        raise UnsupportedError("cell maps are only defined for planar state spaces")
    lo, hi = float(bounds[0]), float(bounds[1])
    if not lo < hi:
        raise DomainError(f"bounds must be increasing, got {bounds}")
    if resolution < 2:
        raise DomainError(f"resolution must be at least 2, got {resolution}")
    xs = np.linspace(lo, hi, resolution)
    ys = np.linspace(lo, hi, resolution)
    gx, gy = np.meshgrid(xs, ys)
    nodes = np.column_stack([gx.ravel(), gy.ravel()])
    sel = _Selector(target, plant)
    labels, residuals, ties = sel.select_batch(nodes)
    shape = (resolution, resolution)
    return CellMap(
        xs=xs,
        ys=ys,
        labels=labels.reshape(shape),
        residuals=residuals.reshape(shape),
        tie_counts=ties.reshape(shape),
        levels=tuple(float(l) for l in sel.levels),
        m=plant.m,
        metadata={"alphabet": target.alphabet, "bounds": (lo, hi), "resolution": resolution},
    )
