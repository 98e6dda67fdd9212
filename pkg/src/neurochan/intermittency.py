"""Per-channel two-state Markov availability driving the switched closed loop.

Each channel flips between available and unavailable as an independent
continuous-time Markov chain: delta is the recovery rate (unavailable ->
available) and epsilon the dropout rate (available -> unavailable), so the
stationary probability of being available is delta / (delta + epsilon).
Paths are sampled event by event with exponential holding times, and the
switched system dx/dt = (A + B P(t) K) x + B P(t) v is integrated with
fixed-step RK4 on each constant segment, aligned exactly with the switches.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .design import GainDesign
from .errors import DimensionError, DomainError
from .numerics import as_vector
from .plant import Plant

DEFAULT_DT = 1e-3

# Minimum RK4 substeps per availability segment; shorter segments get their
# step refined instead of being skipped.
MIN_SUBSTEPS = 4


@dataclass(frozen=True)
class MarkovChannelModel:
    """Two-state availability chain; rates may be scalars (shared) or length-m."""

    delta: float | tuple  # recovery rate, unavailable -> available
    epsilon: float | tuple  # dropout rate, available -> unavailable

    def rates(self, m: int) -> tuple[np.ndarray, np.ndarray]:
        delta = np.broadcast_to(np.asarray(self.delta, dtype=float), (m,)).copy()
        epsilon = np.broadcast_to(np.asarray(self.epsilon, dtype=float), (m,)).copy()
        if np.any(delta <= 0) or np.any(epsilon <= 0):
            raise DomainError("availability rates must be positive")
        return delta, epsilon

    def stationary_availability(self, m: int) -> np.ndarray:
        delta, epsilon = self.rates(m)
        return delta / (delta + epsilon)


@dataclass(eq=False)
class AvailabilityPath:
    """Piecewise-constant channel availability over [0, horizon].

    Segment i covers [times[i], times[i+1]) (the last one ends at the horizon)
    with the channel mask masks[i].
    """

    m: int
    horizon: float
    times: np.ndarray  # (S,) segment start times, times[0] == 0
    masks: np.ndarray  # (S, m) boolean

    @classmethod
    def constant(cls, mask, horizon: float) -> "AvailabilityPath":
        mask = np.asarray(mask, dtype=bool).reshape(1, -1)
        return cls(m=mask.shape[1], horizon=float(horizon), times=np.zeros(1), masks=mask)

    def segments(self):
        ends = np.append(self.times[1:], self.horizon)
        for t0, t1, mask in zip(self.times, ends, self.masks):
            if t1 > t0:
                yield float(t0), float(t1), mask

    def mask_at(self, t: float) -> np.ndarray:
        i = int(np.searchsorted(self.times, t, side="right") - 1)
        return self.masks[max(i, 0)]

    def availability_fraction(self) -> np.ndarray:
        """Time-weighted fraction of the horizon each channel spent available."""
        ends = np.append(self.times[1:], self.horizon)
        weights = (ends - self.times)[:, None]
        return (self.masks * weights).sum(axis=0) / self.horizon


def sample_availability(
    model: MarkovChannelModel, m: int, horizon: float, seed: int
) -> AvailabilityPath:
    """Sample independent availability chains for m channels.

    Initial states are drawn from the stationary law; subsequent flips come
    from exponential holding times, channel by channel, so the path is a
    deterministic function of the seed.
    """
    if horizon <= 0:
        raise DomainError(f"horizon must be positive, got {horizon}")
    delta, epsilon = model.rates(m)
    p_avail = delta / (delta + epsilon)
    rng = np.random.default_rng(seed)

    initial = np.zeros(m, dtype=bool)
    flips: list[tuple[float, int]] = []
    for ch in range(m):
        state = bool(rng.random() < p_avail[ch])
        initial[ch] = state
        t = 0.0
        while True:
            rate = epsilon[ch] if state else delta[ch]
            t += rng.exponential(1.0 / rate)
            if t >= horizon:
                break
            flips.append((t, ch))
            state = not state
    flips.sort()

    times = [0.0]
    masks = [initial.copy()]
    current = initial.copy()
    for t, ch in flips:
        current = current.copy()
        current[ch] = not current[ch]
        if t == times[-1]:
            masks[-1] = current.copy()
        else:
            times.append(t)
            masks.append(current.copy())
    return AvailabilityPath(m=m, horizon=float(horizon), times=np.array(times), masks=np.array(masks))


@dataclass(eq=False)
class Trajectory:
    """Time-stamped states, inputs, and active channels from a simulation."""

    times: np.ndarray  # (N,)
    states: np.ndarray  # (N, n)
    inputs: np.ndarray  # (N, m)
    active: np.ndarray  # (N, m) boolean
    metadata: dict = field(default_factory=dict)

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def active_bitmask(self) -> np.ndarray:
        """Per-sample integer with bit j-1 set when channel j is active."""
        weights = 1 << np.arange(self.active.shape[1])
        return (self.active.astype(np.int64) * weights).sum(axis=1)

    def to_csv_rows(self) -> tuple[list[str], list[list]]:
        n = self.states.shape[1]
        header = ["t"] + [f"x{i + 1}" for i in range(n)] + ["active_bitmask"]
        bits = self.active_bitmask()
        rows = []
        for i, t in enumerate(self.times):
            rows.append([float(t)] + [float(x) for x in self.states[i]] + [int(bits[i])])
        return header, rows


def _rk4_propagator(M: np.ndarray, c: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    # One RK4 step of dx/dt = M x + c has the closed form x+ = Phi x + psi when
    # M, c are constant over the step (Phi is the degree-4 Taylor polynomial of
    # exp(h M)); applying Phi per step is bit-for-bit the RK4 recursion at a
    # fraction of the cost.
    I = np.eye(M.shape[0])
    hM = h * M
    P2 = hM @ hM
    P3 = P2 @ hM
    Phi = I + hM + P2 / 2.0 + P3 / 6.0 + P3 @ hM / 24.0
    psi = h * (I + hM / 2.0 + P2 / 6.0 + P3 / 24.0) @ c
    return Phi, psi


def simulate_switched(
    plant: Plant,
    design: GainDesign,
    path: AvailabilityPath,
    x0,
    dt: float = DEFAULT_DT,
) -> Trajectory:
    """Integrate dx/dt = (A + B P(t) K) x + B P(t) v along an availability path.

    Fixed-step RK4 between switch events with exact event alignment; segments
    shorter than MIN_SUBSTEPS steps get a refined step (counted in the
    trajectory metadata).
    """
    if dt <= 0:
        raise DomainError(f"dt must be positive, got {dt}")
    if path.m != plant.m:
        raise DimensionError(f"path has m={path.m} channels, plant has m={plant.m}")
    x = as_vector(x0, plant.n, "x0")
    A, B, K, v = plant.A, plant.B, design.K, design.v

    times = [0.0]
    states = [x.copy()]
    active = [path.masks[0].copy()]
    refined = 0

    def record(t: float, state: np.ndarray, mask: np.ndarray):
        times.append(t)
        states.append(state.copy())
        active.append(mask.copy())

    for t0, t1, mask in path.segments():
        BP = B * mask
        M = A + BP @ K
        c = BP @ v
        seg = t1 - t0
        h = dt
        if seg < MIN_SUBSTEPS * dt:
            h = seg / MIN_SUBSTEPS
            refined += 1
        n_full = int(np.floor(seg / h + 1e-12))
        rem = seg - n_full * h
        Phi, psi = _rk4_propagator(M, c, h)
        t = t0
        for _ in range(n_full):
            x = Phi @ x + psi
            t += h
            record(t, x, mask)
        if rem > 1e-12 * max(h, 1.0):
            Phi_r, psi_r = _rk4_propagator(M, c, rem)
            x = Phi_r @ x + psi_r
            record(t1, x, mask)
        elif times[-1] != t1:
            times[-1] = t1  # absorb accumulated roundoff at the segment end

    times_arr = np.array(times)
    states_arr = np.array(states)
    active_arr = np.array(active, dtype=bool)
    inputs = (active_arr * (states_arr @ K.T + v)).astype(float)
    return Trajectory(
        times=times_arr,
        states=states_arr,
        inputs=inputs,
        active=active_arr,
        metadata={"dt": dt, "refined_segments": refined},
    )
