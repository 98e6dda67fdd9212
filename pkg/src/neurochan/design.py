"""Resilient gain synthesis, set-point offsets, and dropout certificates.

The central construction: with a lift Ahat of A (B Ahat = A) and a strength
alpha > 0, the gain K = -alpha B^T - Ahat collapses the closed loop to
A + B K = -alpha B B^T, which is negative definite.  If moreover the lift's
rows vanish outside a channel set I, the same cancellation happens for every
superset L of I, so the design stays exponentially stable under any dropout
pattern that keeps the channels of I alive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from ._parallel import parallel_map
from .channels import ChannelSet
from .errors import DimensionError, DomainError, InfeasibleError, InvalidLiftError, UnsupportedError
from .lattice import LatticeReport, SubsetRecord, enumerate_subsets, enumerate_supersets
from .lifting import LIFT_RESIDUAL_TOL
from .plant import Plant

ALPHA_SCALINGS = ("fixed", "inverse_m")

# Rows of a lift outside the invariance set must vanish to within this.
INVARIANCE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GainDesign:
    """A set-point feedback design (alpha, Ahat, K, x_g, v).

    K = -alpha_eff B^T - Ahat and v = -(Ahat + K) x_g, where alpha_eff is
    alpha itself or alpha * n/m under the inverse_m scaling (which keeps the
    per-channel influence from growing with the channel count).
    """

    alpha: float
    alpha_scaling: str
    Ahat: np.ndarray
    K: np.ndarray
    x_g: np.ndarray
    v: np.ndarray

    @property
    def m(self) -> int:
        return self.K.shape[0]

    @property
    def n(self) -> int:
        return self.K.shape[1]

    @property
    def alpha_eff(self) -> float:
        if self.alpha_scaling == "inverse_m":
            return self.alpha * self.n / self.m
        return self.alpha

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "scaling": self.alpha_scaling,
            "Ahat": self.Ahat.tolist(),
            "K": self.K.tolist(),
            "x_g": self.x_g.tolist(),
            "v": self.v.tolist(),
        }


@dataclass(frozen=True, eq=False)
class ResilienceCertificate:
    """Hurwitz margins of A + B P_L K over every superset L of the root set.

    ``all_pass`` is None when the certificate's hypotheses failed (the margins
    are still reported, with the failures named in ``diagnostics``).
    """

    root_set: ChannelSet
    verified: list[tuple[ChannelSet, float]]
    all_pass: bool | None
    diagnostics: tuple[str, ...] = ()

    def margin_for(self, channels: ChannelSet) -> float:
        for subset, margin in self.verified:
            if subset == channels:
                return margin
        raise KeyError(f"no verified entry for {channels.label()}")

    def to_csv_rows(self) -> tuple[list[str], list[list]]:
        header = ["indices", "cardinality", "hurwitz_margin", "hurwitz"]
        rows = [
            [subset.label(), subset.cardinality, margin, margin < numerics.HURWITZ_TOL]
            for subset, margin in self.verified
        ]
        return header, rows


def make_gain(
    plant: Plant, Ahat, alpha: float, x_g=None, scaling: str = "fixed"
) -> GainDesign:
    """Build the resilient gain and the offset that pins the goal point."""
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if scaling not in ALPHA_SCALINGS:
        raise DomainError(f"unknown alpha scaling {scaling!r}, expected one of {ALPHA_SCALINGS}")
    Ahat = numerics.as_matrix(Ahat, "Ahat")
    if Ahat.shape != (plant.m, plant.n):
        raise DimensionError(f"Ahat must be {plant.m} x {plant.n}, got {Ahat.shape}")
    residual = np.linalg.norm(plant.B @ Ahat - plant.A)
    if residual >= LIFT_RESIDUAL_TOL:
        raise InvalidLiftError(
            f"B Ahat differs from A by {residual:.3e} (tolerance {LIFT_RESIDUAL_TOL:.0e})"
        )
    x_g = np.zeros(plant.n) if x_g is None else numerics.as_vector(x_g, plant.n, "x_g")
    alpha_eff = alpha * plant.n / plant.m if scaling == "inverse_m" else alpha
    K = -alpha_eff * plant.B.T - Ahat
    v = -(Ahat + K) @ x_g
    return GainDesign(alpha=float(alpha), alpha_scaling=scaling, Ahat=Ahat, K=K, x_g=x_g, v=v)


def certify_resilience(plant: Plant, design: GainDesign, root: ChannelSet) -> ResilienceCertificate:
    """Check exponential stability of the closed loop over the whole superset
    lattice of ``root``.

    Hypotheses checked up front: the design's lift must be supported on the
    root set (zero rows elsewhere) and the root's columns of B must span the
    state space.  When either fails the margins are still computed but
    ``all_pass`` is left undefined.
    """
    diagnostics = []
    outside = [i for i in range(1, plant.m + 1) if i not in root]
    if outside:
        stray = np.abs(design.Ahat[[i - 1 for i in outside], :]).max()
        if stray > INVARIANCE_TOL:
            diagnostics.append(
                f"lift has nonzero rows (max |entry| {stray:.3e}) outside the root set "
                f"{root.label()}; it is not invariant under the root projection"
            )
    cols = root.positions()
    s = np.linalg.svd(plant.B[:, cols], compute_uv=False) if cols else np.zeros(0)
    if s.size < plant.n or s.min() <= numerics.SINGULARITY_RTOL * (s.max() if s.size else 0.0):
        diagnostics.append(
            f"columns of B on the root set {root.label()} have rank < {plant.n}; "
            f"the leaf closed loop cannot be negative definite"
        )

    K = design.K

    def margin(subset: ChannelSet) -> float:
        mask = subset.mask()
        return numerics.hurwitz_margin(plant.A + (plant.B * mask) @ K)

    supersets = enumerate_supersets(root)
    margins = parallel_map(margin, supersets)
    verified = list(zip(supersets, margins))
    all_pass = None if diagnostics else bool(all(mg < numerics.HURWITZ_TOL for mg in margins))
    return ResilienceCertificate(
        root_set=root, verified=verified, all_pass=all_pass, diagnostics=tuple(diagnostics)
    )


def goal_equilibrium_check(plant: Plant, design: GainDesign, channels: ChannelSet) -> float:
    """Residual ||(A + B P K) x_g + B P v|| under the dropout pattern ``channels``.

    Near zero certifies that the goal point stays an equilibrium with only the
    given channels acting.
    """
    mask = channels.mask()
    BP = plant.B * mask
    return float(np.linalg.norm((plant.A + BP @ design.K) @ design.x_g + BP @ design.v))


def problem_a_scan(plant: Plant, K, j_min: int | None = None) -> LatticeReport:
    """Hurwitz margin of A + B P K for every channel subset of size >= j_min."""
    K = numerics.as_matrix(K, "K")
    if K.shape != (plant.m, plant.n):
        raise DimensionError(f"K must be {plant.m} x {plant.n}, got {K.shape}")
    j_min = plant.n if j_min is None else j_min
    if j_min < plant.n:
        raise DomainError(f"scan floor j_min={j_min} below the state dimension {plant.n}")
    subsets = enumerate_subsets(plant.m, j_min, plant.m)

    def sweep(channels: ChannelSet) -> SubsetRecord:
        mask = channels.mask()
        mg = numerics.hurwitz_margin(plant.A + (plant.B * mask) @ K)
        return SubsetRecord(channels, hurwitz_margin=mg)

    return LatticeReport(parallel_map(sweep, subsets))


# --- simultaneous eigenvalue assignment over all principal channel pairs ----

PROBLEM_B_TOL = 1e-13
PROBLEM_B_SPECTRUM_TOL = 1e-7


def _target_sum_product(pair) -> tuple[float, float]:
    lam1, lam2 = complex(pair[0]), complex(pair[1])
    s, p = lam1 + lam2, lam1 * lam2
    if abs(s.imag) > 1e-12 or abs(p.imag) > 1e-12:
        raise DomainError(f"target pair {pair} is not closed under conjugation")
    return s.real, p.real


def problem_b_solve(plant: Plant, targets, seed: int = 0, restarts: int = 100) -> np.ndarray:
    """Find one gain K placing the spectrum of every 2-channel principal
    subsystem's closed loop at its target pair.

    Only the two-state, three-channel case is supported: there the trace and
    determinant conditions give six polynomial equations in the six entries of
    K, solved by Newton iteration from random restarts.  With more channels
    the system is overdetermined and generally unsolvable.
    """
    if (plant.n, plant.m) != (2, 3):
        raise UnsupportedError(
            "simultaneous assignment over all principal pairs is only tractable "
            "for 2 states and 3 channels"
        )
    pairs = enumerate_subsets(3, 2, 2)
    targets = dict(targets)
    missing = [p.label() for p in pairs if p not in targets]
    if missing:
        raise DomainError(f"missing target spectra for channel pairs {missing}")
    goals = {p: _target_sum_product(targets[p]) for p in pairs}
    masks = {p: p.mask() for p in pairs}

    A, B = plant.A, plant.B

    def closed(kvec: np.ndarray, pair: ChannelSet) -> np.ndarray:
        return A + (B * masks[pair]) @ kvec.reshape(3, 2)

    def residual(kvec: np.ndarray) -> np.ndarray:
        r = np.empty(6)
        for i, pair in enumerate(pairs):
            M = closed(kvec, pair)
            s, p = goals[pair]
            r[2 * i] = M[0, 0] + M[1, 1] - s
            r[2 * i + 1] = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0] - p
        return r

    def jacobian(kvec: np.ndarray) -> np.ndarray:
        # The closed loop is affine in K: perturbing entry (j, l) adds the
        # column vector B[:, j] (if channel j+1 is in the pair) to column l.
        J = np.zeros((6, 6))
        for i, pair in enumerate(pairs):
            M = closed(kvec, pair)
            for j in range(3):
                if (j + 1) not in pair:
                    continue
                b = B[:, j]
                for l in range(2):
                    col = 2 * j + l
                    J[2 * i, col] = b[l]
                    if l == 0:
                        J[2 * i + 1, col] = M[1, 1] * b[0] - M[0, 1] * b[1]
                    else:
                        J[2 * i + 1, col] = M[0, 0] * b[1] - M[1, 0] * b[0]
        return J

    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        kvec = rng.uniform(-3.0, 3.0, 6)
        for _ in range(60):
            r = residual(kvec)
            if np.max(np.abs(r)) < PROBLEM_B_TOL:
                break
            try:
                step = np.linalg.solve(jacobian(kvec), -r)
            except np.linalg.LinAlgError:
                break
            if not np.all(np.isfinite(step)):
                break
            kvec = kvec + step
        if np.max(np.abs(residual(kvec))) >= PROBLEM_B_TOL:
            continue
        K = kvec.reshape(3, 2)
        if _spectra_match(plant, K, goals, masks):
            return K
    raise InfeasibleError(
        f"no gain matching all target spectra found in {restarts} Newton restarts"
    )


def _spectra_match(plant: Plant, K: np.ndarray, goals, masks) -> bool:
    for pair, (s, p) in goals.items():
        M = plant.A + (plant.B * masks[pair]) @ K
        if abs(np.trace(M) - s) > PROBLEM_B_SPECTRUM_TOL:
            return False
        if abs(np.linalg.det(M) - p) > PROBLEM_B_SPECTRUM_TOL:
            return False
    return True
