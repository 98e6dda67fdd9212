"""Steady-state set-point error under channel noise.

A constant perturbation n on the offsets shifts the equilibrium: subtracting
the nominal equilibrium equation (A + BK) x_g + B v = 0 from the perturbed one
(A + BK) x_inf + B (v + n) = 0 gives x_inf - x_g = -(A + BK)^{-1} B n, so with
channel covariance Sigma the error covariance is M B Sigma B^T M^T for
M = (A + BK)^{-1}.  For gains of the form -alpha B^T - Ahat the closed loop is
-alpha B B^T and the mean squared error collapses to tr((B B^T)^{-1}) / alpha^2
(identity Sigma), which strictly decreases whenever a new channel column is
appended.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .design import GainDesign
from .errors import DimensionError, DomainError
from .plant import Plant

LEMMA_GAIN_TOL = 1e-9
MIN_TRIALS = 1000


@dataclass(frozen=True, eq=False)
class NoiseModel:
    """Covariance of the per-channel offset perturbations."""

    sigma: np.ndarray

    def __post_init__(self):
        sigma = numerics.as_square(self.sigma, "sigma")
        if not np.allclose(sigma, sigma.T, atol=1e-12, rtol=0):
            raise DomainError("noise covariance must be symmetric")
        eigs = np.linalg.eigvalsh(sigma)
        scale = max(abs(eigs[0]), abs(eigs[-1]), 1.0)
        if eigs[0] < -1e-10 * scale:
            raise DomainError("noise covariance must be positive semidefinite")
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def identity(cls, m: int) -> "NoiseModel":
        return cls(np.eye(m))

    def factor(self) -> np.ndarray:
        """A matrix L with L L^T = sigma (eigenvalue-based, valid for any PSD input)."""
        eigs, vecs = np.linalg.eigh(self.sigma)
        return vecs @ np.diag(np.sqrt(np.clip(eigs, 0.0, None)))


def steady_state_error(
    plant: Plant, design: GainDesign, noise: NoiseModel | None = None
) -> tuple[np.ndarray, float]:
    """Covariance of x_inf - x_g and its trace (the mean squared error)."""
    noise = NoiseModel.identity(plant.m) if noise is None else noise
    if noise.sigma.shape[0] != plant.m:
        raise DimensionError(
            f"noise covariance is {noise.sigma.shape[0]} x {noise.sigma.shape[0]}, "
            f"expected {plant.m}"
        )
    closed = plant.A + plant.B @ design.K
    if not numerics.is_hurwitz(closed):
        raise DomainError("closed loop A + B K is not Hurwitz; no steady state exists")
    G = np.linalg.solve(closed, plant.B)  # (A + BK)^{-1} B
    cov = G @ noise.sigma @ G.T
    return cov, float(np.trace(cov))


def _require_lemma_gain(plant: Plant, design: GainDesign) -> float:
    alpha_eff = design.alpha_eff
    residual = np.linalg.norm(plant.A + plant.B @ design.K + alpha_eff * plant.bbt)
    if residual >= LEMMA_GAIN_TOL:
        raise DomainError(
            f"design is not of the -alpha B^T - Ahat form (closed-loop residual {residual:.3e})"
        )
    return alpha_eff


def augment_channel(plant: Plant, design: GainDesign, b) -> tuple[float, float]:
    """Mean squared errors (new, old) after appending channel column b with gain
    row -alpha b^T, identity channel noise.

    Appending keeps the closed loop in the -alpha (B B^T + b b^T) form, so both
    errors have the closed form tr(gram^{-1}) / alpha^2; the new one is strictly
    smaller for every b != 0.
    """
    b = numerics.as_vector(b, plant.n, "b")
    alpha_eff = _require_lemma_gain(plant, design)
    old = float(np.trace(np.linalg.inv(plant.bbt))) / alpha_eff**2
    new = float(np.trace(np.linalg.inv(plant.bbt + np.outer(b, b)))) / alpha_eff**2
    return new, old


def sample_squared_errors(
    plant: Plant,
    design: GainDesign,
    noise: NoiseModel | None,
    trials: int,
    seed: int,
) -> np.ndarray:
    """One squared steady-state error per Gaussian draw of the channel noise."""
    noise = NoiseModel.identity(plant.m) if noise is None else noise
    closed = plant.A + plant.B @ design.K
    if not numerics.is_hurwitz(closed):
        raise DomainError("closed loop A + B K is not Hurwitz; no steady state exists")
    G = np.linalg.solve(closed, plant.B)
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((trials, plant.m)) @ noise.factor().T
    errors = -(draws @ G.T)
    return np.einsum("ij,ij->i", errors, errors)


def monte_carlo_sse(
    plant: Plant,
    design: GainDesign,
    noise: NoiseModel | None = None,
    trials: int = 10_000,
    seed: int = 0,
) -> float:
    """Empirical mean squared steady-state error; deterministic per seed."""
    if trials < MIN_TRIALS:
        raise DomainError(f"need at least {MIN_TRIALS} trials, got {trials}")
    return float(sample_squared_errors(plant, design, noise, trials, seed).mean())
