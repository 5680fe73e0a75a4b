"""Network-correlated outcome simulation and the difference-in-means estimator.

The outcome of subject i adds its treatment effect, the latent covariates of
itself and its neighbors (row i of the adjacency matrix times Z), and iid
noise.  All functions are pure given a caller-supplied random stream, so
replicates can run concurrently on independent streams.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ParameterError
from .graph import Graph
from .design import imbalance_recompute

_MATVEC_CHUNK = 2048


@dataclass(frozen=True)
class OutcomeParams:
    mu0: float
    mu1: float
    sigma_z: float
    sigma_eps: float

    def __post_init__(self):
        if self.sigma_z < 0 or self.sigma_eps < 0:
            raise ParameterError("standard deviations must be nonnegative")


@dataclass(frozen=True)
class TrialOutcome:
    """Outcome vector and the estimate of mu0 - mu1.

    For odd n the estimate uses the first ``paired_n`` = n - 1 subjects,
    since the estimator is defined over complete pairs.
    """

    x: np.ndarray
    w: float
    paired_n: int


def _check_sign_vector(g: Graph, tau) -> np.ndarray:
    tau = np.asarray(tau, dtype=np.float64)
    if tau.shape != (g.n,):
        raise ContractError(f"sign vector length {tau.shape} does not match n={g.n}")
    if not np.isin(tau, (-1.0, 1.0)).all():
        raise ContractError("sign vector entries must be +1 or -1")
    return tau


def _matvec(matrix: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = np.empty(matrix.shape[0], dtype=np.float64)
    for i0 in range(0, matrix.shape[0], _MATVEC_CHUNK):
        i1 = min(i0 + _MATVEC_CHUNK, matrix.shape[0])
        out[i0:i1] = matrix[i0:i1].astype(np.float64) @ v
    return out


def simulate_outcomes(g: Graph, tau, params: OutcomeParams, rng) -> TrialOutcome:
    """Draw one outcome vector and its estimate for a fixed assignment.

    Consumes n covariate draws Z ~ N(0, sigma_z^2) followed by n noise draws.
    """
    tau = _check_sign_vector(g, tau)
    n = g.n
    z = rng.normal(0.0, params.sigma_z, n)
    eps = rng.normal(0.0, params.sigma_eps, n)
    effects = np.where(tau > 0, params.mu0, params.mu1)
    x = effects + _matvec(g.matrix, z) + eps
    paired_n = n - (n % 2)
    w = 2.0 / paired_n * float(tau[:paired_n] @ x[:paired_n])
    return TrialOutcome(x=x, w=w, paired_n=paired_n)


def analytic_variance(g: Graph, tau, params: OutcomeParams) -> float:
    """Closed-form variance of the estimate for a fixed graph and assignment."""
    tau = _check_sign_vector(g, tau)
    n = g.n
    if n % 2:
        raise ParameterError("analytic variance is defined for even n")
    i2 = float(imbalance_recompute(g, tau, n))
    return 4.0 / n**2 * i2 * params.sigma_z**2 + 4.0 / n * params.sigma_eps**2


def unbiasedness_check(
    g: Graph, tau, params: OutcomeParams, reps: int, *, rng=None, seed=None
) -> tuple[float, float]:
    """Sample mean and standard error of the estimate over independent draws."""
    if reps < 2:
        raise ParameterError("need at least 2 replicates for a standard error")
    if rng is None:
        rng = np.random.default_rng(seed)
    ws = np.empty(reps, dtype=np.float64)
    for r in range(reps):
        ws[r] = simulate_outcomes(g, tau, params, rng).w
    return float(ws.mean()), float(ws.std(ddof=1) / math.sqrt(reps))
