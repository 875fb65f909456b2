"""Benchmark and operational models of a replication sequence.

Under the benchmark model all m verdicts share one latent replicability
rate phi ~ Beta(mu, rho), so the success count is Betabinomial. Under the
operational model experiment i has its own phi_i and contributes k_i exact
replications.
"""

from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import stats

from replirate.core.exceptions import DomainError
from replirate.core.specfun import beta_shape_from_mean_icc
from replirate.utils.logger import get_logger

logger = get_logger(__name__)


# ============== Domain Types ==============
class SequenceParams(BaseModel):
    """Parameters (mu, rho, m) of a replication sequence."""

    model_config = ConfigDict(frozen=True)

    mu: float = Field(..., ge=0.0, le=1.0, description="Mean replicability rate")
    rho: float = Field(..., ge=0.0, le=1.0, description="Intraclass correlation")
    m: int = Field(..., ge=1, description="Number of replication experiments")


class OperationalDesign(BaseModel):
    """Exact-replication counts k_i, one per experiment."""

    model_config = ConfigDict(frozen=True)

    k: tuple[int, ...] = Field(..., min_length=1, description="Per-experiment replication counts")

    @model_validator(mode="after")
    def _positive_counts(self) -> "OperationalDesign":
        if any(ki < 1 for ki in self.k):
            raise ValueError("every k_i must be at least 1")
        return self

    @property
    def m(self) -> int:
        return len(self.k)

    @classmethod
    def uniform(cls, k: int, m: int) -> "OperationalDesign":
        return cls(k=(k,) * m)


class TwoPointMixture(BaseModel):
    """phi = mu + delta or mu - delta, each with probability 1/2."""

    model_config = ConfigDict(frozen=True)

    mu: float = Field(..., gt=0.0, lt=1.0)
    delta: float = Field(..., ge=0.0, description="Half-spread of the mixture")

    @model_validator(mode="after")
    def _inside_unit_interval(self) -> "TwoPointMixture":
        if self.mu - self.delta <= 0.0 or self.mu + self.delta >= 1.0:
            raise ValueError("mu - delta and mu + delta must both lie in (0, 1)")
        return self


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


def _frozen_distribution(params: SequenceParams):
    """scipy distribution of X for the non-degenerate branches, else None."""
    if params.mu in (0.0, 1.0) or params.rho == 1.0:
        return None
    if params.rho == 0.0:
        return stats.binom(params.m, params.mu)
    shape = beta_shape_from_mean_icc(params.mu, params.rho)
    return stats.betabinom(params.m, shape.a, shape.b)


# ============== Benchmark Model ==============
def betabinomial_logpmf(params: SequenceParams, x: ArrayLike) -> float | np.ndarray:
    """log p(x | m, mu, rho) under the benchmark model.

    rho = 0 is the Binomial; rho = 1 puts mass 1 - mu at 0 and mu at m;
    mu in {0, 1} is a point mass.

    Raises:
        DomainError: if any x lies outside 0..m
    """
    x_arr = np.asarray(x)
    if np.any((x_arr < 0) | (x_arr > params.m)):
        raise DomainError(f"count must satisfy 0 <= x <= m={params.m}")

    dist = _frozen_distribution(params)
    if dist is not None:
        out = np.asarray(dist.logpmf(x_arr), dtype=float)
    else:
        with np.errstate(divide="ignore"):
            if params.mu in (0.0, 1.0):
                target = 0 if params.mu == 0.0 else params.m
                out = np.where(x_arr == target, 0.0, -np.inf)
            else:
                out = np.full(x_arr.shape, -np.inf)
                out = np.where(x_arr == 0, np.log1p(-params.mu), out)
                out = np.where(x_arr == params.m, np.log(params.mu), out)
    return float(out) if out.ndim == 0 else out


def betabinomial_pmf(params: SequenceParams, x: ArrayLike) -> float | np.ndarray:
    """p(x | m, mu, rho) under the benchmark model."""
    return np.exp(betabinomial_logpmf(params, x))


def sampling_pmf(params: SequenceParams) -> np.ndarray:
    """Full PMF of X over x = 0..m."""
    return np.asarray(betabinomial_pmf(params, np.arange(params.m + 1)), dtype=float)


def benchmark_variance(params: SequenceParams) -> float:
    """Variance of mu_hat = X/m: mu(1-mu)[1/m + ((m-1)/m) rho]."""
    m = params.m
    return params.mu * (1.0 - params.mu) * (1.0 / m + (m - 1) / m * params.rho)


def variance_floor(mu: float, rho: float) -> float:
    """Limit of the benchmark variance as m grows: mu(1-mu)rho."""
    _check_unit("mu", mu)
    _check_unit("rho", rho)
    return mu * (1.0 - mu) * rho


def two_point_icc(mix: TwoPointMixture) -> float:
    """rho = delta^2 / (mu(1-mu)) for a symmetric two-point mixing law."""
    return mix.delta**2 / (mix.mu * (1.0 - mix.mu))


def two_point_variance(mix: TwoPointMixture) -> float:
    """Variance of phi under the two-point law, delta^2; equals the floor mu(1-mu)rho."""
    return mix.delta**2


def effective_sample_size(m: float, rho: float) -> float:
    """Number of exact replications with the same information: m/(1+(m-1)rho).

    Args:
        m: Number of replications; need not be an integer
        rho: Intraclass correlation in [0, 1]

    Returns:
        float: Effective size, tending to 1/rho as m grows

    Raises:
        DomainError: if m <= 0 or rho lies outside [0, 1]
    """
    if m <= 0:
        raise DomainError(f"m must be positive, got {m}")
    _check_unit("rho", rho)
    return m / (1.0 + (m - 1.0) * rho)


# ============== Operational Model ==============
def operational_variance(mu: float, rho: float, design: OperationalDesign) -> float:
    """Variance of mu_hat under the operational model.

    mu(1-mu)[(1-rho)/m^2 * sum(1/k_i) + rho/m]; non-increasing in every k_i.

    Args:
        mu: Mean replicability rate
        rho: Intraclass correlation
        design: Replications k_i per experiment

    Returns:
        float: Var(mu_hat)
    """
    _check_unit("mu", mu)
    _check_unit("rho", rho)
    m = design.m
    inv_k = float(np.sum(1.0 / np.asarray(design.k, dtype=float)))
    return mu * (1.0 - mu) * ((1.0 - rho) / m**2 * inv_k + rho / m)


def excess_variance(mu: float, rho: float, k: int, m: int) -> float:
    """Excess over the floor term at uniform finite k: mu(1-mu)(1-rho)/(m k)."""
    _check_unit("mu", mu)
    _check_unit("rho", rho)
    if k < 1 or m < 1:
        raise DomainError(f"k and m must be positive, got k={k}, m={m}")
    return mu * (1.0 - mu) * (1.0 - rho) / (m * k)


def operational_loglik(mu: float, rho: float, y: Sequence[int], design: OperationalDesign) -> float:
    """Log likelihood of per-experiment success counts y_i out of k_i.

    Each experiment contributes an independent Betabinomial(k_i, mu, rho)
    term. With every k_i = 1 the terms are Bernoulli(mu) and rho drops out.
    """
    y_arr = np.asarray(y, dtype=int)
    if y_arr.shape != (design.m,):
        raise DomainError(f"expected {design.m} counts, got {y_arr.shape[0] if y_arr.ndim else 0}")
    total = 0.0
    for yi, ki in zip(y_arr, design.k):
        total += float(betabinomial_logpmf(SequenceParams(mu=mu, rho=rho, m=ki), yi))
    return total


def bernoulli_loglik(mu: float, verdicts: Sequence[int]) -> float:
    """Product-Bernoulli log likelihood of binary verdicts."""
    _check_unit("mu", mu)
    v = np.asarray(verdicts, dtype=int)
    if np.any((v != 0) & (v != 1)):
        raise DomainError("verdicts must be 0 or 1")
    return float(np.sum(stats.bernoulli.logpmf(v, mu)))


# ============== Simulation ==============
def _draw_phi(mu: float, rho: float, size: int | tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
    if rho == 0.0 or mu in (0.0, 1.0):
        return np.full(size, mu)
    if rho == 1.0:
        return (rng.random(size) < mu).astype(float)
    shape = beta_shape_from_mean_icc(mu, rho)
    return rng.beta(shape.a, shape.b, size)


def simulate_benchmark(params: SequenceParams, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw `size` sequences: one phi per sequence, then X ~ Binomial(m, phi)."""
    phi = _draw_phi(params.mu, params.rho, size, rng)
    return rng.binomial(params.m, phi)


def simulate_operational(
    mu: float,
    rho: float,
    design: OperationalDesign,
    size: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw `size` sequences of per-experiment counts, shape (size, m)."""
    _check_unit("mu", mu)
    _check_unit("rho", rho)
    phi = _draw_phi(mu, rho, (size, design.m), rng)
    return rng.binomial(np.asarray(design.k)[None, :], phi)
