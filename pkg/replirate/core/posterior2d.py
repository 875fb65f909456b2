"""Grid inference on (mu, rho) from an aggregate replication count.

The likelihood of a count x out of m is the Betabinomial of the benchmark
model. Posteriors live on a midpoint grid over (0, 1) x (0, 1); the Jeffreys
prior is sqrt(det I) with I the Fisher information, computed by exact
summation over x of score outer products taken by central differences.
"""

from functools import lru_cache
from typing import Literal, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import stats

from replirate.config import get_settings
from replirate.core.exceptions import DomainError
from replirate.core.seqmodels import SequenceParams, betabinomial_logpmf
from replirate.utils.logger import get_logger

logger = get_logger(__name__)

# 0.01, 0.12, ..., 0.89 then 0.99
OVERLAP_MU_VALUES: tuple[float, ...] = tuple(round(0.01 + 0.11 * k, 2) for k in range(9)) + (0.99,)


# ============== Domain Types ==============
class PriorSpec(BaseModel):
    """Prior over the (mu, rho) grid."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["uniform", "jeffreys", "fixed_rho"]
    value: float | None = Field(default=None, ge=0.0, le=1.0, description="rho for fixed_rho")

    @model_validator(mode="after")
    def _value_matches_kind(self) -> "PriorSpec":
        if self.kind == "fixed_rho" and self.value is None:
            raise ValueError("fixed_rho prior needs a value")
        if self.kind != "fixed_rho" and self.value is not None:
            raise ValueError(f"{self.kind} prior takes no value")
        return self

    @classmethod
    def parse(cls, text: str) -> "PriorSpec":
        """Parse ``uniform``, ``jeffreys`` or ``fixed:<rho>``."""
        text = text.strip().lower()
        if text.startswith("fixed:"):
            try:
                value = float(text.split(":", 1)[1])
            except ValueError as e:
                raise DomainError(f"invalid fixed rho in prior '{text}'") from e
            return cls(kind="fixed_rho", value=value)
        if text in ("uniform", "jeffreys"):
            return cls(kind=text)
        raise DomainError(f"unknown prior '{text}'")

    @property
    def label(self) -> str:
        return f"fixed:{self.value}" if self.kind == "fixed_rho" else self.kind


class GridSpec(BaseModel):
    """Midpoint grid sizes and the finite-difference step."""

    model_config = ConfigDict(frozen=True)

    n_mu: int = Field(default=200, ge=2)
    n_rho: int = Field(default=200, ge=2)
    fisher_step: float = Field(default=1e-4, gt=0.0, lt=0.01)

    @classmethod
    def from_settings(cls) -> "GridSpec":
        settings = get_settings()
        return cls(n_mu=settings.grid_mu, n_rho=settings.grid_rho, fisher_step=settings.fisher_step)

    @property
    def mu_nodes(self) -> np.ndarray:
        return midpoint_nodes(self.n_mu)

    @property
    def rho_nodes(self) -> np.ndarray:
        return midpoint_nodes(self.n_rho)


class PosteriorGrid2D(BaseModel):
    """Normalised posterior masses on a (mu, rho) grid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mu_nodes: np.ndarray
    rho_nodes: np.ndarray
    mass: np.ndarray

    @model_validator(mode="after")
    def _consistent(self) -> "PosteriorGrid2D":
        if self.mass.shape != (self.mu_nodes.size, self.rho_nodes.size):
            raise ValueError("mass shape does not match node lists")
        if abs(float(self.mass.sum()) - 1.0) > 1e-9:
            raise ValueError("posterior masses must sum to 1")
        return self


def midpoint_nodes(n: int) -> np.ndarray:
    """Centres of n equal cells on (0, 1), exactly mirror-symmetric."""
    nodes = (np.arange(n) + 0.5) / n
    upper = np.arange(n) >= n / 2
    nodes[upper] = 1.0 - nodes[::-1][upper]
    return nodes


# ============== Likelihood ==============
def _loglik_cube(m: int, mu: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """log p(x | mu, rho, m), shape (len(mu), len(rho), m + 1)."""
    nu = ((1.0 - rho) / rho)[None, :, None]
    a = mu[:, None, None] * nu
    b = (1.0 - mu)[:, None, None] * nu
    x = np.arange(m + 1)[None, None, :]
    return stats.betabinom.logpmf(x, m, a, b)


def _fixed_rho_loglik(m: int, mu: np.ndarray, rho: float) -> np.ndarray:
    """log p(x | mu, rho, m) at one rho, shape (len(mu), 1, m + 1)."""
    x = np.arange(m + 1)
    rows = [betabinomial_logpmf(SequenceParams(mu=float(v), rho=rho, m=m), x) for v in mu]
    return np.asarray(rows, dtype=float)[:, None, :]


def fisher_information_grid(
    m: int,
    mu_nodes: Sequence[float],
    rho_nodes: Sequence[float],
    step: float = 1e-4,
) -> np.ndarray:
    """2x2 Fisher information of the Betabinomial at every grid node.

    Returns:
        Array of shape (len(mu_nodes), len(rho_nodes), 2, 2), ordered (mu, rho)
    """
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    mu = np.asarray(mu_nodes, dtype=float)
    rho = np.asarray(rho_nodes, dtype=float)
    for name, nodes in (("mu", mu), ("rho", rho)):
        if np.any(nodes - step <= 0.0) or np.any(nodes + step >= 1.0):
            raise DomainError(f"{name} nodes must lie at least one step inside (0, 1)")

    prob = np.exp(_loglik_cube(m, mu, rho))
    score_mu = (_loglik_cube(m, mu + step, rho) - _loglik_cube(m, mu - step, rho)) / (2.0 * step)
    score_rho = (_loglik_cube(m, mu, rho + step) - _loglik_cube(m, mu, rho - step)) / (2.0 * step)

    info = np.empty(mu.shape + rho.shape + (2, 2))
    info[..., 0, 0] = np.sum(prob * score_mu * score_mu, axis=-1)
    info[..., 1, 1] = np.sum(prob * score_rho * score_rho, axis=-1)
    info[..., 0, 1] = info[..., 1, 0] = np.sum(prob * score_mu * score_rho, axis=-1)
    return info


def jeffreys_prior_grid(
    m: int,
    mu_nodes: Sequence[float],
    rho_nodes: Sequence[float],
    step: float = 1e-4,
) -> np.ndarray:
    """sqrt(det I(mu, rho)) on the grid, normalised to sum to 1.

    Raises:
        DomainError: for m < 2, where rho is not identified and det I = 0
    """
    if m < 2:
        raise DomainError("Jeffreys prior is degenerate for m < 2: rho is not identified")
    info = fisher_information_grid(m, mu_nodes, rho_nodes, step)
    det = info[..., 0, 0] * info[..., 1, 1] - info[..., 0, 1] ** 2
    prior = np.sqrt(np.clip(det, 0.0, None))
    total = prior.sum()
    if not np.isfinite(total) or total <= 0.0:
        raise DomainError("Jeffreys prior could not be normalised on this grid")
    return prior / total


@lru_cache(maxsize=8)
def _cached_jeffreys(m: int, n_mu: int, n_rho: int, step: float) -> np.ndarray:
    logger.info(f"Computing Jeffreys prior for m={m} on a {n_mu}x{n_rho} grid")
    prior = jeffreys_prior_grid(m, midpoint_nodes(n_mu), midpoint_nodes(n_rho), step)
    prior.setflags(write=False)
    return prior


# ============== Posterior ==============
def _prior_and_loglik(
    m: int, prior: PriorSpec, grid: GridSpec
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    mu = grid.mu_nodes
    if prior.kind == "fixed_rho":
        rho = np.array([prior.value])
        weights = np.ones((mu.size, 1))
        loglik = _fixed_rho_loglik(m, mu, prior.value)
    else:
        rho = grid.rho_nodes
        if prior.kind == "jeffreys":
            weights = _cached_jeffreys(m, grid.n_mu, grid.n_rho, grid.fisher_step)
        else:
            weights = np.ones((mu.size, rho.size))
        loglik = _loglik_cube(m, mu, rho)
    return mu, rho, weights, loglik


def _normalise(loglik: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Posterior masses from a log-likelihood slab and prior weights."""
    peak = np.max(loglik, axis=(0, 1), keepdims=True)
    if not np.all(np.isfinite(peak)):
        raise DomainError("observed count has zero likelihood everywhere on the grid")
    with np.errstate(under="ignore"):
        unnorm = np.exp(loglik - peak) * weights[..., None]
    return unnorm / unnorm.sum(axis=(0, 1), keepdims=True)


def _check_count(x: int, m: int) -> None:
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    if not 0 <= x <= m:
        raise DomainError(f"count must satisfy 0 <= x <= m, got x={x}, m={m}")


def joint_posterior(x: int, m: int, prior: PriorSpec, grid: GridSpec | None = None) -> PosteriorGrid2D:
    """p(mu, rho | x, m) on the grid.

    A fixed_rho prior collapses the rho axis to that single node.
    """
    _check_count(x, m)
    grid = grid or GridSpec.from_settings()
    mu, rho, weights, loglik = _prior_and_loglik(m, prior, grid)
    mass = _normalise(loglik[:, :, x : x + 1], weights)[:, :, 0]
    logger.debug(f"Posterior for x={x}, m={m}, prior={prior.label}")
    return PosteriorGrid2D(mu_nodes=mu, rho_nodes=rho, mass=mass)


def all_mu_marginals(m: int, prior: PriorSpec, grid: GridSpec | None = None) -> np.ndarray:
    """mu-marginals for every possible count, shape (m + 1, n_mu)."""
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    grid = grid or GridSpec.from_settings()
    _, _, weights, loglik = _prior_and_loglik(m, prior, grid)
    return _normalise(loglik, weights).sum(axis=1).T


def marginal_mu(post: PosteriorGrid2D) -> np.ndarray:
    """Posterior masses over the mu nodes, summed across rho."""
    return post.mass.sum(axis=1)


def conditional_density(post: PosteriorGrid2D) -> np.ndarray:
    """mu-marginal expressed as a density: mass divided by the node spacing."""
    step = 1.0 / post.mu_nodes.size
    return marginal_mu(post) / step


def overlap(p: Sequence[float], q: Sequence[float]) -> float:
    """Shared probability mass sum(min(p_i, q_i)); equals 1 - total variation."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise DomainError(f"mass vectors differ in shape: {p.shape} vs {q.shape}")
    return float(np.minimum(p, q).sum())


def overlap_counts(mu_values: Sequence[float], m: int) -> list[int]:
    """Counts x = round(m mu) used for each mu in an overlap matrix."""
    return [int(np.rint(m * mu)) for mu in mu_values]


def overlap_matrix(
    mu_values: Sequence[float],
    m: int,
    prior: PriorSpec,
    grid: GridSpec | None = None,
) -> np.ndarray:
    """Pairwise overlaps of mu-marginals at x = round(m mu); diagonal is 1."""
    if len(mu_values) == 0:
        raise DomainError("mu_values must not be empty")
    for mu in mu_values:
        if not 0.0 <= mu <= 1.0:
            raise DomainError(f"mu values must lie in [0, 1], got {mu}")
    marginals = all_mu_marginals(m, prior, grid)
    counts = overlap_counts(mu_values, m)

    size = len(mu_values)
    matrix = np.ones((size, size))
    for i in range(size):
        for j in range(i + 1, size):
            matrix[i, j] = matrix[j, i] = overlap(marginals[counts[i]], marginals[counts[j]])
    logger.info(
        f"Overlap matrix ({prior.label}, m={m}): minimum {matrix.min():.3f} over {size} values"
    )
    return matrix


def overlap_frame(mu_values: Sequence[float], matrix: np.ndarray) -> pd.DataFrame:
    """Long (mu_i, mu_j, overlap) layout of an overlap matrix."""
    rows = [
        {"mu_i": float(mu_i), "mu_j": float(mu_j), "overlap": float(matrix[i, j])}
        for i, mu_i in enumerate(mu_values)
        for j, mu_j in enumerate(mu_values)
    ]
    return pd.DataFrame(rows, columns=["mu_i", "mu_j", "overlap"])


def expected_overlap(
    mu_i: float,
    mu_j: float,
    m: int,
    prior: PriorSpec,
    grid: GridSpec | None = None,
    cutoff: float = 1e-12,
) -> float:
    """Overlap averaged over x_i ~ Binomial(m, mu_i) and x_j ~ Binomial(m, mu_j).

    Counts with probability below `cutoff` are dropped and the remaining
    weights renormalised.

    The overlap at x = round(m mu) usually lies below this average, but not
    for every pair: at m = 100 the extreme pair (0.01, 0.99) and the
    neighbouring pair (0.45, 0.56) sit above it.

    Args:
        mu_i: True rate of the first sequence
        mu_j: True rate of the second sequence
        m: Replications per sequence
        prior: Prior over the (mu, rho) grid
        grid: Grid sizes; settings when omitted
        cutoff: Smallest Binomial weight kept

    Returns:
        float: Expected overlap of the two mu-marginals
    """
    marginals = all_mu_marginals(m, prior, grid)
    support = np.arange(m + 1)
    w_i = stats.binom.pmf(support, m, mu_i)
    w_j = stats.binom.pmf(support, m, mu_j)
    keep_i = np.flatnonzero(w_i >= cutoff)
    keep_j = np.flatnonzero(w_j >= cutoff)

    total = 0.0
    for a in keep_i:
        shared = np.minimum(marginals[a][None, :], marginals[keep_j]).sum(axis=1)
        total += w_i[a] * float(shared @ w_j[keep_j])
    return total / (w_i[keep_i].sum() * w_j[keep_j].sum())
