"""Forward maps from physical sources of non-exactness to (mu, rho).

Population heterogeneity: experiment i tests theta_i = theta + eps_i with
eps_i ~ N(0, sigma^2) and standard error SE, so phi_i = Phi(theta_i / SE)
averaged over the sampling noise gives mu = Phi(theta / sqrt(SE^2 + sigma^2)).

Stimulus delivery: lab i delivers u + delta_i / tau with delta_i / tau ~
N(b / tau, (sigma / tau)^2). In the large-n mapping phi_i = Phi(u + delta_i / tau);
at finite n, phi_i is the power of a one-sided exact binomial test.
"""

import bisect
import math
from functools import lru_cache
from typing import Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import special

from replirate.config import get_settings
from replirate.core.exceptions import DomainError, NonConvergenceError
from replirate.core.specfun import binomial_head, binomial_tail, bivariate_normal_cdf, normal_cdf
from replirate.utils.logger import get_logger

logger = get_logger(__name__)

# Midpoints between the rho values of the HDI panels A-F.
PANEL_THRESHOLDS = (0.025, 0.075, 0.125, 0.175, 0.225, 0.275)
PANEL_LABELS = ("~A", "B", "C", "D", "E", "F", ">F")
UNDEFINED_PANEL = "---"

EX1_THETAS = (2.5, 2.0, 1.0, 0.1)
EX1_SIGMAS = (0.25, 0.50, 0.75, 1.50)
EX2_BIASES = (1.5, 1.0, 0.5, 0.0, -0.5, -1.0, -1.5)
EX2_NOISES = (0.25, 0.50, 0.75, 1.50)

MAX_QUADRATURE_NODES = 8192


# ============== Domain Types ==============
class PopulationScenario(BaseModel):
    """Common effect theta, between-experiment SD sigma, within-experiment SE."""

    model_config = ConfigDict(frozen=True)

    theta: float
    sigma: float = Field(..., ge=0.0)
    se: float = Field(..., gt=0.0)


class DeliveryScenario(BaseModel):
    """Standardised stimulus u with delivery bias b/tau and noise sigma/tau."""

    model_config = ConfigDict(frozen=True)

    u: float = 1.0
    bias: float = 0.0
    noise: float = Field(default=0.0, ge=0.0)
    n: int | None = Field(default=None, ge=1, description="Per-experiment sample size; None is large-n")
    critical: float | None = Field(default=None, gt=0.0, lt=1.0, description="Rejection threshold on the success fraction")

    @model_validator(mode="after")
    def _critical_with_n(self) -> "DeliveryScenario":
        if self.n is not None and self.critical is None:
            raise ValueError("a finite-n scenario needs a critical value")
        return self

    def as_population(self) -> PopulationScenario:
        """The identical Example-1 scenario with theta = u + b/tau and SE = 1."""
        return PopulationScenario(theta=self.u + self.bias, sigma=self.noise, se=1.0)


class FiniteNResult(BaseModel):
    """(mu, rho) of the finite-n delivery map; rho is None where undefined."""

    mu: float
    rho: float | None
    critical_count: int
    alpha: float
    nodes: int


# ============== Panels ==============
def panel_label(rho: float | None) -> str:
    """HDI panel whose rho is nearest; exactly 0 is panel A."""
    if rho is None:
        return UNDEFINED_PANEL
    if rho == 0.0:
        return "A"
    return PANEL_LABELS[bisect.bisect_left(PANEL_THRESHOLDS, rho)]


def panel_range(lower: float, upper: float) -> str:
    """Panel span of a rho interval, e.g. ``D -- >F`` or ``>F``."""
    first, last = panel_label(lower), panel_label(upper)
    return first if first == last else f"{first} -- {last}"


# ============== Population Heterogeneity ==============
def _population_terms(s: PopulationScenario) -> tuple[float, float]:
    total = s.se**2 + s.sigma**2
    return s.theta / math.sqrt(total), s.sigma**2 / total


def ex1_mu(s: PopulationScenario) -> float:
    """mu = Phi(theta / sqrt(SE^2 + sigma^2))."""
    h, _ = _population_terms(s)
    return normal_cdf(h)


def ex1_variance(s: PopulationScenario) -> float:
    """Between-experiment variance of phi_i: Phi2(h, h; r) - mu^2."""
    if s.sigma == 0.0:
        return 0.0
    h, r = _population_terms(s)
    mu = normal_cdf(h)
    return bivariate_normal_cdf(h, h, r) - mu * mu


def ex1_rho(s: PopulationScenario) -> float:
    """Implied intraclass correlation (Phi2(h, h; r) - mu^2) / (mu(1 - mu))."""
    if s.sigma == 0.0:
        return 0.0
    mu = ex1_mu(s)
    spread = mu * (1.0 - mu)
    if spread <= 0.0:
        raise DomainError(f"mu={mu} leaves rho undefined")
    return ex1_variance(s) / spread


def ex1_se_from_n(sigma_s: float, n: int) -> float:
    """Within-experiment standard error sigma_s / sqrt(n)."""
    if sigma_s <= 0.0 or n < 1:
        raise DomainError(f"need sigma_s > 0 and n >= 1, got {sigma_s}, {n}")
    return sigma_s / math.sqrt(n)


def ex1_table(
    theta_list: Sequence[float] = EX1_THETAS,
    sigma_list: Sequence[float] = EX1_SIGMAS,
    se: float = 1.0,
) -> pd.DataFrame:
    """mu, implied rho and panel for every (theta, sigma) pair."""
    rows = []
    for sigma in sigma_list:
        for theta in theta_list:
            scenario = PopulationScenario(theta=theta, sigma=sigma, se=se)
            rho = ex1_rho(scenario)
            rows.append(
                {
                    "theta": theta,
                    "sigma": sigma,
                    "se": se,
                    "mu": ex1_mu(scenario),
                    "rho": rho,
                    "panel": panel_label(rho),
                }
            )
    logger.info(f"Population heterogeneity table: {len(rows)} cells at SE={se}")
    return pd.DataFrame(rows)


# ============== Stimulus Delivery ==============
def ex2_mu_largen(s: DeliveryScenario) -> float:
    """mu = Phi((u + b/tau) / sqrt(1 + (sigma/tau)^2))."""
    if s.n is not None:
        raise DomainError("large-n mapping requires n to be absent")
    return ex1_mu(s.as_population())


def ex2_rho_largen(s: DeliveryScenario) -> float:
    if s.n is not None:
        raise DomainError("large-n mapping requires n to be absent")
    return ex1_rho(s.as_population())


def critical_count(n: int, critical: float) -> int:
    """Smallest success count at which the test rejects: ceil(n c)."""
    return math.ceil(round(n * critical, 9))


@lru_cache(maxsize=16)
def _standard_normal_rule(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite nodes and weights for expectations under N(0, 1)."""
    x, w = special.roots_hermite(nodes)
    return math.sqrt(2.0) * x, w / math.sqrt(math.pi)


def _finite_n_moments(s: DeliveryScenario, c: int, nodes: int) -> tuple[float, float, float]:
    """(mu, 1 - mu, V(phi)) by Gauss-Hermite quadrature over delta."""
    z, w = _standard_normal_rule(nodes)
    p = normal_cdf(s.u + s.bias + s.noise * z)
    power = binomial_tail(s.n, c, p)
    miss = binomial_head(s.n, c, p)
    mu = float(w @ power)
    q = float(w @ miss)
    # centre on the side that is far from 1 to keep precision
    variance = float(w @ (power - mu) ** 2) if mu < 0.5 else float(w @ (miss - q) ** 2)
    return mu, q, variance


def _rho_from_moments(mu: float, q: float, variance: float, tol: float) -> float | None:
    if min(mu, q) < tol:
        return None
    return min(max(variance / (mu * q), 0.0), 1.0)


def ex2_finite_n(
    s: DeliveryScenario,
    nodes: int | None = None,
    tolerance: float | None = None,
) -> FiniteNResult:
    """(mu, rho) when phi_i is the power of the exact one-sided binomial test.

    The node count doubles until mu and rho change by at most `tolerance`.
    rho is None when min(mu, 1 - mu) falls below the configured threshold.

    Raises:
        DomainError: if the scenario has no sample size
        NonConvergenceError: if the result has not settled at the node cap
    """
    if s.n is None or s.critical is None:
        raise DomainError("finite-n mapping requires n and a critical value")
    settings = get_settings()
    nodes = nodes or settings.gh_nodes
    tolerance = tolerance if tolerance is not None else settings.gh_tolerance
    undefined = settings.undefined_rho_tolerance
    if s.noise == 0.0:
        nodes = 1

    c = critical_count(s.n, s.critical)
    alpha = float(binomial_tail(s.n, c, 0.5))

    mu, q, var = _finite_n_moments(s, c, nodes)
    rho = _rho_from_moments(mu, q, var, undefined)
    while s.noise > 0.0:
        doubled = nodes * 2
        if doubled > MAX_QUADRATURE_NODES:
            raise NonConvergenceError(
                f"Gauss-Hermite quadrature did not settle to {tolerance} "
                f"within {MAX_QUADRATURE_NODES} nodes (u={s.u}, b={s.bias}, noise={s.noise})"
            )
        mu2, q2, var2 = _finite_n_moments(s, c, doubled)
        rho2 = _rho_from_moments(mu2, q2, var2, undefined)
        settled = abs(mu2 - mu) <= tolerance and (
            (rho is None and rho2 is None)
            or (rho is not None and rho2 is not None and abs(rho2 - rho) <= tolerance)
        )
        if settled:
            break
        logger.debug(f"Doubling quadrature nodes to {doubled} for b={s.bias}, noise={s.noise}")
        nodes, mu, q, rho = doubled, mu2, q2, rho2

    return FiniteNResult(mu=mu, rho=rho, critical_count=c, alpha=alpha, nodes=nodes)


def ex2_table(
    u: float = 1.0,
    bias_list: Sequence[float] = EX2_BIASES,
    noise_list: Sequence[float] = EX2_NOISES,
    n: int = 100,
    critical: float = 0.59,
    nodes: int | None = None,
) -> pd.DataFrame:
    """Large-n and finite-n (mu, rho, panel) for every (bias, noise) cell."""
    rows = []
    for bias in bias_list:
        for noise in noise_list:
            large = DeliveryScenario(u=u, bias=bias, noise=noise)
            rho = ex2_rho_largen(large)
            rows.append(
                {
                    "bias": bias,
                    "noise": noise,
                    "mode": "large_n",
                    "n": None,
                    "mu": ex2_mu_largen(large),
                    "rho": rho,
                    "panel": panel_label(rho),
                }
            )
            finite = ex2_finite_n(
                DeliveryScenario(u=u, bias=bias, noise=noise, n=n, critical=critical), nodes=nodes
            )
            rows.append(
                {
                    "bias": bias,
                    "noise": noise,
                    "mode": f"n={n}",
                    "n": n,
                    "mu": finite.mu,
                    "rho": finite.rho,
                    "panel": panel_label(finite.rho),
                }
            )
    logger.info(f"Stimulus delivery table: {len(rows)} rows at u={u}, n={n}, c={critical}")
    return pd.DataFrame(rows)
