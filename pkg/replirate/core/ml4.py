"""Effect-size reanalysis: Hedges' g, Normal-Inverse-Gamma posterior, and
Monte Carlo propagation of (theta, sigma^2) draws to (mu, rho).

Site effects are modelled as g_i ~ N(theta, sigma^2). For each posterior
draw s, site effects theta_i ~ N(theta_s, sigma2_s) are mapped to
phi_i = Phi(theta_i / SE_i), giving mu_s = mean(phi) and
rho_s = var(phi) / (mu_s (1 - mu_s)).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Callable, Literal, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from scipy import stats

from replirate.config import get_settings
from replirate.core.discrim import HdiInterval
from replirate.core.exceptions import (
    DataFileError,
    DomainError,
    ImproperPosteriorError,
    InsufficientDrawsError,
)
from replirate.core.hetero import panel_range
from replirate.core.specfun import bivariate_normal_cdf, normal_cdf
from replirate.utils.logger import LoggerMixin, get_logger

logger = get_logger(__name__)

MIN_HDI_DRAWS = 1000
ANALYTIC_CHUNK = 10_000
SAMPLE_STREAM = 0
PROPAGATION_STREAM = 1

GROUPS: dict[str, tuple[str, ...]] = {
    "aa": ("AA",),
    "ih": ("IH",),
    "aa+ref": ("AA", "REFERENCE"),
    "ih+ref": ("IH", "REFERENCE"),
    "ml4": ("AA", "IH"),
    "ml4+ref": ("AA", "IH", "REFERENCE"),
}


# ============== Domain Types ==============
class Protocol(str, Enum):
    """Study protocol of a record; REFERENCE marks the original study."""

    AA = "AA"
    IH = "IH"
    REFERENCE = "REFERENCE"


class EffectSizeRecord(BaseModel):
    """One study: Hedges' g with its two group sizes."""

    model_config = ConfigDict(frozen=True)

    site_id: str
    g: float
    n1: int = Field(..., ge=2)
    n2: int = Field(..., ge=2)
    protocol: Protocol


class SufficientStats(BaseModel):
    """(m, mean g, sum of squared deviations) of a set of effect sizes."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(..., ge=1)
    mean_g: float
    ss: float = Field(..., ge=0.0)

    @classmethod
    def from_values(cls, g: Sequence[float]) -> "SufficientStats":
        values = np.asarray(g, dtype=float)
        if values.size == 0:
            raise DomainError("no effect sizes supplied")
        mean = float(values.mean())
        return cls(m=values.size, mean_g=mean, ss=float(np.sum((values - mean) ** 2)))

    @classmethod
    def from_summary(cls, m: int, mean_g: float, sd_g: float) -> "SufficientStats":
        """From a reported mean and sample SD: ss = (m - 1) sd^2."""
        return cls(m=m, mean_g=mean_g, ss=(m - 1) * sd_g**2)


class NigHyper(BaseModel):
    """theta | sigma^2 ~ N(mu0, sigma^2/kappa0), sigma^2 ~ Inv-Gamma(alpha0, beta0)."""

    model_config = ConfigDict(frozen=True)

    mu0: float = 0.0
    kappa0: float = Field(default=0.0, ge=0.0)
    alpha0: float = Field(default=0.0, ge=0.0)
    beta0: float = Field(default=0.0, ge=0.0)

    @property
    def is_jeffreys(self) -> bool:
        return self.kappa0 == 0.0 and self.alpha0 == 0.0 and self.beta0 == 0.0

    @classmethod
    def parse(cls, name: str) -> "NigHyper":
        name = name.strip().lower()
        if name not in NIG_PRIORS:
            raise DomainError(f"unknown prior '{name}', expected one of {sorted(NIG_PRIORS)}")
        return NIG_PRIORS[name]


NIG_PRIORS: dict[str, NigHyper] = {
    "jeffreys": NigHyper(),
    "weak": NigHyper(mu0=0.0, kappa0=1.0, alpha0=1.0, beta0=1.0),
}


class NigPosterior(BaseModel):
    """Normal-Inverse-Gamma posterior hyperparameters of (theta, sigma^2)."""

    model_config = ConfigDict(frozen=True)

    kappa_n: float = Field(..., gt=0.0)
    mu_n: float
    alpha_n: float = Field(..., gt=0.0)
    beta_n: float = Field(..., gt=0.0)

    def theta_marginal(self):
        """Student-t marginal of theta: 2 alpha_n df, scale sqrt(beta_n/(alpha_n kappa_n))."""
        scale = math.sqrt(self.beta_n / (self.alpha_n * self.kappa_n))
        return stats.t(df=2.0 * self.alpha_n, loc=self.mu_n, scale=scale)


class NigDraws(BaseModel):
    """Joint posterior draws of the common effect theta and the site variance sigma^2."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    theta: np.ndarray
    sigma2: np.ndarray
    seed: int


class MuRhoDraws(BaseModel):
    """Posterior draws of (mu, rho); rho is NaN where rho_defined is False."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mu: np.ndarray
    rho: np.ndarray
    rho_defined: np.ndarray
    seed: int
    clamped_fraction: float = 0.0
    mapping: Literal["simulate", "delta"] = "simulate"

    @model_validator(mode="after")
    def _aligned(self) -> "MuRhoDraws":
        if not (self.mu.shape == self.rho.shape == self.rho_defined.shape):
            raise ValueError("mu, rho and mask must have the same length")
        return self

    @property
    def S(self) -> int:
        """Number of draws."""
        return int(self.mu.size)

    @property
    def defined_rho(self) -> np.ndarray:
        return self.rho[self.rho_defined]


class ContrastSummary(BaseModel):
    """Posterior of the difference in rho between two groups."""

    mean_diff: float
    interval: HdiInterval
    exceedance: float = Field(..., ge=0.0, le=1.0, description="P(b > a), ties counted one half")
    pairs: int


class PosteriorSummary(BaseModel):
    """Posterior means and HDIs of (mu, rho) for one group and prior."""

    group: str
    prior: str
    m: int
    mu_mean: float
    mu_hdi_lo: float
    mu_hdi_hi: float
    rho_mean: float
    rho_hdi_lo: float
    rho_hdi_hi: float
    panel_range: str
    S: int
    seed: int
    clamped_fraction: float
    undefined_rho_draws: int


# ============== Effect Sizes ==============
def hedges_correction(n1: int, n2: int) -> float:
    """Small-sample factor J = 1 - 3/(4 nu - 1), nu = n1 + n2 - 2."""
    nu = n1 + n2 - 2
    if nu < 1:
        raise DomainError(f"degrees of freedom n1 + n2 - 2 must be at least 1, got {nu}")
    return 1.0 - 3.0 / (4.0 * nu - 1.0)


def hedges_from_cohen(d: float, n1: int, n2: int) -> float:
    """Convert Cohen's d to Hedges' g.

    Args:
        d: Standardised mean difference with the pooled SD
        n1: Size of the first group
        n2: Size of the second group

    Returns:
        float: d scaled by the small-sample factor J
    """
    return hedges_correction(n1, n2) * d


def standard_error(g: float, n1: int, n2: int) -> float:
    """sqrt((n1 + n2)/(n1 n2) + g^2 / (2 (n1 + n2 - 2)))."""
    if n1 < 1 or n2 < 1 or n1 + n2 < 3:
        raise DomainError(f"invalid group sizes n1={n1}, n2={n2}")
    return math.sqrt((n1 + n2) / (n1 * n2) + g * g / (2.0 * (n1 + n2 - 2)))


def se_hedges(rec: EffectSizeRecord) -> float:
    """Standard error of Hedges' g for a two-group study."""
    return standard_error(rec.g, rec.n1, rec.n2)


# ============== Conjugate Posterior ==============
def nig_update(stats_: SufficientStats, hyper: NigHyper) -> NigPosterior:
    """Conjugate Normal-Inverse-Gamma update.

    The Jeffreys limit (kappa0 = alpha0 = beta0 = 0) centres on the sample
    mean and is proper only for m >= 2 with nonzero spread.

    Args:
        stats_: Sufficient statistics of the site effect sizes
        hyper: Prior hyperparameters

    Returns:
        NigPosterior: Updated hyperparameters

    Raises:
        ImproperPosteriorError: Jeffreys prior with m < 2 or ss = 0
    """
    m = stats_.m
    if hyper.is_jeffreys:
        if m < 2:
            raise ImproperPosteriorError(f"Jeffreys posterior is improper for m={m} < 2")
        if stats_.ss <= 0.0:
            raise ImproperPosteriorError("Jeffreys posterior is improper when all effect sizes coincide")
        return NigPosterior(kappa_n=float(m), mu_n=stats_.mean_g, alpha_n=m / 2.0, beta_n=stats_.ss / 2.0)

    kappa_n = hyper.kappa0 + m
    mu_n = (hyper.kappa0 * hyper.mu0 + m * stats_.mean_g) / kappa_n
    alpha_n = hyper.alpha0 + m / 2.0
    beta_n = (
        hyper.beta0
        + stats_.ss / 2.0
        + hyper.kappa0 * m * (stats_.mean_g - hyper.mu0) ** 2 / (2.0 * kappa_n)
    )
    if beta_n <= 0.0:
        raise ImproperPosteriorError("posterior scale beta_n is zero")
    return NigPosterior(kappa_n=kappa_n, mu_n=mu_n, alpha_n=alpha_n, beta_n=beta_n)


# ============== Monte Carlo ==============
def _chunk_sizes(total: int, chunk_size: int) -> list[int]:
    full, rest = divmod(total, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _run_chunks(
    worker: Callable[[np.random.Generator, int, int], tuple[np.ndarray, ...]],
    total: int,
    seed: int,
    stream: int,
    chunk_size: int,
    workers: int,
) -> tuple[np.ndarray, ...]:
    """Run `worker(rng, offset, size)` over fixed-size chunks and concatenate.

    Each chunk owns a child SeedSequence, so results do not depend on the
    number of worker threads.
    """
    sizes = _chunk_sizes(total, chunk_size)
    children = np.random.SeedSequence(seed, spawn_key=(stream,)).spawn(len(sizes))
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(int)
    jobs = [
        (np.random.default_rng(child), int(offset), size)
        for child, offset, size in zip(children, offsets, sizes)
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: worker(*job), jobs))
    else:
        parts = [worker(*job) for job in jobs]
    return tuple(np.concatenate(column) for column in zip(*parts))


def nig_sample(
    post: NigPosterior,
    S: int,
    seed: int,
    chunk_size: int | None = None,
    workers: int | None = None,
) -> NigDraws:
    """Direct draws sigma^2 ~ Inv-Gamma(alpha_n, beta_n), theta | sigma^2 ~ N(mu_n, sigma^2/kappa_n)."""
    if S < 1:
        raise DomainError(f"number of draws must be positive, got {S}")
    settings = get_settings()

    def draw(rng: np.random.Generator, _offset: int, size: int) -> tuple[np.ndarray, np.ndarray]:
        sigma2 = 1.0 / rng.gamma(post.alpha_n, 1.0 / post.beta_n, size)
        theta = rng.normal(post.mu_n, np.sqrt(sigma2 / post.kappa_n))
        return theta, sigma2

    theta, sigma2 = _run_chunks(
        draw,
        S,
        seed,
        SAMPLE_STREAM,
        chunk_size or settings.mc_chunk_size,
        workers or settings.workers,
    )
    logger.debug(f"Drew {S} (theta, sigma2) pairs with seed {seed}")
    return NigDraws(theta=theta, sigma2=sigma2, seed=seed)


def _finish_rho(mu: np.ndarray, variance: np.ndarray, seed: int, mapping: str) -> MuRhoDraws:
    spread = mu * (1.0 - mu)
    defined = spread > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = np.where(defined, variance / spread, np.nan)
    clamped = defined & ((raw > 1.0) | (raw < 0.0))
    rho = np.where(defined, np.clip(raw, 0.0, 1.0), np.nan)

    clamped_fraction = float(clamped.mean()) if mu.size else 0.0
    undefined = int((~defined).sum())
    if undefined:
        logger.info(f"{undefined} draws have mu in {{0, 1}}; rho left undefined for them")
    if clamped_fraction > get_settings().clamp_warning_fraction:
        logger.warning(f"{clamped_fraction:.4%} of rho draws clamped to [0, 1]")
    return MuRhoDraws(
        mu=mu,
        rho=rho,
        rho_defined=defined,
        seed=seed,
        clamped_fraction=clamped_fraction,
        mapping=mapping,
    )


def _check_se(se_list: Sequence[float]) -> np.ndarray:
    se = np.asarray(se_list, dtype=float)
    if se.ndim != 1 or se.size < 2:
        raise DomainError("need standard errors for at least two sites")
    if np.any(se <= 0.0) or not np.all(np.isfinite(se)):
        raise DomainError("standard errors must be positive and finite")
    return se


def propagate_mu_rho(
    draws: NigDraws,
    se_list: Sequence[float],
    seed: int,
    ddof: int | None = None,
    chunk_size: int | None = None,
    workers: int | None = None,
) -> MuRhoDraws:
    """Simulate m site effects per posterior draw and map them to (mu, rho).

    The per-draw site variance uses `ddof` (default from settings); rho is
    clamped to [0, 1] and left undefined where mu is exactly 0 or 1.
    """
    se = _check_se(se_list)
    settings = get_settings()
    ddof = settings.rho_ddof if ddof is None else ddof
    if ddof >= se.size:
        raise DomainError(f"ddof={ddof} leaves no degrees of freedom for {se.size} sites")

    def simulate(rng: np.random.Generator, offset: int, size: int) -> tuple[np.ndarray, np.ndarray]:
        theta = draws.theta[offset : offset + size, None]
        sd = np.sqrt(draws.sigma2[offset : offset + size, None])
        site = theta + sd * rng.standard_normal((size, se.size))
        phi = normal_cdf(site / se[None, :])
        return phi.mean(axis=1), phi.var(axis=1, ddof=ddof)

    mu, variance = _run_chunks(
        simulate,
        draws.theta.size,
        seed,
        PROPAGATION_STREAM,
        chunk_size or settings.mc_chunk_size,
        workers or settings.workers,
    )
    return _finish_rho(mu, variance, seed, "simulate")


def propagate_mu_rho_analytic(draws: NigDraws, se_list: Sequence[float]) -> MuRhoDraws:
    """Closed-form mapping: integrates the site effects out of every draw.

    For draw s and site i, E[phi_i] = Phi(h_i) and E[phi_i^2] = Phi2(h_i, h_i; r_i)
    with h_i = theta/sqrt(SE_i^2 + sigma^2), r_i = sigma^2/(SE_i^2 + sigma^2).
    """
    se = _check_se(se_list)
    mu_parts, var_parts = [], []
    for start in range(0, draws.theta.size, ANALYTIC_CHUNK):
        theta = draws.theta[start : start + ANALYTIC_CHUNK, None]
        sigma2 = draws.sigma2[start : start + ANALYTIC_CHUNK, None]
        total = se[None, :] ** 2 + sigma2
        h = theta / np.sqrt(total)
        r = sigma2 / total
        first = normal_cdf(h)
        second = bivariate_normal_cdf(h, h, r)
        mu = first.mean(axis=1)
        mu_parts.append(mu)
        var_parts.append(second.mean(axis=1) - mu * mu)
    return _finish_rho(np.concatenate(mu_parts), np.concatenate(var_parts), draws.seed, "delta")


# ============== Summaries ==============
def hdi_continuous(draws: Sequence[float], level: float = 0.95) -> HdiInterval:
    """Shortest window holding ceil(level S) of the sorted draws.

    NaN draws are ignored.

    Raises:
        InsufficientDrawsError: with fewer than 1000 usable draws
    """
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    values = np.asarray(draws, dtype=float)
    values = np.sort(values[~np.isnan(values)])
    size = values.size
    if size < MIN_HDI_DRAWS:
        raise InsufficientDrawsError(f"need at least {MIN_HDI_DRAWS} draws, got {size}")

    count = math.ceil(level * size)
    widths = values[count - 1 :] - values[: size - count + 1]
    start = int(np.argmin(widths))
    return HdiInterval(
        level=level,
        lower=float(values[start]),
        upper=float(values[start + count - 1]),
        attained_mass=count / size,
    )


def group_contrast(
    draws_a: MuRhoDraws,
    draws_b: MuRhoDraws,
    level: float = 0.95,
) -> ContrastSummary:
    """Posterior of rho_b - rho_a, pairing independent draws by index."""
    if draws_a.S != draws_b.S:
        raise DomainError(f"draw counts differ: {draws_a.S} vs {draws_b.S}")
    both = draws_a.rho_defined & draws_b.rho_defined
    diff = draws_b.rho[both] - draws_a.rho[both]
    interval = hdi_continuous(diff, level)
    exceedance = float(np.mean(diff > 0.0) + 0.5 * np.mean(diff == 0.0))
    return ContrastSummary(
        mean_diff=float(diff.mean()),
        interval=interval,
        exceedance=exceedance,
        pairs=int(diff.size),
    )


def summarize_draws(
    draws: MuRhoDraws,
    group: str,
    prior: str,
    m: int,
    level: float = 0.95,
) -> PosteriorSummary:
    """Collapse (mu, rho) draws into posterior means and HDIs.

    Draws with undefined rho are left out of the rho summary and counted
    separately.

    Args:
        draws: Propagated posterior draws
        group: Group name written to the summary
        prior: Prior name written to the summary
        m: Number of sites behind the draws
        level: HDI probability

    Returns:
        PosteriorSummary: One output row
    """
    mu_hdi = hdi_continuous(draws.mu, level)
    rho = draws.defined_rho
    rho_hdi = hdi_continuous(rho, level)
    return PosteriorSummary(
        group=group,
        prior=prior,
        m=m,
        mu_mean=float(draws.mu.mean()),
        mu_hdi_lo=mu_hdi.lower,
        mu_hdi_hi=mu_hdi.upper,
        rho_mean=float(rho.mean()),
        rho_hdi_lo=rho_hdi.lower,
        rho_hdi_hi=rho_hdi.upper,
        panel_range=panel_range(rho_hdi.lower, rho_hdi.upper),
        S=draws.S,
        seed=draws.seed,
        clamped_fraction=draws.clamped_fraction,
        undefined_rho_draws=int((~draws.rho_defined).sum()),
    )


# ============== Data Ingestion ==============
def _read_csv(path: Path | str) -> pd.DataFrame:
    try:
        return pd.read_csv(path, comment="#", skipinitialspace=True)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataFileError(f"cannot read {path}: {e}") from e


def load_records(path: Path | str) -> list[EffectSizeRecord]:
    """Read study records with columns site_id, n1, n2, protocol and g or d.

    Rows giving Cohen's d (and no g) are converted with the Hedges factor.
    """
    frame = _read_csv(path)
    frame.columns = [c.strip().lower() for c in frame.columns]
    missing = {"site_id", "n1", "n2", "protocol"} - set(frame.columns)
    if missing or not ({"g", "d"} & set(frame.columns)):
        raise DataFileError(
            f"{path}: expected columns site_id, n1, n2, protocol and g or d; missing {sorted(missing) or ['g/d']}"
        )

    records = []
    for row in frame.itertuples(index=False):
        g = getattr(row, "g", float("nan"))
        try:
            n1, n2 = int(row.n1), int(row.n2)
            if pd.isna(g):
                g = hedges_from_cohen(float(row.d), n1, n2)
            records.append(
                EffectSizeRecord(
                    site_id=str(row.site_id),
                    g=float(g),
                    n1=n1,
                    n2=n2,
                    protocol=str(row.protocol).strip().upper(),
                )
            )
        except (ValidationError, ValueError, AttributeError) as e:
            raise DomainError(f"{path}: invalid record for site {row.site_id}: {e}") from e
    logger.info(f"Loaded {len(records)} effect-size records from {path}")
    return records


def load_summary(path: Path | str) -> dict[str, SufficientStats]:
    """Read group summaries with columns group, m, mean_g, sd_g."""
    frame = _read_csv(path)
    frame.columns = [c.strip().lower() for c in frame.columns]
    missing = {"group", "m", "mean_g", "sd_g"} - set(frame.columns)
    if missing:
        raise DataFileError(f"{path}: missing columns {sorted(missing)}")
    summaries = {}
    for row in frame.itertuples(index=False):
        try:
            summaries[str(row.group).strip().lower()] = SufficientStats.from_summary(
                int(row.m), float(row.mean_g), float(row.sd_g)
            )
        except (ValidationError, ValueError) as e:
            raise DomainError(f"{path}: invalid summary for group {row.group}: {e}") from e
    return summaries


def bundled_path(name: str) -> Path:
    """Path of a data file shipped with the package."""
    return Path(str(resources.files("replirate.data").joinpath(name)))


def expand_groups(groups: str) -> list[str]:
    """``all`` or a comma-separated list of group names."""
    names = list(GROUPS) if groups.strip().lower() == "all" else [g.strip().lower() for g in groups.split(",")]
    unknown = [g for g in names if g not in GROUPS]
    if unknown:
        raise DomainError(f"unknown group(s) {unknown}; expected 'all' or any of {list(GROUPS)}")
    return names


def select_group(records: Sequence[EffectSizeRecord], group: str) -> list[EffectSizeRecord]:
    """Records whose protocol belongs to `group` (see GROUPS)."""
    protocols = GROUPS[group]
    return [rec for rec in records if rec.protocol.value in protocols]


# ============== Pipeline ==============
class Ml4Pipeline(LoggerMixin):
    """End-to-end posterior of (mu, rho) for groups of effect sizes."""

    def __init__(
        self,
        draws: int | None = None,
        seed: int | None = None,
        level: float | None = None,
        mapping: Literal["simulate", "delta"] = "simulate",
    ) -> None:
        settings = get_settings()
        self.S = draws or settings.mc_draws
        self.seed = settings.mc_seed if seed is None else seed
        self.level = level or settings.hdi_level
        self.mapping = mapping
        self.logger.info(
            f"Pipeline initialised - S={self.S}, seed={self.seed}, "
            f"level={self.level}, mapping={self.mapping}"
        )

    def draws_for(self, stats_: SufficientStats, se_list: Sequence[float], prior: str) -> MuRhoDraws:
        """Posterior update, NIG sampling and propagation to (mu, rho) with this pipeline's seed."""
        posterior = nig_update(stats_, NigHyper.parse(prior))
        sample = nig_sample(posterior, self.S, self.seed)
        if self.mapping == "delta":
            return propagate_mu_rho_analytic(sample, se_list)
        return propagate_mu_rho(sample, se_list, self.seed)

    def run_records(
        self, records: Sequence[EffectSizeRecord], group: str, prior: str
    ) -> tuple[PosteriorSummary, MuRhoDraws]:
        """Summarise one group of site records under one prior.

        Args:
            records: All ingested records
            group: Group name, one of GROUPS
            prior: `jeffreys` or `weak`

        Returns:
            tuple: The summary row and the underlying draws

        Raises:
            DomainError: if the group holds fewer than two records
        """
        chosen = select_group(records, group)
        if len(chosen) < 2:
            raise DomainError(f"group '{group}' has {len(chosen)} record(s); need at least 2")
        stats_ = SufficientStats.from_values([rec.g for rec in chosen])
        se_list = [se_hedges(rec) for rec in chosen]
        draws = self.draws_for(stats_, se_list, prior)
        summary = summarize_draws(draws, group, prior, stats_.m, self.level)
        self.logger.info(
            f"{group}/{prior}: mu={summary.mu_mean:.3f}, rho={summary.rho_mean:.3f} "
            f"[{summary.rho_hdi_lo:.3f}, {summary.rho_hdi_hi:.3f}]"
        )
        return summary, draws

    def run_summary(
        self, stats_: SufficientStats, group: str, prior: str, se: float = 1.0
    ) -> tuple[PosteriorSummary, MuRhoDraws]:
        """Sufficient statistics only: every site shares the standard error `se`."""
        draws = self.draws_for(stats_, [se] * stats_.m, prior)
        summary = summarize_draws(draws, group, prior, stats_.m, self.level)
        self.logger.info(f"{group}/{prior} (summary input, SE={se}): rho={summary.rho_mean:.3f}")
        return summary, draws
