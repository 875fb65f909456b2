"""Special functions and distribution kernels.

Everything here is a pure function over floats or numpy arrays. The
bivariate normal CDF follows Genz's port of the Drezner-Wesolowsky scheme
(Gauss-Legendre quadrature on the asin-transformed correlation, with a
separate expansion for |r| >= 0.925).
"""

import math

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field
from scipy import special, stats

from replirate.core.exceptions import DomainError

TWO_PI = 2.0 * math.pi
HIGH_CORRELATION = 0.925

# 20-point Gauss-Legendre rule on [-1, 1], positive half (symmetric).
_GL_ABSCISSAE = np.array(
    [
        0.9931285991850949,
        0.9639719272779138,
        0.9122344282513259,
        0.8391169718222188,
        0.7463319064601508,
        0.6360536807265150,
        0.5108670019508271,
        0.3737060887154196,
        0.2277858511416451,
        0.07652652113349733,
    ]
)
_GL_WEIGHTS = np.array(
    [
        0.01761400713915212,
        0.04060142980038694,
        0.06267204833410906,
        0.08327674157670475,
        0.1019301198172404,
        0.1181945319615184,
        0.1316886384491766,
        0.1420961093183821,
        0.1491729864726037,
        0.1527533871307259,
    ]
)
# Nodes mapped to (0, 1): (1 -/+ x) / 2, each carrying the original weight.
_NODES = np.concatenate([(1.0 - _GL_ABSCISSAE) / 2.0, (1.0 + _GL_ABSCISSAE) / 2.0])
_WEIGHTS = np.concatenate([_GL_WEIGHTS, _GL_WEIGHTS])


class BetaShape(BaseModel):
    """Standard (a, b) parameterisation of a Beta distribution."""

    model_config = ConfigDict(frozen=True)

    a: float = Field(..., gt=0.0, description="First Beta shape")
    b: float = Field(..., gt=0.0, description="Second Beta shape")

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)

    @property
    def variance(self) -> float:
        total = self.a + self.b
        return self.a * self.b / (total * total * (total + 1.0))


def _as_output(values: np.ndarray) -> float | np.ndarray:
    return float(values) if values.ndim == 0 else values


def beta_shape_from_mean_icc(mu: float, rho: float) -> BetaShape:
    """Convert (mean, intraclass correlation) to Beta shapes.

    a = mu(1 - rho)/rho and b = (1 - mu)(1 - rho)/rho, so that the mean is
    mu and the variance is mu(1 - mu)rho.

    Raises:
        DomainError: if mu or rho is outside the open unit interval
    """
    if not 0.0 < mu < 1.0:
        raise DomainError(f"mu must lie in (0, 1), got {mu}")
    if not 0.0 < rho < 1.0:
        raise DomainError(f"rho must lie in (0, 1), got {rho}")
    nu = (1.0 - rho) / rho
    return BetaShape(a=mu * nu, b=(1.0 - mu) * nu)


def normal_cdf(z: ArrayLike) -> float | np.ndarray:
    """Standard normal CDF via the complementary error function."""
    return _as_output(np.asarray(special.ndtr(np.asarray(z, dtype=float))))


def normal_ppf(p: ArrayLike) -> float | np.ndarray:
    """Standard normal quantile."""
    p = np.asarray(p, dtype=float)
    if np.any((p < 0.0) | (p > 1.0)):
        raise DomainError("normal quantile requires probabilities in [0, 1]")
    return _as_output(np.asarray(special.ndtri(p)))


def _upper_orthant(h: np.ndarray, k: np.ndarray, r: np.ndarray) -> np.ndarray:
    """P(X > h, Y > k) for a standard bivariate normal with correlation r.

    Inputs are finite, broadcast 1-d arrays.
    """
    hk = h * k
    out = np.empty_like(h)

    low = np.abs(r) < HIGH_CORRELATION
    if np.any(low):
        hl, kl, rl, hkl = h[low], k[low], r[low], hk[low]
        hs = (hl * hl + kl * kl) / 2.0
        asr = np.arcsin(rl)
        sn = np.sin(asr[:, None] * _NODES[None, :])
        terms = np.exp((sn * hkl[:, None] - hs[:, None]) / (1.0 - sn * sn))
        bvn = (terms @ _WEIGHTS) * asr / (2.0 * TWO_PI)
        out[low] = bvn + special.ndtr(-hl) * special.ndtr(-kl)

    high = ~low
    if np.any(high):
        hh, rh = h[high], r[high]
        negative = rh < 0
        kh = np.where(negative, -k[high], k[high])
        hkh = np.where(negative, -hk[high], hk[high])
        bvn = np.zeros_like(hh)

        interior = np.abs(rh) < 1.0
        if np.any(interior):
            hi, ki, hki = hh[interior], kh[interior], hkh[interior]
            ri = rh[interior]
            as_ = (1.0 - ri) * (1.0 + ri)
            a = np.sqrt(as_)
            bs = (hi - ki) ** 2
            c = (4.0 - hki) / 8.0
            d = (12.0 - hki) / 16.0
            part = (
                a
                * np.exp(-(bs / as_ + hki) / 2.0)
                * (1.0 - c * (bs - as_) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as_ * as_ / 5.0)
            )
            b = np.sqrt(bs)
            with np.errstate(over="ignore", invalid="ignore"):
                tail = (
                    np.exp(-hki / 2.0)
                    * math.sqrt(TWO_PI)
                    * special.ndtr(-b / a)
                    * b
                    * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0)
                )
            part = part - np.where(hki > -160.0, tail, 0.0)

            xs = (a[:, None] * _NODES[None, :]) ** 2
            rs = np.sqrt(1.0 - xs)
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                lead = np.exp(-(bs[:, None] / xs + hki[:, None]) / 2.0)
                inner = np.exp(-hki[:, None] * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs
                poly = 1.0 + c[:, None] * xs * (1.0 + d[:, None] * xs)
                nodes = np.where(lead > 0.0, lead * (inner - poly), 0.0)
            part = part + a / 2.0 * (nodes @ _WEIGHTS)
            bvn[interior] = -part / TWO_PI

        positive_tail = special.ndtr(-np.maximum(hh, kh))
        negative_tail = np.maximum(0.0, special.ndtr(-hh) - special.ndtr(-kh))
        out[high] = np.where(negative, negative_tail - bvn, bvn + positive_tail)

    return out


def bivariate_normal_cdf(h: ArrayLike, k: ArrayLike, r: ArrayLike) -> float | np.ndarray:
    """Standard bivariate normal CDF P(X <= h, Y <= k) with correlation r.

    Accepts scalars or broadcastable arrays; infinite limits are handled
    analytically.

    Raises:
        DomainError: if |r| > 1 or any argument is NaN
    """
    h, k, r = np.broadcast_arrays(
        np.asarray(h, dtype=float), np.asarray(k, dtype=float), np.asarray(r, dtype=float)
    )
    if np.any(np.isnan(h) | np.isnan(k) | np.isnan(r)):
        raise DomainError("bivariate normal CDF arguments must not be NaN")
    if np.any(np.abs(r) > 1.0):
        raise DomainError("correlation must satisfy |r| <= 1")

    shape = h.shape
    h, k, r = h.ravel(), k.ravel(), r.ravel()
    finite = np.isfinite(h) & np.isfinite(k)

    out = np.zeros_like(h)
    out = np.where(np.isposinf(h) & ~np.isneginf(k), special.ndtr(k), out)
    out = np.where(np.isposinf(k) & ~np.isneginf(h), special.ndtr(h), out)
    if np.any(finite):
        out[finite] = _upper_orthant(-h[finite], -k[finite], r[finite])

    return _as_output(np.clip(out, 0.0, 1.0).reshape(shape))


def _check_binomial(n: int, c: int, p: np.ndarray) -> None:
    if n < 0:
        raise DomainError(f"number of trials must be nonnegative, got {n}")
    if not 0 <= c <= n:
        raise DomainError(f"critical count must satisfy 0 <= c <= n, got c={c}, n={n}")
    if np.any((p < 0.0) | (p > 1.0)) or np.any(np.isnan(p)):
        raise DomainError("success probability must lie in [0, 1]")


def binomial_tail(n: int, c: int, p: ArrayLike) -> float | np.ndarray:
    """P(X >= c) for X ~ Binomial(n, p).

    Uses the regularised incomplete beta function, which stays accurate
    in the far tails.
    """
    p = np.asarray(p, dtype=float)
    _check_binomial(n, c, p)
    if c == 0:
        return _as_output(np.ones_like(p))
    return _as_output(np.asarray(stats.binom.sf(c - 1, n, p)))


def binomial_head(n: int, c: int, p: ArrayLike) -> float | np.ndarray:
    """P(X <= c - 1), the complement of :func:`binomial_tail`."""
    p = np.asarray(p, dtype=float)
    _check_binomial(n, c, p)
    if c == 0:
        return _as_output(np.zeros_like(p))
    return _as_output(np.asarray(stats.binom.cdf(c - 1, n, p)))
