"""Rain-fading statistical model for a two-gateway feeder link.

Overview:
  The attenuation A_i (dB) seen by gateway i is lognormal: ln A_i is Gaussian
  with mean m_i and standard deviation s_i, and the two ln-attenuations are
  jointly Gaussian with spatial correlation rho. Everything the analytic and
  simulation layers need from the channel lives here:

  - dB <-> linear power-gain algebra,
  - the distance -> correlation law,
  - marginal and joint exceedance probabilities Pr{A > a},
  - correlated sampling from explicitly seeded generators.

Numerics:
  The joint exceedance is a single Gauss-Kronrod quadrature (QUADPACK via
  `scipy.integrate.quad`) of exp(-x^2/2) * erfc(.) over a window truncated at
  10 standard deviations, where the Gaussian tail is below 1e-23.

Example:
  params = RainFadeParams(m1=-0.2, s1=1.1, m2=-0.2, s2=1.1, rho=correlation_from_distance(20))
  p = joint_exceed_prob(params, 10.0, 10.0)
"""
from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate
from scipy.special import erfc

from src.errors import DomainError, NumericalError
from src.obs.logging import get_logger
from src.obs.otel import quad_calls_total

logger = get_logger(__name__)

SQRT2 = math.sqrt(2.0)
# Gaussian tail beyond this many standard deviations is < 1e-23 and dropped.
TAIL_SIGMAS = 10.0
# Absolute accuracy contract of `joint_exceed_prob`.
QUAD_TOL = 1e-10


# -----------------------------------------------------------------------------
# Domain types
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class LognormalFade:
    """Single-site lognormal attenuation law.

    Attributes:
      m: Mean of ln(A), A in dB.
      s: Standard deviation of ln(A); must be > 0.
    """

    m: float
    s: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.m) and math.isfinite(self.s)):
            raise DomainError("lognormal parameters must be finite")
        if self.s <= 0.0:
            raise DomainError(f"lognormal s must be > 0, got {self.s}")

    def standardize(self, a_db: float) -> float:
        """Map an attenuation a_db > 0 to the standard-normal abscissa."""
        return (math.log(a_db) - self.m) / self.s

    def exceed_prob(self, a_db: float) -> float:
        """Pr{A > a_db}; 1 for a_db <= 0."""
        if not math.isfinite(a_db):
            raise DomainError(f"attenuation must be finite, got {a_db}")
        if a_db <= 0.0:
            return 1.0
        return normal_tail(self.standardize(a_db))

    def pdf(self, a_db: float) -> float:
        """Density of A at a_db (0 for a_db <= 0)."""
        if a_db <= 0.0:
            return 0.0
        u = self.standardize(a_db)
        return math.exp(-0.5 * u * u) / (a_db * self.s * math.sqrt(2.0 * math.pi))


@dataclass(frozen=True)
class RainFadeParams:
    """Joint lognormal law of the two gateway attenuations.

    Attributes:
      m1, s1: ln-attenuation mean / standard deviation at gateway 1.
      m2, s2: Same for gateway 2.
      rho: Correlation of ln A1 and ln A2, in [0, 1]. rho = 1 is accepted
        here for the comonotone sampler only; quadrature paths reject it.
    """

    m1: float
    s1: float
    m2: float
    s2: float
    rho: float

    def __post_init__(self) -> None:
        # Construct the margins for their validation side effect.
        LognormalFade(self.m1, self.s1)
        LognormalFade(self.m2, self.s2)
        if not (0.0 <= self.rho <= 1.0):
            raise DomainError(f"rho must lie in [0, 1], got {self.rho}")

    def site(self, site: int) -> LognormalFade:
        """Marginal law of gateway `site` (1 or 2)."""
        if site == 1:
            return LognormalFade(self.m1, self.s1)
        if site == 2:
            return LognormalFade(self.m2, self.s2)
        raise DomainError(f"site must be 1 or 2, got {site}")

    def with_rho(self, rho: float) -> RainFadeParams:
        """Copy with a different correlation."""
        return replace(self, rho=rho)

    @property
    def is_symmetric(self) -> bool:
        """True when both gateways share the same margin."""
        return self.m1 == self.m2 and self.s1 == self.s2


@dataclass(frozen=True)
class SiteGeometry:
    """Ground geometry of the gateway pair.

    Attributes:
      separation_km: Gateway separation D in km (>= 0).
    """

    separation_km: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.separation_km) or self.separation_km < 0.0:
            raise DomainError(f"separation_km must be >= 0, got {self.separation_km}")

    @property
    def rho(self) -> float:
        """Spatial correlation implied by the separation."""
        return correlation_from_distance(self.separation_km)


@dataclass(frozen=True)
class ChannelSample:
    """One slot's attenuations and linear power gains (g_i = 10^(-a_i/10))."""

    a1_db: float
    a2_db: float
    g1_lin: float
    g2_lin: float


@dataclass(frozen=True)
class ChannelBatch:
    """Vectorized counterpart of `ChannelSample` (one entry per slot)."""

    a1_db: np.ndarray
    a2_db: np.ndarray
    g1_lin: np.ndarray
    g2_lin: np.ndarray

    def __len__(self) -> int:
        return int(self.a1_db.shape[0])


# -----------------------------------------------------------------------------
# Algebra
# -----------------------------------------------------------------------------
def correlation_from_distance(separation_km: float) -> float:
    """Spatial correlation of ln-attenuation for two sites D km apart.

    rho(D) = 0.94 exp(-D/30) + 0.06 exp(-(D/500)^2).

    Raises:
      DomainError: If `separation_km` is negative or not finite.
    """
    if not math.isfinite(separation_km) or separation_km < 0.0:
        raise DomainError(f"separation_km must be >= 0, got {separation_km}")
    d = float(separation_km)
    return 0.94 * math.exp(-d / 30.0) + 0.06 * math.exp(-((d / 500.0) ** 2))


def attenuation_db_to_gain(a_db: float | np.ndarray) -> float | np.ndarray:
    """Linear power gain |h|^2 = 10^(-a_db/10)."""
    if isinstance(a_db, np.ndarray):
        return np.power(10.0, -a_db / 10.0)
    return 10.0 ** (-float(a_db) / 10.0)


def gain_to_attenuation_db(g_lin: float | np.ndarray) -> float | np.ndarray:
    """Inverse of `attenuation_db_to_gain`: -10 log10(g)."""
    if isinstance(g_lin, np.ndarray):
        return -10.0 * np.log10(g_lin)
    return -10.0 * math.log10(g_lin)


def db_to_lin(x_db: float) -> float:
    """10^(x/10)."""
    return 10.0 ** (x_db / 10.0)


def lin_to_db(x_lin: float) -> float:
    """10 log10(x); x must be > 0."""
    if x_lin <= 0.0:
        raise DomainError(f"linear value must be > 0, got {x_lin}")
    return 10.0 * math.log10(x_lin)


def normal_tail(x: float) -> float:
    """Standard-normal upper tail Q(x) = erfc(x / sqrt 2) / 2."""
    return 0.5 * float(erfc(x / SQRT2))


# -----------------------------------------------------------------------------
# Exceedance laws
# -----------------------------------------------------------------------------
def marginal_exceed_prob(params: RainFadeParams, site: int, a_db: float) -> float:
    """Pr{A_site > a_db} = Q((ln a_db - m)/s); 1 for a_db <= 0.

    Raises:
      DomainError: If `a_db` is not finite or `site` is not 1/2.
    """
    return params.site(site).exceed_prob(a_db)


def joint_exceed_prob(params: RainFadeParams, a1_db: float, a2_db: float) -> float:
    """Pr{A1 > a1_db, A2 > a2_db} by one-dimensional quadrature.

    With beta_i = (ln a_i - m_i)/s_i the probability is

        1/(2 sqrt(2 pi)) * int_{beta_2}^{inf} exp(-x^2/2)
                           * erfc((beta_1 - rho x) / sqrt(2 (1 - rho^2))) dx.

    Non-positive thresholds are always exceeded, so the result degrades to the
    other margin (or 1).

    Args:
      params: Joint fade law; `rho` must be < 1.
      a1_db: Threshold for gateway 1 (dB).
      a2_db: Threshold for gateway 2 (dB).

    Returns:
      Probability in [0, 1], absolute accuracy 1e-10.

    Raises:
      DomainError: On non-finite thresholds or rho = 1.
      NumericalError: If QUADPACK cannot reach the tolerance.
    """
    if not (math.isfinite(a1_db) and math.isfinite(a2_db)):
        raise DomainError("attenuation thresholds must be finite")
    if params.rho >= 1.0:
        raise DomainError("rho = 1 makes the joint density singular; use rho < 1")
    if a1_db <= 0.0 and a2_db <= 0.0:
        return 1.0
    if a1_db <= 0.0:
        return marginal_exceed_prob(params, 2, a2_db)
    if a2_db <= 0.0:
        return marginal_exceed_prob(params, 1, a1_db)

    b1 = params.site(1).standardize(a1_db)
    b2 = params.site(2).standardize(a2_db)
    rho = params.rho
    if rho == 0.0:
        return normal_tail(b1) * normal_tail(b2)
    return _bivariate_upper(b1, b2, rho)


def _bivariate_upper(b1: float, b2: float, rho: float) -> float:
    """Pr{Z1 > b1, Z2 > b2} for standard normals with correlation rho in (0, 1)."""
    scale = SQRT2 * math.sqrt(1.0 - rho * rho)
    norm = 1.0 / (2.0 * math.sqrt(2.0 * math.pi))

    def integrand(x: float) -> float:
        return math.exp(-0.5 * x * x) * float(erfc((b1 - rho * x) / scale))

    lo = max(b2, -TAIL_SIGMAS)
    hi = max(lo, 0.0) + TAIL_SIGMAS
    # erfc steps from 2 to 0 around x = b1/rho; sharp when rho -> 1.
    knee = b1 / rho
    points = [knee] if lo < knee < hi else None

    value, _ = quad_checked(integrand, lo, hi, points)
    return min(1.0, max(0.0, norm * value))


def quad_checked(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    points: list[float] | None = None,
    tol: float = QUAD_TOL,
) -> tuple[float, float]:
    """Adaptive Gauss-Kronrod integration with one refinement retry.

    Raises:
      NumericalError: If the error estimate stays above `tol`.
    """
    quad_calls_total.add(1)
    abserr = math.inf
    value = math.nan
    for limit in (200, 2000):
        value, abserr = integrate.quad(
            fn, lo, hi, points=points, epsabs=tol * 1e-3, epsrel=1e-11, limit=limit
        )
        if abserr <= tol:
            return float(value), float(abserr)
        logger.debug("quad.retry", lo=lo, hi=hi, abserr=abserr, limit=limit)
    raise NumericalError(
        "quadrature did not converge", achieved_tolerance=abserr, requested_tolerance=tol
    )


# -----------------------------------------------------------------------------
# Sampling
# -----------------------------------------------------------------------------
def cholesky_factor(rho: float) -> np.ndarray:
    """Lower Cholesky factor of [[1, rho], [rho, 1]] (semidefinite-safe at rho = 1)."""
    return np.array([[1.0, 0.0], [rho, math.sqrt(max(1.0 - rho * rho, 0.0))]])


def sample_pairs(params: RainFadeParams, rng: np.random.Generator, n: int) -> ChannelBatch:
    """Draw `n` independent slots of correlated attenuations.

    (z1, z2) = L @ w with w i.i.d. standard normal and L the Cholesky factor
    of the correlation matrix; A_i = exp(m_i + s_i z_i). rho = 1 yields the
    comonotone pair z1 == z2.

    Args:
      params: Joint fade law.
      rng: Seeded generator; only this stream is advanced.
      n: Number of slots (>= 1).

    Returns:
      ChannelBatch with attenuations (dB) and linear gains.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    w = rng.standard_normal((2, n))
    z = cholesky_factor(params.rho) @ w
    a1 = np.exp(params.m1 + params.s1 * z[0])
    a2 = np.exp(params.m2 + params.s2 * z[1])
    return ChannelBatch(
        a1_db=a1,
        a2_db=a2,
        g1_lin=attenuation_db_to_gain(a1),
        g2_lin=attenuation_db_to_gain(a2),
    )


def sample_pair(params: RainFadeParams, rng: np.random.Generator) -> ChannelSample:
    """Draw a single slot; successive calls are independent in time."""
    b = sample_pairs(params, rng, 1)
    return ChannelSample(
        a1_db=float(b.a1_db[0]),
        a2_db=float(b.a2_db[0]),
        g1_lin=float(b.g1_lin[0]),
        g2_lin=float(b.g2_lin[0]),
    )


def sample_fade(fade: LognormalFade, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw `n` single-site attenuations (dB), e.g. for the user downlink."""
    return np.exp(fade.m + fade.s * rng.standard_normal(n))
