"""Analytic outage probabilities of the feeder uplink and the end-to-end link.

Overview:
  Every quantity reduces to exceedance probabilities of the gateway fade
  law: gamma_i <= u  <=>  A_i >= Gamma_CS - U (dB). The building blocks are
  `marginal_exceed_prob` (M) and `joint_exceed_prob` (J) from the channel
  model; with a_u = Gamma_CS - U and a_t = Gamma_CS - Theta:

    single GW   M(a_th)
    SC          J(a_th, a_th)
    MSSC        J(a_u, a_t) + M(a_u) - M(a_t)   for Theta <= U
                J(a_u, a_t)                     for Theta >  U

  The MSSC expression is the stationary CDF of the active-branch SNR for
  exchangeable gateways; at Theta = Gamma_th it collapses to SC.

  The end-to-end transparent link adds the user downlink:
    P_e2e = Pr{gamma_g <= gamma_th} + int_{gamma_th}^{gamma_CS_DL} P_UL(z) f(gamma_g) d gamma_g,
    z = gamma_th (gamma_g + 1) / (gamma_g - gamma_th).
  The integral is evaluated in the standardized log-attenuation of the
  downlink, where the integrand is bounded and smooth.

Example:
  p_sc = uplink_outage_sc(scenario)
  p_e2e = e2e_outage(scenario)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from src.analysis.scenario import LinkScenario, SweepAxis, apply_axis, check_monotone
from src.analysis.switching import SchemeKind
from src.channel.model import (
    joint_exceed_prob,
    lin_to_db,
    marginal_exceed_prob,
    normal_tail,
    quad_checked,
)
from src.errors import DomainError
from src.obs.logging import get_logger

logger = get_logger(__name__)

# Relative width of the slice above gamma_th where P_UL is bounded by 1.
E2E_SPLIT_EPS = 1e-6
# Lower truncation of the standardized downlink log-attenuation.
E2E_TAIL_SIGMAS = 10.0
E2E_TOL = 1e-9

# Schemes with an analytic uplink outage.
ANALYTIC_SCHEMES = (SchemeKind.SINGLE, SchemeKind.SC, SchemeKind.MSSC)


class OutageMethod(str, Enum):
    """How an outage value was obtained."""

    ANALYTIC = "analytic"
    MONTECARLO = "montecarlo"


@dataclass(frozen=True)
class CurvePoint:
    """One abscissa of an outage curve.

    Monte Carlo points also carry their confidence half-widths (None when the
    event count is too small to trust) and the switching estimate.
    """

    x: float
    outage: float
    ci_halfwidth: float | None = None
    unreliable: bool = False
    switch_prob: float | None = None
    switch_ci_halfwidth: float | None = None


@dataclass(frozen=True)
class OutageCurve:
    """Outage probability along one sweep axis.

    Attributes:
      scheme: Diversity scheme evaluated.
      method: Analytic or Monte Carlo.
      axis: Quantity on the abscissa.
      points: Curve points, abscissa strictly monotone.
      metadata: Operating-point details (rho, separation, thresholds, ...).
    """

    scheme: SchemeKind
    method: OutageMethod
    axis: SweepAxis
    points: tuple[CurvePoint, ...]
    metadata: dict[str, float | None] = field(default_factory=dict)

    def __post_init__(self) -> None:
        check_monotone([pt.x for pt in self.points])
        for pt in self.points:
            if not (0.0 <= pt.outage <= 1.0):
                raise DomainError(f"outage {pt.outage} outside [0, 1] at x={pt.x}")

    @property
    def xs(self) -> list[float]:
        """Abscissae in sweep order."""
        return [pt.x for pt in self.points]

    @property
    def outages(self) -> list[float]:
        """Outage probabilities in sweep order."""
        return [pt.outage for pt in self.points]

    def abscissa_at(self, target: float) -> float | None:
        """Abscissa where the curve crosses `target` (log-linear interpolation).

        Points with zero outage are skipped. Returns None when no pair of
        neighbouring points brackets the target.
        """
        pts = [pt for pt in self.points if pt.outage > 0.0]
        log_t = math.log10(target)
        for a, b in zip(pts, pts[1:]):
            la, lb = math.log10(a.outage), math.log10(b.outage)
            if la == lb or (la - log_t) * (lb - log_t) > 0.0:
                continue
            return a.x + (log_t - la) * (b.x - a.x) / (lb - la)
        return None


# -----------------------------------------------------------------------------
# Feeder uplink
# -----------------------------------------------------------------------------
def uplink_outage_single(scenario: LinkScenario) -> float:
    """Outage of GW1 alone: Pr{A1 > Gamma_CS - Gamma_th}."""
    return marginal_exceed_prob(scenario.fade_ul, 1, scenario.ul_margin_db)


def uplink_outage_sc(scenario: LinkScenario) -> float:
    """Selection-combining outage: both gateways below gamma_th."""
    m = scenario.ul_margin_db
    return joint_exceed_prob(scenario.fade_ul, m, m)


def mssc_outage_cdf(scenario: LinkScenario, level_db: float) -> float:
    """Stationary CDF of the MSSC active-branch SNR at `level_db`.

    Uses the scenario's switching threshold Theta. For Theta <= U the three
    rectangle probabilities
      Pr{g1 <= Theta, g2 <= Theta} + Pr{Theta <= g1 <= U, g2 <= Theta}
      + Pr{Theta <= g1 <= U}
    are combined; for Theta > U only Pr{g1 <= U, g2 <= Theta} remains.
    """
    a_u = scenario.cs_snr_ul_db - level_db
    a_t = scenario.switch_margin_db
    fade = scenario.fade_ul
    joint = joint_exceed_prob(fade, a_u, a_t)
    if scenario.switch_thresh_db > level_db:
        return joint
    band = marginal_exceed_prob(fade, 1, a_u) - marginal_exceed_prob(fade, 1, a_t)
    return min(1.0, max(0.0, joint + band))


def uplink_outage_mssc(scenario: LinkScenario) -> float:
    """MSSC outage at gamma_th for an arbitrary switching threshold."""
    if not scenario.fade_ul.is_symmetric:
        logger.warning(
            "mssc.asymmetric_margins",
            detail="stationary decomposition assumes exchangeable gateways; "
            "compare against simulation",
        )
    return mssc_outage_cdf(scenario, scenario.outage_thresh_db)


def uplink_outage(
    scenario: LinkScenario, scheme: SchemeKind, level_db: float | None = None
) -> float:
    """Uplink outage of `scheme` at `level_db` (default Gamma_th).

    Raises:
      DomainError: For schemes without an analytic form (SSC, MRC).
    """
    u = scenario.outage_thresh_db if level_db is None else level_db
    margin = scenario.cs_snr_ul_db - u
    if scheme is SchemeKind.SINGLE:
        return marginal_exceed_prob(scenario.fade_ul, 1, margin)
    if scheme is SchemeKind.SC:
        return joint_exceed_prob(scenario.fade_ul, margin, margin)
    if scheme is SchemeKind.MSSC:
        return mssc_outage_cdf(scenario, u)
    raise DomainError(f"no analytic outage for scheme {scheme.value}")


# -----------------------------------------------------------------------------
# User downlink and end-to-end
# -----------------------------------------------------------------------------
def downlink_snr_pdf(scenario: LinkScenario, gamma_g: float) -> float:
    """Density of the downlink SNR gamma_g = gamma_CS_DL * 10^(-A_g/10).

    Raises:
      DomainError: If `gamma_g` is not positive.
    """
    if not gamma_g > 0.0:
        raise DomainError(f"gamma_g must be > 0, got {gamma_g}")
    a_db = 10.0 * math.log10(scenario.cs_dl / gamma_g)
    if a_db <= 0.0:
        return 0.0
    return scenario.fade_dl.pdf(a_db) * 10.0 / (gamma_g * math.log(10.0))


def downlink_outage(scenario: LinkScenario) -> float:
    """Pr{gamma_g <= gamma_th}."""
    return scenario.fade_dl.exceed_prob(scenario.dl_margin_db)


def regenerative_bound(scenario: LinkScenario, uplink: SchemeKind = SchemeKind.SC) -> float:
    """Outage of a regenerative repeater, P_DL (1 - P_UL) + P_UL."""
    p_ul = uplink_outage(scenario, uplink)
    p_dl = downlink_outage(scenario)
    return p_dl * (1.0 - p_ul) + p_ul


def e2e_outage(scenario: LinkScenario, uplink: SchemeKind = SchemeKind.SC) -> float:
    """End-to-end outage of the transparent forward link.

    Args:
      scenario: Operating point.
      uplink: Uplink scheme whose outage P_UL(z) enters the integral
        (SC, MSSC or SINGLE).

    Returns:
      Pr{gamma_g gamma_h / (gamma_g + gamma_h + 1) <= gamma_th}.

    Raises:
      DomainError: For uplink schemes without an analytic form.
      NumericalError: If a quadrature fails.
    """
    if uplink not in ANALYTIC_SCHEMES:
        raise DomainError(f"no analytic e2e outage for uplink scheme {uplink.value}")
    dl_margin = scenario.dl_margin_db
    if dl_margin <= 0.0:
        return 1.0

    fade = scenario.fade_dl
    g_th = scenario.gamma_th
    cs_dl = scenario.cs_dl
    p_dl = downlink_outage(scenario)

    # gamma_g in (gamma_th, cs_dl)  <=>  u < u_max (u: standardized ln A_g).
    u_max = fade.standardize(dl_margin)
    a_split = dl_margin - 10.0 * math.log10(1.0 + E2E_SPLIT_EPS)
    if a_split <= 0.0:
        # Entire window lies in the slice where P_UL is bounded by 1.
        return 1.0
    u_split = fade.standardize(a_split)
    # Slice (gamma_th, gamma_th (1 + eps)): P_UL ~ 1, take the exact mass.
    slice_mass = normal_tail(u_split) - normal_tail(u_max)

    def integrand(u: float) -> float:
        a_g = math.exp(fade.m + fade.s * u)
        gamma_g = cs_dl * 10.0 ** (-a_g / 10.0)
        z = g_th * (gamma_g + 1.0) / (gamma_g - g_th)
        phi = math.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)
        return uplink_outage(scenario, uplink, lin_to_db(z)) * phi

    # Gaussian weight outside [-10, 10] is < 1e-23.
    lo, hi = -E2E_TAIL_SIGMAS, min(u_split, E2E_TAIL_SIGMAS)
    main = 0.0
    if hi > lo:
        main, _ = quad_checked(integrand, lo, hi, _e2e_knees(scenario, lo, hi), E2E_TOL)

    total = p_dl + main + slice_mass
    logger.debug("e2e.outage", p_dl=p_dl, main=main, slice=slice_mass, total=total)
    return min(1.0, max(0.0, total))


def _e2e_knees(scenario: LinkScenario, lo: float, hi: float) -> list[float] | None:
    """Breakpoint where z reaches gamma_CS_UL and P_UL saturates at 1."""
    cs_ul, g_th = scenario.cs_ul, scenario.gamma_th
    if cs_ul <= g_th:
        return None
    gamma_star = g_th * (cs_ul + 1.0) / (cs_ul - g_th)
    a_star = 10.0 * math.log10(scenario.cs_dl / gamma_star)
    if a_star <= 0.0:
        return None
    u_star = scenario.fade_dl.standardize(a_star)
    return [u_star] if lo < u_star < hi else None


# -----------------------------------------------------------------------------
# Curves
# -----------------------------------------------------------------------------
def curve_metadata(scenario: LinkScenario) -> dict[str, float | None]:
    """Operating point stamped on a curve (separation_km None if rho was set directly)."""
    return {
        "rho": scenario.fade_ul.rho,
        "separation_km": scenario.separation_km,
        "outage_thresh_db": scenario.outage_thresh_db,
        "switch_thresh_db": scenario.switch_thresh_db,
        "cs_snr_ul_db": scenario.cs_snr_ul_db,
        "cs_snr_dl_db": scenario.cs_snr_dl_db,
    }


def outage_curve(
    scenario: LinkScenario, scheme: SchemeKind, axis: SweepAxis, values: list[float]
) -> OutageCurve:
    """Analytic uplink outage of `scheme` along `axis`."""
    check_monotone(values)
    points = tuple(
        CurvePoint(x=v, outage=uplink_outage(apply_axis(scenario, axis, v), scheme)) for v in values
    )
    return OutageCurve(scheme, OutageMethod.ANALYTIC, axis, points, curve_metadata(scenario))


def e2e_curve(
    scenario: LinkScenario, uplink: SchemeKind, axis: SweepAxis, values: list[float]
) -> OutageCurve:
    """Analytic end-to-end outage along `axis` for the given uplink scheme."""
    check_monotone(values)
    points = tuple(
        CurvePoint(x=v, outage=e2e_outage(apply_axis(scenario, axis, v), uplink)) for v in values
    )
    return OutageCurve(uplink, OutageMethod.ANALYTIC, axis, points, curve_metadata(scenario))


def diversity_gain_db(curve: OutageCurve, reference: OutageCurve, target: float = 1e-3) -> float:
    """Abscissa shift (dB) between `reference` and `curve` at outage `target`.

    Both curves must run along an SNR-like axis (SNR or margin).

    Raises:
      DomainError: If either curve does not cross `target`.
    """
    if curve.axis not in (SweepAxis.SNR, SweepAxis.MARGIN) or reference.axis is not curve.axis:
        raise DomainError("diversity gain needs two curves on the same SNR/margin axis")
    x = curve.abscissa_at(target)
    x_ref = reference.abscissa_at(target)
    if x is None or x_ref is None:
        raise DomainError(f"curves do not both cross outage {target:g}")
    return x_ref - x
