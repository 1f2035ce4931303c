"""Gateway switching rules and the six-state Markov chain of MSSC.

Overview:
  `step` applies one decision instant of a diversity scheme to a pair of
  branch SNRs. The Markov part models MSSC with the six states below, where
  "below" means strictly under the switching threshold theta:

    state  active now  active before  condition
      1       GW1          GW1        gamma1 not below
      2       GW1          GW1        both below (stay)
      3       GW2          GW1        gamma1 below, gamma2 not below (switch)
      4       GW2          GW2        gamma2 not below
      5       GW2          GW2        both below (stay)
      6       GW1          GW2        gamma2 below, gamma1 not below (switch)

  With slot-to-slot independence every row of the transition matrix only
  depends on the gateway active before, and the stationary switching
  probability pi3 + pi6 equals p - p12. When the gateways have different
  fade laws the chain leaves GW1 with q1 = p1 - p12 and GW2 with
  q2 = p2 - p12, giving 2 q1 q2 / (q1 + q2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.analysis.scenario import LinkScenario
from src.channel.model import joint_exceed_prob, marginal_exceed_prob
from src.errors import DomainError, NumericalError
from src.obs.logging import get_logger

logger = get_logger(__name__)

# Power-iteration stopping tolerance (L1 change between sweeps).
STATIONARY_TOL = 1e-13
# Stationary switching probability of SC with exchangeable continuous branches.
SC_SWITCH_PROB = 0.5


class SchemeKind(str, Enum):
    """Gateway diversity scheme."""

    MSSC = "mssc"
    SSC = "ssc"
    SC = "sc"
    SINGLE = "single"
    MRC = "mrc"


@dataclass(frozen=True)
class SwitchState:
    """A Markov state of the MSSC chain.

    Attributes:
      state_id: 1..6 as in the module table.
    """

    state_id: int

    def __post_init__(self) -> None:
        if self.state_id not in range(1, 7):
            raise DomainError(f"state_id must be 1..6, got {self.state_id}")

    @property
    def active_gw(self) -> int:
        """Gateway whose SNR is used in this slot."""
        return 1 if self.state_id in (1, 2, 6) else 2

    @property
    def previous_gw(self) -> int:
        """Gateway that was active in the previous slot."""
        return 1 if self.state_id in (1, 2, 3) else 2

    @property
    def is_switch(self) -> bool:
        """True for the two states entered by a gateway change."""
        return self.state_id in (3, 6)


@dataclass(frozen=True)
class StepResult:
    """Outcome of one decision instant."""

    active: int
    switched: bool
    selected_snr: float


@dataclass(frozen=True)
class MarkovSummary:
    """Markov-chain switching analysis at one threshold.

    Attributes:
      p: Pr{gamma_1 <= theta}.
      p12: Pr{gamma_1 <= theta, gamma_2 <= theta}.
      stationary: Stationary vector pi (length 6).
      switch_prob: MSSC switching probability pi3 + pi6.
      switch_rate: MSSC switches per second for the slot length used.
      switch_prob_ssc: SSC switching probability (p for identical gateways).
      switch_prob_sc: SC switching probability; 0.5 for identical gateways,
        None otherwise (only the simulated value is meaningful).
      slot_seconds: Decision interval T in seconds.
      p2: Pr{gamma_2 <= theta}; equals `p` for identical gateways.
    """

    p: float
    p12: float
    stationary: tuple[float, ...]
    switch_prob: float
    switch_rate: float
    switch_prob_ssc: float
    switch_prob_sc: float | None
    slot_seconds: float
    p2: float | None = None

    def rate(self, scheme: SchemeKind) -> float | None:
        """Switches per second of `scheme` (0 for schemes that never switch)."""
        prob = self.prob(scheme)
        return None if prob is None else prob / self.slot_seconds

    def prob(self, scheme: SchemeKind) -> float | None:
        """Per-slot switching probability of `scheme` (None if not available)."""
        return {
            SchemeKind.MSSC: self.switch_prob,
            SchemeKind.SSC: self.switch_prob_ssc,
            SchemeKind.SC: self.switch_prob_sc,
        }.get(scheme, 0.0)


# -----------------------------------------------------------------------------
# Per-slot rules
# -----------------------------------------------------------------------------
def step(
    scheme: SchemeKind, prev_active: int, snr1: float, snr2: float, theta: float
) -> StepResult:
    """Apply one switching decision.

    Rules:
      - MSSC: leave the active GW only if it is below theta and the other is not.
      - SSC: leave the active GW whenever it is below theta.
      - SC: take the GW with the larger SNR; ties keep the previous one.
      - SINGLE: always GW1.
      - MRC: both GWs transmit; the combined SNR is snr1 + snr2.

    Args:
      scheme: Diversity scheme.
      prev_active: Gateway active in the previous slot (1 or 2).
      snr1, snr2: Linear SNRs of the two branches (> 0).
      theta: Linear switching threshold (> 0).

    Raises:
      DomainError: On non-positive SNR/threshold or an invalid gateway.
    """
    if snr1 <= 0.0 or snr2 <= 0.0 or theta <= 0.0:
        raise DomainError("SNRs and theta must be > 0")
    if prev_active not in (1, 2):
        raise DomainError(f"prev_active must be 1 or 2, got {prev_active}")

    if scheme is SchemeKind.MRC:
        return StepResult(active=prev_active, switched=False, selected_snr=snr1 + snr2)
    if scheme is SchemeKind.SINGLE:
        return StepResult(active=1, switched=False, selected_snr=snr1)

    snrs = {1: snr1, 2: snr2}
    other = 3 - prev_active
    if scheme is SchemeKind.MSSC:
        move = snrs[prev_active] < theta and not snrs[other] < theta
    elif scheme is SchemeKind.SSC:
        move = snrs[prev_active] < theta
    else:
        move = snrs[other] > snrs[prev_active]
    active = other if move else prev_active
    return StepResult(active=active, switched=move, selected_snr=snrs[active])


def classify_state(prev_active: int, snr1: float, snr2: float, theta: float) -> SwitchState:
    """Markov state of an MSSC slot given the previously active gateway."""
    below1, below2 = snr1 < theta, snr2 < theta
    if prev_active == 1:
        if not below1:
            return SwitchState(1)
        return SwitchState(2 if below2 else 3)
    if prev_active == 2:
        if not below2:
            return SwitchState(4)
        return SwitchState(5 if below1 else 6)
    raise DomainError(f"prev_active must be 1 or 2, got {prev_active}")


# -----------------------------------------------------------------------------
# Markov chain
# -----------------------------------------------------------------------------
def transition_matrix(p: float, p12: float, p2: float | None = None) -> np.ndarray:
    """Six-state MSSC transition matrix.

    Rows of states whose current gateway is GW1 (1, 2, 6) are
    [1-p, p12, p-p12, 0, 0, 0]; rows 3, 4, 5 mirror them on GW2 with `p2`
    (default `p`).

    Raises:
      DomainError: Unless 0 <= p12 <= p, p2 <= 1.
    """
    p2 = p if p2 is None else p2
    if not (0.0 <= p12 <= min(p, p2) and max(p, p2) <= 1.0):
        raise DomainError(f"need 0 <= p12 <= p, p2 <= 1, got p={p}, p2={p2}, p12={p12}")
    on_gw1 = [1.0 - p, p12, p - p12, 0.0, 0.0, 0.0]
    on_gw2 = [0.0, 0.0, 0.0, 1.0 - p2, p12, p2 - p12]
    return np.array([on_gw1, on_gw1, on_gw2, on_gw2, on_gw2, on_gw1])


def stationary_distribution(matrix: np.ndarray, max_iter: int = 10_000) -> np.ndarray:
    """Stationary row vector pi = pi P by power iteration from the uniform vector.

    Raises:
      NumericalError: If the iteration does not settle within `max_iter` sweeps.
    """
    n = matrix.shape[0]
    pi = np.full(n, 1.0 / n)
    delta = math.inf
    for _ in range(max_iter):
        nxt = pi @ matrix
        nxt /= nxt.sum()
        delta = float(np.abs(nxt - pi).sum())
        pi = nxt
        if delta < STATIONARY_TOL:
            return pi
    raise NumericalError(
        "power iteration did not converge",
        achieved_tolerance=delta,
        requested_tolerance=STATIONARY_TOL,
    )


def below_threshold_probs(scenario: LinkScenario) -> tuple[float, float, float]:
    """(p1, p2, p12): marginal and joint probabilities of being at or below theta.

    gamma_i <= theta is the event A_i >= Gamma_CS - Theta, so all three are
    exceedance probabilities of the fade law.
    """
    margin = scenario.switch_margin_db
    p1 = marginal_exceed_prob(scenario.fade_ul, 1, margin)
    p2 = marginal_exceed_prob(scenario.fade_ul, 2, margin)
    p12 = joint_exceed_prob(scenario.fade_ul, margin, margin)
    # Quadrature noise must not break p12 <= min(p1, p2).
    return p1, p2, min(p12, p1, p2)


def alternation_prob(leave1: float, leave2: float) -> float:
    """Stationary switching probability of a two-gateway alternation.

    A scheme that leaves GW1 with probability `leave1` and GW2 with `leave2`
    spends leave2 / (leave1 + leave2) of the slots on GW1 and switches with
    probability 2 leave1 leave2 / (leave1 + leave2).
    """
    if leave1 == leave2:
        return leave1
    return 2.0 * leave1 * leave2 / (leave1 + leave2)


def switching_summary(scenario: LinkScenario, slot_seconds: float = 1.0) -> MarkovSummary:
    """Switching probabilities and MSSC rate at the scenario's theta.

    Gateways with different fade laws get the two-sided chain and the
    matching SSC alternation; the SC value is left out because 0.5 only
    holds for exchangeable branches.

    Args:
      scenario: Operating point (theta taken from `switch_thresh_db`).
      slot_seconds: Decision interval T (> 0).

    Raises:
      DomainError: If `slot_seconds` is not positive.
      NumericalError: Propagated from quadrature / power iteration.
    """
    if not slot_seconds > 0.0:
        raise DomainError(f"slot_seconds must be > 0, got {slot_seconds}")
    symmetric = scenario.fade_ul.is_symmetric
    if not symmetric:
        logger.warning(
            "switching.asymmetric_margins",
            detail="SC switching probability needs simulation; "
            "MSSC and SSC use the two-sided chain",
        )
    p1, p2, p12 = below_threshold_probs(scenario)
    pi = stationary_distribution(transition_matrix(p1, p12, p2))
    p_sw = float(pi[2] + pi[5])
    logger.debug("switching.summary", p=p1, p2=p2, p12=p12, p_sw=p_sw)
    return MarkovSummary(
        p=p1,
        p12=p12,
        stationary=tuple(float(x) for x in pi),
        switch_prob=p_sw,
        switch_rate=p_sw / slot_seconds,
        switch_prob_ssc=alternation_prob(p1, p2),
        switch_prob_sc=SC_SWITCH_PROB if symmetric else None,
        slot_seconds=slot_seconds,
        p2=p2,
    )
