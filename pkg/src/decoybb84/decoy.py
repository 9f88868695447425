"""Three-intensity decoy-state estimator.

Certified bounds on the vacuum yield, the single-photon yield and gain,
and the single-photon x-basis error rate, computed purely from the
per-intensity observed statistics.  The bounds hold for *any* channel
behaviour, honest or adversarial; no channel parameter enters them.

``e1x_U`` saturates to ``math.inf`` ("unbounded") when the certified
single-photon yield is zero: downstream rate formulas must then assume
an error rate of 1/2, i.e. no single-photon security credit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import ObservedStatistics
from .errors import DomainError
from .source import IntensityProfile, PulseType, validate_profile

UNBOUNDED = math.inf


@dataclass(frozen=True)
class DecoyBounds:
    """Certified bounds; ``saturated`` marks that some clamp engaged."""

    Y0_L: float
    Y1_L: float
    Q1s_L: float
    e1x_U: float
    saturated: bool = False

    @property
    def e1_unbounded(self) -> bool:
        return not math.isfinite(self.e1x_U)


def _require_positive_gains(stats: ObservedStatistics, *types: PulseType):
    for pt in types:
        if stats.Q.get(pt, 0.0) <= 0.0:
            raise DomainError(f"gain for {pt.value} must be > 0")


def y0_lower(stats: ObservedStatistics, profile: IntensityProfile) -> float:
    """Lower bound on the vacuum yield from the two decoy gains."""
    validate_profile(profile)
    nu1, nu2 = profile.nu1, profile.nu2
    q_d1 = stats.Q[PulseType.DECOY1]
    q_d2 = stats.Q[PulseType.DECOY2]
    value = (nu1 * q_d2 * math.exp(nu2) - nu2 * q_d1 * math.exp(nu1)) / (nu1 - nu2)
    return max(value, 0.0)


def y1_lower(
    stats: ObservedStatistics, profile: IntensityProfile, y0_L: float
) -> float:
    """Lower bound on the single-photon yield.

    Negative brackets (possible under attack statistics) clamp to zero;
    a zero bound certifies nothing about single photons.
    """
    validate_profile(profile)
    _require_positive_gains(stats, PulseType.SIGNAL)
    mu, nu1, nu2 = profile.mu, profile.nu1, profile.nu2
    q_s = stats.Q[PulseType.SIGNAL]
    q_d1 = stats.Q[PulseType.DECOY1]
    q_d2 = stats.Q[PulseType.DECOY2]
    # Denominator factored as (nu1-nu2)(mu-nu1-nu2): positive by the
    # profile constraints and free of the nu1^2-nu2^2 cancellation.
    prefactor = mu / ((nu1 - nu2) * (mu - nu1 - nu2))
    quad_ratio = (nu1 - nu2) * (nu1 + nu2) / (mu * mu)
    bracket = (
        q_d1 * math.exp(nu1)
        - q_d2 * math.exp(nu2)
        - quad_ratio * (q_s * math.exp(mu) - y0_L)
    )
    return max(prefactor * bracket, 0.0)


def q1_lower(y1_L: float, mu: float) -> float:
    """Lower bound on the single-photon signal gain: mu e^-mu Y1_L."""
    if y1_L < 0:
        raise DomainError(f"y1_L must be >= 0, got {y1_L}")
    return mu * math.exp(-mu) * y1_L


def e1_upper(
    stats: ObservedStatistics, profile: IntensityProfile, y1_L: float
) -> float:
    """Upper bound on the single-photon x-basis error rate.

    Returns ``UNBOUNDED`` when ``y1_L <= 0``; otherwise the bound is
    clamped into [0, 1].
    """
    validate_profile(profile)
    if y1_L <= 0.0:
        return UNBOUNDED
    nu1, nu2 = profile.nu1, profile.nu2
    num = (
        stats.E_x[PulseType.DECOY1] * stats.Q[PulseType.DECOY1] * math.exp(nu1)
        - stats.E_x[PulseType.DECOY2] * stats.Q[PulseType.DECOY2] * math.exp(nu2)
    )
    value = num / ((nu1 - nu2) * y1_L)
    return min(max(value, 0.0), 1.0)


def estimate_bounds(
    stats: ObservedStatistics, profile: IntensityProfile
) -> DecoyBounds:
    """Compose the four bounds in order: Y0, Y1, Q1s, e1x."""
    validate_profile(profile)
    _require_positive_gains(
        stats, PulseType.SIGNAL, PulseType.DECOY1, PulseType.DECOY2
    )
    y0 = y0_lower(stats, profile)
    y1_raw_negative = False
    y1 = y1_lower(stats, profile, y0)
    if y1 == 0.0:
        y1_raw_negative = True
    q1 = q1_lower(y1, profile.mu)
    e1 = e1_upper(stats, profile, y1)
    # An error bound at or above 1 certifies nothing either.
    saturated = y1_raw_negative or not math.isfinite(e1) or e1 >= 1.0
    return DecoyBounds(Y0_L=y0, Y1_L=y1, Q1s_L=q1, e1x_U=e1, saturated=saturated)
