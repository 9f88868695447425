"""Honest channel and detector statistics.

Two yield conventions are supported:

* ``paper`` — the linearized yields ``Y_i = p_d + 1 - (1 - eta*T)**i``
  whose gain sum collapses to the closed form
  ``Q = p_d + 1 - exp(-eta*mu*T)``.  This is the convention behind the
  reference rate-versus-distance curves.
* ``exact`` — the physical per-photon model
  ``Y_i = 1 - (1 - p_d) * (1 - eta*T)**i`` (each photon survives
  independently with probability ``eta*T``; a click needs a surviving
  photon or a dark count).  This is what the Monte Carlo reproduces.

Error rates are stored as conditional QBERs: the dark-count driven joint
error probability ``p_d / 2`` divided by the gain of the pulse type.
Optics are assumed perfectly tuned, so dark counts are the only error
source and there is no misalignment parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DegenerateChannel, DomainError
from .source import (
    PULSE_TYPES,
    IntensityProfile,
    PulseType,
    validate_profile,
)

# Relative tail bound for series-summed gains in exact mode.
_SERIES_TAIL_REL = 1e-14

YIELD_MODES = ("paper", "exact")


@dataclass(frozen=True)
class ChannelParams:
    """Fiber loss, length, detector efficiency and dark-count probability."""

    delta_db_per_km: float
    L_km: float
    eta: float
    p_d: float

    def __post_init__(self):
        if self.delta_db_per_km < 0:
            raise DomainError(f"delta must be >= 0, got {self.delta_db_per_km}")
        if self.L_km < 0:
            raise DomainError(f"L must be >= 0, got {self.L_km}")
        if not 0.0 < self.eta <= 1.0:
            raise DomainError(f"eta must be in (0,1], got {self.eta}")
        if not 0.0 <= self.p_d < 1.0:
            raise DomainError(f"p_d must be in [0,1), got {self.p_d}")

    @property
    def transmission(self) -> float:
        return transmittance(self.delta_db_per_km, self.L_km)

    @property
    def eta_t(self) -> float:
        return self.eta * self.transmission


@dataclass(frozen=True)
class ObservedStatistics:
    """Per-intensity gains and conditional error rates, the estimator input."""

    Q: dict[PulseType, float]
    E_x: dict[PulseType, float]
    E_sz: float
    E_z: dict[PulseType, float] = field(default_factory=dict)

    def gain(self, pulse_type: PulseType) -> float:
        return self.Q[pulse_type]


def transmittance(delta_db_per_km: float, L_km: float) -> float:
    """Channel transmission 10**(-delta*L/10)."""
    if delta_db_per_km < 0 or L_km < 0:
        raise DomainError("delta and L must be nonnegative")
    return 10.0 ** (-delta_db_per_km * L_km / 10.0)


def honest_yield(i: int, params: ChannelParams, mode: str = "paper") -> float:
    """Detection probability of an i-photon pulse on the honest channel."""
    if i < 0:
        raise DomainError(f"photon count must be >= 0, got {i}")
    if mode not in YIELD_MODES:
        raise DomainError(f"mode must be one of {YIELD_MODES}, got {mode!r}")
    if i == 0:
        return params.p_d
    # 1 - (1 - etaT)^i via expm1/log1p keeps precision for tiny etaT.
    log_miss = i * math.log1p(-params.eta_t) if params.eta_t < 1.0 else -math.inf
    if mode == "paper":
        return params.p_d - math.expm1(log_miss)
    return -math.expm1(math.log1p(-params.p_d) + log_miss)


def gain_from_yields(intensity: float, yield_fn) -> float:
    """Poisson-average a yield sequence: sum_j pmf(mu, j) * Y_j.

    The series is summed until the remaining pmf tail (yields are <= 1)
    is below ``_SERIES_TAIL_REL`` relative to the partial sum.  Past
    j ~ 2*mu the Poisson terms decay geometrically with ratio <= 1/2, so
    the tail is bounded by twice the current term.
    """
    total = 0.0
    p = math.exp(-intensity)
    j = 0
    while j < 1024:
        total += p * yield_fn(j)
        if j >= 2.0 * intensity + 4 and (
            2.0 * p <= _SERIES_TAIL_REL * total or p < 1e-300
        ):
            break
        j += 1
        p *= intensity / j
    return total


def honest_statistics(
    profile: IntensityProfile, params: ChannelParams, mode: str = "paper"
) -> ObservedStatistics:
    """No-eavesdropping gains and conditional QBERs for all pulse types."""
    validate_profile(profile)
    if mode not in YIELD_MODES:
        raise DomainError(f"mode must be one of {YIELD_MODES}, got {mode!r}")
    gains: dict[PulseType, float] = {}
    for pt in PULSE_TYPES:
        m = profile.intensity(pt)
        if mode == "paper":
            # p_d + 1 - exp(-eta mu T), with expm1 so small exponents keep
            # full relative precision.
            gains[pt] = params.p_d - math.expm1(-params.eta_t * m)
        else:
            gains[pt] = gain_from_yields(
                m, lambda j: honest_yield(j, params, "exact")
            )
    if any(q <= 0.0 for q in gains.values()):
        raise DegenerateChannel(
            "all-zero gain: no dark counts and no transmission"
        )
    half_dark = params.p_d / 2.0
    e_x = {pt: half_dark / gains[pt] for pt in PULSE_TYPES}
    e_z = dict(e_x)
    return ObservedStatistics(
        Q=gains, E_x=e_x, E_sz=half_dark / gains[PulseType.SIGNAL], E_z=e_z
    )


@dataclass(frozen=True)
class SinglePhotonTruth:
    """Exact single-photon quantities on the honest channel.

    These are the values the decoy estimator tries to certify from the
    observed statistics alone: vacuum yield, single-photon yield and gain,
    and the single-photon x-basis error rate.
    """

    Y0: float
    Y1: float
    Q1s: float
    e1x: float


def honest_truth(
    profile: IntensityProfile, params: ChannelParams, mode: str = "paper"
) -> SinglePhotonTruth:
    """True per-photon-number quantities for bound-validity audits."""
    y0 = honest_yield(0, params, mode)
    y1 = honest_yield(1, params, mode)
    q1s = profile.mu * math.exp(-profile.mu) * y1
    if y1 <= 0.0:
        raise DegenerateChannel("single-photon yield is zero")
    e1x = params.p_d / (2.0 * y1)
    return SinglePhotonTruth(Y0=y0, Y1=y1, Q1s=q1s, e1x=e1x)
