"""Adversary models: photon-number splitting (PNS) and beam splitting (BS).

PNS adversary
    Measures the photon number nondestructively.  Multiphoton pulses lose
    one photon to the adversary's memory; the remainder is forwarded over
    a lossless line to unit-efficiency detectors.  Single-photon pulses
    are blocked with probability ``beta`` (to imitate natural loss) and
    otherwise forwarded the same way.  Yields therefore depend only on
    the photon number, never on the pulse intensity:

        Y_0 = p_d,  Y_1 = (1 - beta) + beta p_d,  Y_i = 1  (i >= 2)

    Forwarded pulses produce no errors: after the basis announcements the
    adversary measures its stored photon in the announced basis, so only
    dark counts on otherwise-empty pulses contribute (error 1/2 each).

BS adversary
    Splits every pulse on a beam splitter of transmittance ``t``,
    forwarding the kept fraction losslessly.  At the photon-count level
    this is binomial thinning, which maps Poisson pulses to independent
    Poisson marginals for receiver and adversary.  The adversary's
    ignorance about the key bit is exp(-(1-t) mu): total only when its
    share is vacuum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, ObservedStatistics, gain_from_yields, honest_statistics
from .errors import DomainError, Infeasible
from .source import (
    PULSE_TYPES,
    IntensityProfile,
    PulseType,
    photon_number_pmf,
    validate_profile,
)

_BISECT_ITERATIONS = 200


@dataclass(frozen=True)
class PnsConfig:
    """Blocking probability for single-photon pulses.

    ``forward_efficiency`` is the per-photon detection probability for
    forwarded pulses.  The adversary controls the line and detectors, so
    it defaults to 1; lower values exist only for sensitivity studies.
    """

    beta: float
    forward_efficiency: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise DomainError(f"beta must be in [0,1], got {self.beta}")
        if not 0.0 < self.forward_efficiency <= 1.0:
            raise DomainError(
                f"forward_efficiency must be in (0,1], got {self.forward_efficiency}"
            )


@dataclass(frozen=True)
class BsConfig:
    """Adversary-chosen transmittance for the beam-splitting attack.

    Either fix ``t`` directly or leave it None and let ``resolve_t``
    derive it from the channel: mode "eta_T" assumes the adversary also
    controls the detectors (t = eta T), mode "T_only" leaves detector
    efficiency untouched (t = T).
    """

    t: float | None = None
    mode: str = "eta_T"

    def __post_init__(self):
        if self.t is not None and not 0.0 <= self.t <= 1.0:
            raise DomainError(f"t must be in [0,1], got {self.t}")
        if self.mode not in ("eta_T", "T_only"):
            raise DomainError(f"unknown BS mode {self.mode!r}")

    def resolve_t(self, params: ChannelParams) -> float:
        if self.t is not None:
            return self.t
        return params.eta_t if self.mode == "eta_T" else params.transmission


def pns_yields(cfg: PnsConfig, p_d: float):
    """Yield sequence under PNS; a single function of the photon number.

    The same sequence applies to every pulse type: the adversary sees
    photon numbers, never intensities.
    """
    fe = cfg.forward_efficiency
    beta = cfg.beta

    def yield_i(i: int) -> float:
        if i == 0:
            return p_d
        if i == 1:
            return (1.0 - beta) * (fe + (1.0 - fe) * p_d) + beta * p_d
        # one photon removed, i-1 forwarded
        miss = (1.0 - fe) ** (i - 1)
        return (1.0 - miss) + miss * p_d

    return yield_i


def pns_gain(profile_intensity: float, cfg: PnsConfig, p_d: float) -> float:
    """Gain of one pulse type under PNS yields."""
    return gain_from_yields(profile_intensity, pns_yields(cfg, p_d))


def pns_solve_beta(
    profile: IntensityProfile,
    params: ChannelParams,
    forward_efficiency: float = 1.0,
    mode: str = "paper",
) -> float:
    """Blocking fraction that reproduces the honest signal gain.

    The PNS gain is monotone decreasing in ``beta``; the equation
    ``gain(beta) = Q_s_honest`` is solved by bisection.  Raises
    :class:`Infeasible` when the target lies outside the achievable
    range: multiphoton passthrough keeps the gain above the target even
    at beta = 1 (the usual case for bright signals over lossy lines), or
    the honest gain exceeds what forwarding can deliver at beta = 0
    (nothing to hide behind on a nearly lossless channel).
    """
    validate_profile(profile)
    target = honest_statistics(profile, params, mode).Q[PulseType.SIGNAL]

    def gain(beta: float) -> float:
        return pns_gain(
            profile.mu, PnsConfig(beta, forward_efficiency), params.p_d
        )

    g_max, g_min = gain(0.0), gain(1.0)
    if target > g_max or target < g_min:
        raise Infeasible(
            f"PNS cannot reproduce signal gain {target:.6g}: achievable "
            f"range is [{g_min:.6g}, {g_max:.6g}]",
            min_gain=g_min,
            max_gain=g_max,
            target=target,
        )
    lo, hi = 0.0, 1.0
    for _ in range(_BISECT_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if gain(mid) >= target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def pns_statistics(
    profile: IntensityProfile, cfg: PnsConfig, p_d: float
) -> ObservedStatistics:
    """Per-type gains and error rates the receiver observes under PNS.

    Errors: forwarded photons are never disturbed (e_i = 0 for i >= 1,
    the stealthiest choice for the adversary), so only dark counts on
    vacuum pulses contribute, each wrong with probability 1/2.
    """
    validate_profile(profile)
    yields = pns_yields(cfg, p_d)
    gains = {
        pt: gain_from_yields(profile.intensity(pt), yields) for pt in PULSE_TYPES
    }
    e_x = {}
    for pt in PULSE_TYPES:
        joint_err = photon_number_pmf(profile.intensity(pt), 0) * p_d / 2.0
        e_x[pt] = joint_err / gains[pt] if gains[pt] > 0 else 0.0
    e_sz = e_x[PulseType.SIGNAL]
    return ObservedStatistics(Q=gains, E_x=e_x, E_sz=e_sz, E_z=dict(e_x))


def pns_known_fraction(
    profile: IntensityProfile, cfg: PnsConfig, p_d: float
) -> float:
    """Fraction of detected signal pulses the adversary knows completely.

    These are the detections that originate from multiphoton pulses,
    Q_{>=2} / Q_s under the PNS yields.
    """
    validate_profile(profile)
    yields = pns_yields(cfg, p_d)
    mu = profile.mu
    q_s = gain_from_yields(mu, yields)
    if q_s <= 0.0:
        raise DomainError("PNS signal gain is zero; fraction undefined")
    q0 = photon_number_pmf(mu, 0) * yields(0)
    q1 = photon_number_pmf(mu, 1) * yields(1)
    return 1.0 - (q0 + q1) / q_s


def bs_split(
    j: int, cfg: BsConfig, rng: np.random.Generator, t: float | None = None
) -> tuple[int, int]:
    """Split j photons on the beam splitter: (receiver count, adversary count).

    Each photon independently goes to the receiver with probability t.
    Photon number is conserved exactly.
    """
    if j < 0:
        raise DomainError(f"photon count must be >= 0, got {j}")
    t_eff = cfg.t if t is None else t
    if t_eff is None:
        raise DomainError("BsConfig has no explicit t; pass t or resolve it first")
    kept = int(rng.binomial(j, t_eff))
    return kept, j - kept


def bs_eve_ignorance(t: float, mu: float) -> float:
    """Adversary's ignorance about the key bit: exp(-(1-t) mu)."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t must be in [0,1], got {t}")
    if mu < 0:
        raise DomainError(f"mu must be >= 0, got {mu}")
    return math.exp(-(1.0 - t) * mu)


def bs_statistics(
    profile: IntensityProfile, t: float, p_d: float
) -> ObservedStatistics:
    """Receiver statistics under beam splitting of transmittance t.

    Identical to an honest channel of overall transmission t: gains from
    yields 1 - (1-p_d)(1-t)^j, errors from dark counts only.
    """
    validate_profile(profile)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t must be in [0,1], got {t}")

    def yield_j(j: int) -> float:
        return 1.0 - (1.0 - p_d) * (1.0 - t) ** j

    gains = {
        pt: gain_from_yields(profile.intensity(pt), yield_j) for pt in PULSE_TYPES
    }
    if any(q <= 0.0 for q in gains.values()):
        raise DomainError("BS statistics degenerate: zero gain")
    e_x = {pt: (p_d / 2.0) / gains[pt] for pt in PULSE_TYPES}
    return ObservedStatistics(
        Q=gains, E_x=e_x, E_sz=e_x[PulseType.SIGNAL], E_z=dict(e_x)
    )
