"""Phase-randomized weak-coherent source model.

The source is treated as a Poisson mixture of Fock states: every pulse
carries ``j`` photons with probability ``exp(-mu) * mu**j / j!`` where
``mu`` is the selected intensity.  Intensity configuration (one signal,
two decoys) and protocol choice probabilities live in
:class:`IntensityProfile`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolation, DomainError

# Sequential-search inversion is exact and branch-light for small means;
# protocol intensities are well below 1, so larger means are rejected.
MAX_SUPPORTED_INTENSITY = 10.0

# Probability-sum tolerance for the selection/basis probabilities.
_PROB_SUM_TOL = 1e-12


class PulseType(enum.Enum):
    """Pulse intensity classes, in stable output order."""

    SIGNAL = "signal"
    DECOY1 = "decoy1"
    DECOY2 = "decoy2"


PULSE_TYPES = (PulseType.SIGNAL, PulseType.DECOY1, PulseType.DECOY2)


@dataclass(frozen=True)
class IntensityProfile:
    """Signal/decoy intensities plus selection and basis probabilities.

    ``mu`` is the signal intensity, ``nu1 > nu2`` the decoy intensities.
    ``p_s``, ``p_d1``, ``p_d2`` are the pulse-type selection probabilities
    and ``p_z`` the probability of choosing the z basis.  Selection
    probabilities are asymptotically irrelevant and default to uniform.
    """

    mu: float
    nu1: float
    nu2: float
    p_s: float = 1.0 / 3.0
    p_d1: float = 1.0 / 3.0
    p_d2: float = 1.0 / 3.0
    p_z: float = 0.5

    def intensity(self, pulse_type: PulseType) -> float:
        return {
            PulseType.SIGNAL: self.mu,
            PulseType.DECOY1: self.nu1,
            PulseType.DECOY2: self.nu2,
        }[pulse_type]

    def selection_probability(self, pulse_type: PulseType) -> float:
        return {
            PulseType.SIGNAL: self.p_s,
            PulseType.DECOY1: self.p_d1,
            PulseType.DECOY2: self.p_d2,
        }[pulse_type]


def validate_profile(profile: IntensityProfile) -> IntensityProfile:
    """Check the intensity and probability constraints.

    Returns the profile unchanged when every invariant holds, otherwise
    raises :class:`ConstraintViolation` naming the failed inequality.
    """
    if not 0 <= profile.nu2:
        raise ConstraintViolation(f"nu2 >= 0 violated: nu2={profile.nu2}")
    if not profile.nu2 < profile.nu1:
        raise ConstraintViolation(
            f"nu2 < nu1 violated: nu1={profile.nu1}, nu2={profile.nu2}"
        )
    if not profile.nu1 + profile.nu2 < profile.mu:
        raise ConstraintViolation(
            f"nu1 + nu2 < mu violated: nu1+nu2={profile.nu1 + profile.nu2}, "
            f"mu={profile.mu}"
        )
    for name, p in (("p_s", profile.p_s), ("p_d1", profile.p_d1),
                    ("p_d2", profile.p_d2)):
        if not 0.0 < p < 1.0:
            raise ConstraintViolation(f"{name} in (0,1) violated: {name}={p}")
    if abs(profile.p_s + profile.p_d1 + profile.p_d2 - 1.0) > _PROB_SUM_TOL:
        raise ConstraintViolation(
            "p_s + p_d1 + p_d2 = 1 violated: sum="
            f"{profile.p_s + profile.p_d1 + profile.p_d2}"
        )
    if not 0.0 < profile.p_z < 1.0:
        raise ConstraintViolation(f"0 < p_z < 1 violated: p_z={profile.p_z}")
    return profile


def photon_number_pmf(intensity: float, j: int) -> float:
    """Probability that a pulse of the given mean photon number carries j photons.

    Evaluated in log space so the tail stays accurate far beyond j = 50.
    """
    if intensity < 0:
        raise DomainError(f"intensity must be >= 0, got {intensity}")
    if j < 0:
        raise DomainError(f"photon count must be >= 0, got {j}")
    if intensity == 0.0:
        return 1.0 if j == 0 else 0.0
    return math.exp(-intensity + j * math.log(intensity) - math.lgamma(j + 1))


def _pmf_table(intensity: float, tail: float = 1e-18) -> np.ndarray:
    """Poisson probabilities 0..j_max with remaining tail mass below ``tail``."""
    probs = [math.exp(-intensity)]
    acc = probs[0]
    j = 0
    while 1.0 - acc > tail and j < 512:
        j += 1
        probs.append(probs[-1] * intensity / j)
        acc += probs[-1]
    return np.asarray(probs)


def sample_photon_number(intensity: float, rng: np.random.Generator) -> int:
    """Draw one Poisson photon count by inversion (sequential search).

    Consumes exactly one uniform variate, so the draw is deterministic
    given the stream state.
    """
    if intensity < 0:
        raise DomainError(f"intensity must be >= 0, got {intensity}")
    if intensity > MAX_SUPPORTED_INTENSITY:
        raise DomainError(
            f"intensity {intensity} above supported range "
            f"(<= {MAX_SUPPORTED_INTENSITY})"
        )
    if intensity == 0.0:
        rng.random()
        return 0
    u = rng.random()
    p = math.exp(-intensity)
    acc = p
    j = 0
    while u > acc and j < 512:
        j += 1
        p *= intensity / j
        acc += p
    return j


def sample_photon_numbers(
    intensity: float, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized inversion sampling: n Poisson draws from one uniform each."""
    if intensity < 0:
        raise DomainError(f"intensity must be >= 0, got {intensity}")
    if intensity > MAX_SUPPORTED_INTENSITY:
        raise DomainError(
            f"intensity {intensity} above supported range "
            f"(<= {MAX_SUPPORTED_INTENSITY})"
        )
    u = rng.random(n)
    if intensity == 0.0:
        return np.zeros(n, dtype=np.int64)
    cdf = np.cumsum(_pmf_table(intensity))
    return np.searchsorted(cdf, u, side="right").astype(np.int64)
