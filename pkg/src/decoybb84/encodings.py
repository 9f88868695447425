"""Equivalence of polarization and phase encoding for two-mode coherent states.

A coherent state on two modes is fully described by its pair of complex
amplitudes, so states are compared at the amplitude level.  Polarization
encoding uses horizontal/vertical (H/V) modes; rewriting it in the
right/left circular basis (R/L) reproduces the phase-encoding amplitudes
on two time windows up to a global phase, which phase randomization
erases.  The mode change preserves total intensity, hence the photon
number distribution.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DomainError, WrongModeLabels

_SQRT2 = math.sqrt(2.0)
_AMPLITUDE_TOL = 1e-12

HV = ("H", "V")
RL = ("R", "L")
TIME_WINDOWS = ("t1", "t2")


@dataclass(frozen=True)
class TwoModeCoherentState:
    """Amplitude pair on two labelled modes."""

    alpha1: complex
    alpha2: complex
    mode_labels: tuple = HV

    @property
    def total_intensity(self) -> float:
        return abs(self.alpha1) ** 2 + abs(self.alpha2) ** 2

    def amplitudes(self) -> tuple:
        return (self.alpha1, self.alpha2)


def polarization_state(u: int, b: str, alpha: complex) -> TwoModeCoherentState:
    """Polarization-encoded state in H/V modes for bit u and basis b."""
    if u not in (0, 1):
        raise DomainError(f"bit must be 0 or 1, got {u}")
    if b not in ("z", "x"):
        raise DomainError(f"basis must be 'z' or 'x', got {b!r}")
    if b == "z":
        pair = (alpha, 0j) if u == 0 else (0j, alpha)
    else:
        pair = (alpha / _SQRT2, alpha / _SQRT2 if u == 0 else -alpha / _SQRT2)
    return TwoModeCoherentState(pair[0], pair[1], HV)


def to_circular(state: TwoModeCoherentState) -> TwoModeCoherentState:
    """Rewrite an H/V state in the circular R/L mode basis.

    alpha_R = (alpha_H + i alpha_V) / sqrt(2),
    alpha_L = (alpha_H - i alpha_V) / sqrt(2).
    """
    if tuple(state.mode_labels) != HV:
        raise WrongModeLabels(
            f"to_circular expects H/V modes, got {state.mode_labels}"
        )
    a_h, a_v = state.alpha1, state.alpha2
    return TwoModeCoherentState(
        (a_h + 1j * a_v) / _SQRT2, (a_h - 1j * a_v) / _SQRT2, RL
    )


def phase_encoding_state(u: int, b: str, alpha: complex) -> TwoModeCoherentState:
    """Phase-encoded state on two time windows.

    The first window carries (-1)^u e^{i phi_b} alpha / sqrt(2) with
    phi_z = 0 and phi_x = pi/2; the second window carries the reference
    pulse alpha / sqrt(2).  Each window holds half the total intensity.
    """
    if u not in (0, 1):
        raise DomainError(f"bit must be 0 or 1, got {u}")
    if b not in ("z", "x"):
        raise DomainError(f"basis must be 'z' or 'x', got {b!r}")
    phi = 0.0 if b == "z" else math.pi / 2.0
    first = ((-1) ** u) * cmath.exp(1j * phi) * alpha / _SQRT2
    return TwoModeCoherentState(first, alpha / _SQRT2, TIME_WINDOWS)


@dataclass(frozen=True)
class PhaseEquivalence:
    equivalent: bool
    phase: float  # theta with s2 = e^{i theta} s1, when equivalent


def equivalent_up_to_global_phase(
    s1: TwoModeCoherentState,
    s2: TwoModeCoherentState,
    tol: float = _AMPLITUDE_TOL,
) -> PhaseEquivalence:
    """Test s2 = e^{i theta} s1 componentwise and extract theta.

    The phase comes from the first component of s1 above tolerance; zero
    vectors compare equal only to zero vectors (theta = 0).
    """
    a = s1.amplitudes()
    b = s2.amplitudes()
    pivot = None
    for k in range(2):
        if abs(a[k]) > tol:
            pivot = k
            break
    if pivot is None:
        equivalent = all(abs(bk) <= tol for bk in b)
        return PhaseEquivalence(equivalent=equivalent, phase=0.0)
    ratio = b[pivot] / a[pivot]
    mag = abs(ratio)
    if abs(mag - 1.0) > tol / max(abs(a[pivot]), tol):
        return PhaseEquivalence(equivalent=False, phase=0.0)
    theta = cmath.phase(ratio)
    rot = cmath.exp(1j * theta)
    for ak, bk in zip(a, b):
        if abs(bk - rot * ak) > tol:
            return PhaseEquivalence(equivalent=False, phase=0.0)
    return PhaseEquivalence(equivalent=True, phase=theta)
