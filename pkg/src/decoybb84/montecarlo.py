"""Seeded Monte Carlo of the full decoy-state BB84 round trip.

Every pulse runs through the whole pipeline: intensity-type and basis
selection, Poisson photon number, the configured attack transform,
per-photon survival, per-detector dark counts, double-click policy and
basis sifting.  Tallies feed :func:`empirical_statistics`, whose output
plugs straight into the decoy estimator.

Determinism: the pulse loop is chunked (fixed chunk size) and each chunk
draws from an independent substream spawned from (seed, chunk index), so
serial and parallel runs produce bit-identical tallies.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .attacks import BsConfig, PnsConfig, bs_statistics, pns_statistics
from .channel import (
    ChannelParams,
    ObservedStatistics,
    honest_statistics,
    honest_truth,
    SinglePhotonTruth,
)
from .decoy import DecoyBounds, estimate_bounds
from .errors import DomainError, InsufficientData
from .rates import KeyRateParams, RatePoint, rate_decoy
from .source import (
    MAX_SUPPORTED_INTENSITY,
    PULSE_TYPES,
    IntensityProfile,
    PulseType,
    validate_profile,
    _pmf_table,
)

CHUNK_SIZE = 1 << 20

DOUBLE_CLICK_POLICIES = ("random", "discard")


@dataclass(frozen=True)
class SimConfig:
    """Everything one reproducible run needs."""

    n_pulses: int
    seed: int
    profile: IntensityProfile
    channel: ChannelParams
    attack: PnsConfig | BsConfig | None = None
    double_click_policy: str = "random"

    def __post_init__(self):
        if self.n_pulses < 1:
            raise DomainError(f"n_pulses must be >= 1, got {self.n_pulses}")
        if self.double_click_policy not in DOUBLE_CLICK_POLICIES:
            raise DomainError(
                f"double_click_policy must be one of {DOUBLE_CLICK_POLICIES}"
            )
        validate_profile(self.profile)
        if self.profile.mu > MAX_SUPPORTED_INTENSITY:
            raise DomainError(
                f"signal intensity {self.profile.mu} above supported "
                f"sampling range (<= {MAX_SUPPORTED_INTENSITY})"
            )


def _zero_counts() -> dict[PulseType, int]:
    return {pt: 0 for pt in PULSE_TYPES}


@dataclass
class TallyCounts:
    """Raw per-type counters from one run (or one chunk)."""

    sent: dict[PulseType, int] = field(default_factory=_zero_counts)
    detected: dict[PulseType, int] = field(default_factory=_zero_counts)
    detected_z: dict[PulseType, int] = field(default_factory=_zero_counts)
    detected_x: dict[PulseType, int] = field(default_factory=_zero_counts)
    errors_z: dict[PulseType, int] = field(default_factory=_zero_counts)
    errors_x: dict[PulseType, int] = field(default_factory=_zero_counts)
    double_clicks: dict[PulseType, int] = field(default_factory=_zero_counts)

    def __add__(self, other: "TallyCounts") -> "TallyCounts":
        merged = TallyCounts()
        for name in (
            "sent", "detected", "detected_z", "detected_x",
            "errors_z", "errors_x", "double_clicks",
        ):
            a, b, m = getattr(self, name), getattr(other, name), getattr(merged, name)
            for pt in PULSE_TYPES:
                m[pt] = a[pt] + b[pt]
        return merged

    @property
    def total_sent(self) -> int:
        return sum(self.sent.values())


def _simulate_chunk(cfg: SimConfig, child_seed, n: int) -> TallyCounts:
    rng = np.random.default_rng(child_seed)
    profile, channel = cfg.profile, cfg.channel
    p_z = profile.p_z
    eta_t = channel.eta_t
    # Per-detector dark probability q: P(dark in at least one of two) = p_d.
    q_dark = 1.0 - math.sqrt(1.0 - channel.p_d)

    # Draw order is fixed; every branch consumes the same streams.
    cum_pv = np.cumsum(
        [profile.selection_probability(pt) for pt in PULSE_TYPES]
    )
    type_idx = np.searchsorted(cum_pv, rng.random(n), side="right")
    type_idx = np.minimum(type_idx, 2).astype(np.int8)
    basis_a_z = rng.random(n) < p_z
    basis_b_z = rng.random(n) < p_z
    bit_a = rng.integers(0, 2, n, dtype=np.int8)

    u_phot = rng.random(n)
    j = np.zeros(n, dtype=np.int64)
    for k, pt in enumerate(PULSE_TYPES):
        mask = type_idx == k
        if not mask.any():
            continue
        cdf = np.cumsum(_pmf_table(profile.intensity(pt)))
        j[mask] = np.searchsorted(cdf, u_phot[mask], side="right")

    attack = cfg.attack
    if attack is None:
        n_b = rng.binomial(j, eta_t)
    elif isinstance(attack, PnsConfig):
        blocked = rng.random(n) < attack.beta
        forwarded = np.where(j >= 2, j - 1, np.where(blocked, 0, j))
        if attack.forward_efficiency < 1.0:
            n_b = rng.binomial(forwarded, attack.forward_efficiency)
        else:
            n_b = forwarded
    else:
        t = attack.resolve_t(channel)
        n_b = rng.binomial(j, t)

    dark0 = rng.random(n) < q_dark
    dark1 = rng.random(n) < q_dark
    k_split = rng.binomial(n_b, 0.5)
    random_bit = rng.integers(0, 2, n, dtype=np.int8)

    basis_match = basis_a_z == basis_b_z
    # Detector indexed by outcome bit in the receiver basis.  Matched
    # bases send every photon to the detector of the sent bit; mismatched
    # bases split them 50/50.
    phot0 = np.where(basis_match, np.where(bit_a == 0, n_b, 0), k_split)
    phot1 = np.where(basis_match, np.where(bit_a == 1, n_b, 0), n_b - k_split)
    click0 = (phot0 > 0) | dark0
    click1 = (phot1 > 0) | dark1
    double = click0 & click1
    detected = click0 | click1
    if cfg.double_click_policy == "discard":
        counted = detected & ~double
    else:
        counted = detected
    bit_b = np.where(double, random_bit, np.where(click1, 1, 0)).astype(np.int8)
    error = counted & basis_match & (bit_b != bit_a)

    z_match = basis_match & basis_a_z
    x_match = basis_match & ~basis_a_z
    tally = TallyCounts()
    for k, pt in enumerate(PULSE_TYPES):
        mask = type_idx == k
        tally.sent[pt] = int(mask.sum())
        tally.detected[pt] = int((mask & counted).sum())
        tally.detected_z[pt] = int((mask & counted & z_match).sum())
        tally.detected_x[pt] = int((mask & counted & x_match).sum())
        tally.errors_z[pt] = int((mask & error & z_match).sum())
        tally.errors_x[pt] = int((mask & error & x_match).sum())
        tally.double_clicks[pt] = int((mask & double).sum())
    return tally


def run_simulation(cfg: SimConfig, workers: int = 1) -> TallyCounts:
    """Run the full pipeline; bit-identical for any worker count."""
    n_chunks = (cfg.n_pulses + CHUNK_SIZE - 1) // CHUNK_SIZE
    sizes = [
        min(CHUNK_SIZE, cfg.n_pulses - i * CHUNK_SIZE) for i in range(n_chunks)
    ]
    children = np.random.SeedSequence(cfg.seed).spawn(n_chunks)
    if workers <= 1 or n_chunks == 1:
        parts = [
            _simulate_chunk(cfg, children[i], sizes[i]) for i in range(n_chunks)
        ]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    lambda i: _simulate_chunk(cfg, children[i], sizes[i]),
                    range(n_chunks),
                )
            )
    total = TallyCounts()
    for part in parts:  # merge order fixed by chunk index
        total = total + part
    return total


def empirical_statistics(tally: TallyCounts) -> ObservedStatistics:
    """Frequencies from tallies; raises InsufficientData on starved types."""
    gains: dict[PulseType, float] = {}
    e_x: dict[PulseType, float] = {}
    e_z: dict[PulseType, float] = {}
    for pt in PULSE_TYPES:
        if tally.sent[pt] == 0:
            raise InsufficientData(f"no pulses sent for type {pt.value}")
        if tally.detected[pt] == 0:
            raise InsufficientData(f"no detections for type {pt.value}")
        gains[pt] = tally.detected[pt] / tally.sent[pt]
        if tally.detected_x[pt] == 0:
            raise InsufficientData(
                f"no x-basis-matched detections for type {pt.value}"
            )
        e_x[pt] = tally.errors_x[pt] / tally.detected_x[pt]
        if tally.detected_z[pt] > 0:
            e_z[pt] = tally.errors_z[pt] / tally.detected_z[pt]
        else:
            e_z[pt] = 0.0
    if tally.detected_z[PulseType.SIGNAL] == 0:
        raise InsufficientData("no z-basis-matched signal detections")
    e_sz = (
        tally.errors_z[PulseType.SIGNAL] / tally.detected_z[PulseType.SIGNAL]
    )
    return ObservedStatistics(Q=gains, E_x=e_x, E_sz=e_sz, E_z=e_z)


@dataclass(frozen=True)
class AuditEntry:
    """One empirical-vs-analytic comparison with its binomial z-score."""

    name: str
    empirical: float
    analytic: float
    z: float


@dataclass(frozen=True)
class EndToEndReport:
    """Empirical statistics, certified bounds and rate, plus the audit."""

    config: SimConfig
    tally: TallyCounts
    stats: ObservedStatistics
    bounds: DecoyBounds
    rate: RatePoint
    analytic_stats: ObservedStatistics
    truth: SinglePhotonTruth | None
    audit: tuple
    max_abs_z: float
    resolved_t: float | None = None
    rate_params: KeyRateParams = KeyRateParams()

    def audit_passed(self, threshold: float = 3.0) -> bool:
        return self.max_abs_z <= threshold


def _analytic_reference(
    cfg: SimConfig,
) -> tuple[ObservedStatistics, SinglePhotonTruth | None, float | None]:
    profile, channel = cfg.profile, cfg.channel
    attack = cfg.attack
    if attack is None:
        stats = honest_statistics(profile, channel, "exact")
        return stats, honest_truth(profile, channel, "exact"), None
    if isinstance(attack, PnsConfig):
        stats = pns_statistics(profile, attack, channel.p_d)
        y1 = (1.0 - attack.beta) * attack.forward_efficiency
        y1 = y1 + (1.0 - y1) * channel.p_d
        truth = SinglePhotonTruth(
            Y0=channel.p_d,
            Y1=y1,
            Q1s=profile.mu * math.exp(-profile.mu) * y1,
            e1x=0.0,
        )
        return stats, truth, None
    t = attack.resolve_t(channel)
    stats = bs_statistics(profile, t, channel.p_d)
    y1 = 1.0 - (1.0 - channel.p_d) * (1.0 - t)
    truth = SinglePhotonTruth(
        Y0=channel.p_d,
        Y1=y1,
        Q1s=profile.mu * math.exp(-profile.mu) * y1,
        e1x=channel.p_d / (2.0 * y1) if y1 > 0 else 0.0,
    )
    return stats, truth, t


def _binomial_z(emp: float, ana: float, trials: int) -> float:
    if trials == 0:
        return 0.0
    var = ana * (1.0 - ana) / trials
    if var <= 0.0:
        return 0.0 if emp == ana else math.inf
    return (emp - ana) / math.sqrt(var)


def end_to_end_report(
    cfg: SimConfig,
    rate_params: KeyRateParams = KeyRateParams(),
    workers: int = 1,
) -> EndToEndReport:
    """Simulate, estimate, rate, and audit against the analytic model."""
    tally = run_simulation(cfg, workers=workers)
    stats = empirical_statistics(tally)
    bounds = estimate_bounds(stats, cfg.profile)
    rate = rate_decoy(stats, bounds, rate_params, cfg.channel.L_km)
    analytic_stats, truth, resolved_t = _analytic_reference(cfg)
    audit = []
    for pt in PULSE_TYPES:
        audit.append(
            AuditEntry(
                name=f"Q_{pt.value}",
                empirical=stats.Q[pt],
                analytic=analytic_stats.Q[pt],
                z=_binomial_z(stats.Q[pt], analytic_stats.Q[pt], tally.sent[pt]),
            )
        )
        audit.append(
            AuditEntry(
                name=f"E_x_{pt.value}",
                empirical=stats.E_x[pt],
                analytic=analytic_stats.E_x[pt],
                z=_binomial_z(
                    stats.E_x[pt], analytic_stats.E_x[pt], tally.detected_x[pt]
                ),
            )
        )
    audit.append(
        AuditEntry(
            name="E_sz",
            empirical=stats.E_sz,
            analytic=analytic_stats.E_sz,
            z=_binomial_z(
                stats.E_sz,
                analytic_stats.E_sz,
                tally.detected_z[PulseType.SIGNAL],
            ),
        )
    )
    max_abs_z = max(abs(entry.z) for entry in audit)
    return EndToEndReport(
        config=cfg,
        tally=tally,
        stats=stats,
        bounds=bounds,
        rate=rate,
        analytic_stats=analytic_stats,
        truth=truth,
        audit=tuple(audit),
        max_abs_z=max_abs_z,
        resolved_t=resolved_t,
        rate_params=rate_params,
    )
