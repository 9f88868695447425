"""Rate-versus-distance scans and their deterministic CSV serialization.

One row per channel length: honest observed statistics, certified decoy
bounds, and the selected rate curves (decoy-certified, truth-value
PNS-optimal, beam splitting at t = eta T and t = T), each raw and
clamped.  CSV output is byte-deterministic: fixed column order, 17
significant digits, '.' decimal separator, '\\n' line ends.  A saturated
error bound serializes as the literal token "unbounded".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import ChannelParams, honest_statistics, honest_truth
from .decoy import DecoyBounds, estimate_bounds
from .errors import DomainError
from .rates import KeyRateParams, RatePoint, rate_bs, rate_decoy, rate_gllp
from .source import IntensityProfile, PulseType, validate_profile

CURVES = ("decoy", "gllp_truth", "bs_etaT", "bs_T")


@dataclass(frozen=True)
class ScanConfig:
    """Length range, source profile, channel constants and curve set."""

    l_min: float
    l_max: float
    l_step: float
    profile: IntensityProfile
    delta_db_per_km: float = 0.2
    eta: float = 0.1
    p_d: float = 1e-6
    rate_params: KeyRateParams = KeyRateParams()
    curves: tuple = CURVES
    mode: str = "paper"
    per_pulse: bool = False

    def __post_init__(self):
        if self.l_min > self.l_max:
            raise DomainError(
                f"l_min must be <= l_max, got {self.l_min} > {self.l_max}"
            )
        if self.l_step <= 0:
            raise DomainError(f"l_step must be > 0, got {self.l_step}")
        unknown = set(self.curves) - set(CURVES)
        if unknown:
            raise DomainError(f"unknown curves {sorted(unknown)}")
        validate_profile(self.profile)

    def lengths(self) -> list[float]:
        count = int(math.floor((self.l_max - self.l_min) / self.l_step + 1e-9)) + 1
        return [self.l_min + k * self.l_step for k in range(count)]


@dataclass(frozen=True)
class ScanRow:
    """Observed statistics, bounds and rates at one channel length."""

    L_km: float
    Q_s: float
    E_sz: float
    Q_d1: float
    Q_d2: float
    bounds: DecoyBounds
    rates: dict  # curve name -> RatePoint


def scan_point(cfg: ScanConfig, L: float) -> ScanRow:
    """Evaluate every selected curve at one length."""
    channel = ChannelParams(cfg.delta_db_per_km, L, cfg.eta, cfg.p_d)
    stats = honest_statistics(cfg.profile, channel, cfg.mode)
    bounds = estimate_bounds(stats, cfg.profile)
    q_s = stats.Q[PulseType.SIGNAL]
    rates: dict[str, RatePoint] = {}
    if "decoy" in cfg.curves:
        rates["decoy"] = rate_decoy(stats, bounds, cfg.rate_params, L)
    if "gllp_truth" in cfg.curves:
        truth = honest_truth(cfg.profile, channel, cfg.mode)
        rates["gllp_truth"] = rate_gllp(
            truth.Q1s, q_s, truth.e1x, stats.E_sz, cfg.rate_params, L
        )
    if "bs_etaT" in cfg.curves:
        rates["bs_etaT"] = rate_bs(
            channel.eta_t, cfg.profile.mu, stats.E_sz, cfg.rate_params, L
        )
    if "bs_T" in cfg.curves:
        rates["bs_T"] = rate_bs(
            channel.transmission, cfg.profile.mu, stats.E_sz, cfg.rate_params, L
        )
    return ScanRow(
        L_km=L,
        Q_s=q_s,
        E_sz=stats.E_sz,
        Q_d1=stats.Q[PulseType.DECOY1],
        Q_d2=stats.Q[PulseType.DECOY2],
        bounds=bounds,
        rates=rates,
    )


def rate_scan(cfg: ScanConfig) -> list[ScanRow]:
    """One row per length, assembled in L order."""
    return [scan_point(cfg, L) for L in cfg.lengths()]


def gllp_truth_rate(cfg: ScanConfig, L: float) -> float:
    """Raw truth-value rate at one length (continuous in L)."""
    channel = ChannelParams(cfg.delta_db_per_km, L, cfg.eta, cfg.p_d)
    stats = honest_statistics(cfg.profile, channel, cfg.mode)
    truth = honest_truth(cfg.profile, channel, cfg.mode)
    return rate_gllp(
        truth.Q1s, stats.Q[PulseType.SIGNAL], truth.e1x, stats.E_sz,
        cfg.rate_params, L,
    ).R_raw


def find_zero_crossing(
    fn, lo: float, hi: float, tol: float = 1e-6
) -> float:
    """Bisect a sign change of fn on [lo, hi]."""
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0:
        raise DomainError(
            f"no sign change on [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid
        if f_lo * f_mid < 0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def _fmt(value: float) -> str:
    if math.isinf(value):
        return "unbounded"
    return format(value, ".17g")


def csv_header(cfg: ScanConfig) -> str:
    cols = ["L_km", "Q_s", "E_sz", "Q_d1", "Q_d2",
            "Y0_L", "Y1_L", "Q1s_L", "e1x_U"]
    for curve in CURVES:
        if curve in cfg.curves:
            cols.append(f"R_{curve}_raw")
            cols.append(f"R_{curve}_secure")
    if cfg.per_pulse and "decoy" in cfg.curves:
        cols.append("R_decoy_per_pulse_raw")
        cols.append("R_decoy_per_pulse_secure")
    return ",".join(cols)


def csv_line(cfg: ScanConfig, row: ScanRow) -> str:
    fields = [
        _fmt(row.L_km), _fmt(row.Q_s), _fmt(row.E_sz),
        _fmt(row.Q_d1), _fmt(row.Q_d2),
        _fmt(row.bounds.Y0_L), _fmt(row.bounds.Y1_L),
        _fmt(row.bounds.Q1s_L), _fmt(row.bounds.e1x_U),
    ]
    for curve in CURVES:
        if curve in cfg.curves:
            point = row.rates[curve]
            fields.append(_fmt(point.R_raw))
            fields.append(_fmt(point.R_secure))
    if cfg.per_pulse and "decoy" in cfg.curves:
        point = row.rates["decoy"]
        fields.append(_fmt(row.Q_s * point.R_raw))
        fields.append(_fmt(row.Q_s * point.R_secure))
    return ",".join(fields)


def write_scan_csv(cfg: ScanConfig, rows: list[ScanRow], path) -> None:
    """Byte-deterministic CSV: same config always writes the same file."""
    lines = [csv_header(cfg)]
    lines.extend(csv_line(cfg, row) for row in rows)
    with open(path, "w", newline="") as handle:
        handle.write("\n".join(lines) + "\n")
