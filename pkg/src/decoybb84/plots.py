"""Figure rendering for scan tables and simulation audits.

Presentation only: the CSV files are the contract, figures are rendered
next to them for quick inspection.  Uses the Agg backend so headless
batch runs work.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .montecarlo import EndToEndReport
from .scan import CURVES, ScanConfig, ScanRow
from .source import PULSE_TYPES

_CURVE_STYLE = {
    "decoy": dict(color="tab:purple", linestyle=":", linewidth=2.0,
                  label="decoy-certified"),
    "gllp_truth": dict(color="tab:blue", linestyle="-", linewidth=1.6,
                       label="PNS-optimal (truth values)"),
    "bs_etaT": dict(color="tab:green", linestyle="--", linewidth=1.2,
                    label="beam splitting, t = eta T"),
    "bs_T": dict(color="tab:orange", linestyle="-.", linewidth=1.2,
                 label="beam splitting, t = T"),
}


def rate_scan_figure(cfg: ScanConfig, rows: list[ScanRow], log_y: bool = True):
    """Secure rate per sifted bit versus channel length."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    lengths = [row.L_km for row in rows]
    for curve in CURVES:
        if curve not in cfg.curves:
            continue
        values = [row.rates[curve].R_secure for row in rows]
        if log_y:
            values = [v if v > 0 else float("nan") for v in values]
        ax.plot(lengths, values, **_CURVE_STYLE[curve])
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel("channel length L (km)")
    ax.set_ylabel("secure key rate per sifted bit")
    ax.set_title(
        f"mu={cfg.profile.mu}, nu1={cfg.profile.nu1}, nu2={cfg.profile.nu2}, "
        f"pd={cfg.p_d}, eta={cfg.eta}, delta={cfg.delta_db_per_km} dB/km"
    )
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="lower left", fontsize=9)
    fig.tight_layout()
    return fig


def simulation_audit_figure(report: EndToEndReport):
    """Empirical versus analytic gains and x-basis error rates."""
    fig, (ax_q, ax_e) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    labels = [pt.value for pt in PULSE_TYPES]
    xs = range(len(labels))
    emp_q = [report.stats.Q[pt] for pt in PULSE_TYPES]
    ana_q = [report.analytic_stats.Q[pt] for pt in PULSE_TYPES]
    ax_q.plot(xs, ana_q, "s", color="tab:gray", markersize=9,
              fillstyle="none", label="analytic")
    ax_q.plot(xs, emp_q, "o", color="tab:blue", label="empirical")
    ax_q.set_yscale("log")
    ax_q.set_xticks(list(xs), labels)
    ax_q.set_ylabel("gain Q")
    ax_q.grid(True, which="both", alpha=0.3)
    ax_q.legend(fontsize=9)

    emp_e = [report.stats.E_x[pt] for pt in PULSE_TYPES]
    ana_e = [report.analytic_stats.E_x[pt] for pt in PULSE_TYPES]
    ax_e.plot(xs, ana_e, "s", color="tab:gray", markersize=9,
              fillstyle="none", label="analytic")
    ax_e.plot(xs, emp_e, "o", color="tab:red", label="empirical")
    ax_e.set_xticks(list(xs), labels)
    ax_e.set_ylabel("x-basis error rate")
    ax_e.grid(True, alpha=0.3)
    ax_e.legend(fontsize=9)

    fig.suptitle(
        f"n={report.config.n_pulses}, seed={report.config.seed}, "
        f"max |z| = {report.max_abs_z:.2f}"
    )
    fig.tight_layout()
    return fig


def save_figure(fig, path) -> None:
    fig.savefig(path)
    plt.close(fig)
