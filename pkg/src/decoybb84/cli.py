"""Batch front door: parameter scans, Monte Carlo runs, verification suites.

Subcommands
    rate-scan   rate-versus-distance table (CSV) plus a rendered figure
    simulate    one Monte Carlo run with an empirical-vs-analytic audit
    verify      property suites: inequality, convexity, encoding, bounds

Configuration comes from an INI-style file (flat key=value under
sections, see ``--config``) overridden by command-line flags; flags win.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from pathlib import Path

import numpy as np

from .attacks import BsConfig, PnsConfig, bs_statistics, pns_solve_beta, pns_statistics
from .channel import ChannelParams, honest_statistics, honest_truth
from .decoy import estimate_bounds
from .encodings import (
    equivalent_up_to_global_phase,
    phase_encoding_state,
    polarization_state,
    to_circular,
)
from .errors import (
    AssertionFailure,
    ConstraintViolation,
    DecoyBB84Error,
    DomainError,
    Infeasible,
)
from .montecarlo import SimConfig, end_to_end_report
from .rates import KeyRateParams, compare_pns_bs
from .scan import CURVES, ScanConfig, rate_scan, write_scan_csv
from .source import PULSE_TYPES, IntensityProfile
from .entropy import verify_joint_convexity, verify_vacuum_component_entropy

# Reference operating point used as the flag defaults.
DEFAULTS = {
    "mu": 0.5, "nu1": 0.01, "nu2": 0.001,
    "p_s": 1.0 / 3.0, "p_d1": 1.0 / 3.0, "p_d2": 1.0 / 3.0, "p_z": 0.5,
    "eta": 0.1, "pd": 1e-6, "delta_db": 0.2,
    "f": 1.0,
    "l_min": 0.0, "l_max": 200.0, "l_step": 1.0,
    "mode": "paper", "curves": ",".join(CURVES), "per_pulse": False,
    "l": 50.0, "n_pulses": 1_000_000, "seed": 2026,
    "attack": "none", "beta": None, "forward_efficiency": 1.0,
    "bs_t": None, "bs_mode": "eta_T", "policy": "random", "workers": 1,
}

_CONFIG_SECTIONS = {
    "profile": {"mu": float, "nu1": float, "nu2": float, "p_s": float,
                "p_d1": float, "p_d2": float, "p_z": float},
    "channel": {"eta": float, "pd": float, "delta_db": float},
    "rate": {"f": float},
    "scan": {"l_min": float, "l_max": float, "l_step": float, "mode": str,
             "curves": str, "per_pulse": bool},
    "simulate": {"l": float, "n_pulses": int, "seed": int, "attack": str,
                 "beta": float, "forward_efficiency": float, "bs_t": float,
                 "bs_mode": str, "policy": str, "workers": int},
    "output": {"out": str, "fig": str},
}


class ConfigError(DecoyBB84Error):
    pass


def _load_config(path: str) -> dict:
    """Flatten an INI file into {key: value} with per-field diagnostics."""
    parser = configparser.ConfigParser()
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        # configparser messages carry the offending line
        raise ConfigError(f"{path}: {exc}") from exc
    if not read:
        raise ConfigError(f"config file not found: {path}")
    values: dict = {}
    for section in parser.sections():
        if section not in _CONFIG_SECTIONS:
            raise ConfigError(f"{path}: unknown section [{section}]")
        schema = _CONFIG_SECTIONS[section]
        for key, raw in parser.items(section):
            if key not in schema:
                raise ConfigError(
                    f"{path}: unknown key '{key}' in section [{section}]"
                )
            cast = schema[key]
            try:
                if cast is bool:
                    values[key] = raw.strip().lower() in ("1", "true", "yes", "on")
                else:
                    values[key] = cast(raw)
            except ValueError as exc:
                raise ConfigError(
                    f"{path}: [{section}] {key} = {raw!r}: {exc}"
                ) from exc
    return values


def _merged(args: argparse.Namespace, name: str, file_values: dict):
    """Flag value if given, else config-file value, else default."""
    flag = getattr(args, name, None)
    if flag is not None:
        return flag
    if name in file_values:
        return file_values[name]
    return DEFAULTS.get(name)


def _build_profile(args, file_values) -> IntensityProfile:
    return IntensityProfile(
        mu=_merged(args, "mu", file_values),
        nu1=_merged(args, "nu1", file_values),
        nu2=_merged(args, "nu2", file_values),
        p_s=_merged(args, "p_s", file_values),
        p_d1=_merged(args, "p_d1", file_values),
        p_d2=_merged(args, "p_d2", file_values),
        p_z=_merged(args, "p_z", file_values),
    )


def _add_common_flags(sub):
    sub.add_argument("--config", help="INI config file; flags override it")
    sub.add_argument("--mu", type=float, help="signal intensity")
    sub.add_argument("--nu1", type=float, help="first decoy intensity")
    sub.add_argument("--nu2", type=float, help="second decoy intensity")
    sub.add_argument("--p-z", dest="p_z", type=float, help="z-basis probability")
    sub.add_argument("--p-s", dest="p_s", type=float)
    sub.add_argument("--p-d1", dest="p_d1", type=float)
    sub.add_argument("--p-d2", dest="p_d2", type=float)
    sub.add_argument("--pd", type=float, help="dark-count probability per gate")
    sub.add_argument("--eta", type=float, help="detector quantum efficiency")
    sub.add_argument("--delta-db", dest="delta_db", type=float,
                     help="specific loss, dB/km")
    sub.add_argument("--f", type=float, help="error-correction inefficiency")
    sub.add_argument("--out", help="output CSV path")
    sub.add_argument("--fig", help="figure path (default: next to --out)")
    sub.add_argument("--no-fig", action="store_true", help="skip the figure")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decoybb84",
        description="Decoy-state BB84 security-analysis toolkit",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    scan = subs.add_parser("rate-scan", help="rate-versus-distance table")
    _add_common_flags(scan)
    scan.add_argument("--l-min", dest="l_min", type=float)
    scan.add_argument("--l-max", dest="l_max", type=float)
    scan.add_argument("--l-step", dest="l_step", type=float)
    scan.add_argument("--mode", choices=("paper", "exact"))
    scan.add_argument("--curves", help="comma list from: " + ",".join(CURVES))
    scan.add_argument("--per-pulse", dest="per_pulse", action="store_true",
                      default=None, help="append per-pulse rate columns")
    scan.add_argument("--linear-y", action="store_true",
                      help="linear instead of log rate axis in the figure")

    sim = subs.add_parser("simulate", help="Monte Carlo run with audit")
    _add_common_flags(sim)
    sim.add_argument("--l", type=float, help="channel length, km")
    sim.add_argument("--n-pulses", dest="n_pulses", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--attack", choices=("none", "pns", "bs"))
    sim.add_argument("--beta", type=float,
                     help="PNS blocking fraction (default: solve to hide)")
    sim.add_argument("--forward-efficiency", dest="forward_efficiency",
                     type=float)
    sim.add_argument("--bs-t", dest="bs_t", type=float,
                     help="explicit BS transmittance")
    sim.add_argument("--bs-mode", dest="bs_mode", choices=("eta_T", "T_only"))
    sim.add_argument("--policy", choices=("random", "discard"),
                     help="double-click policy")
    sim.add_argument("--workers", type=int)

    ver = subs.add_parser("verify", help="run property suites")
    ver.add_argument("suites", nargs="+",
                     choices=("inequality", "convexity", "encoding",
                              "bounds", "all"))
    ver.add_argument("--seed", type=int, default=2026)
    ver.add_argument("--trials", type=int, default=1000,
                     help="trials per randomized suite")
    return parser


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "unbounded"
        return format(value, ".17g")
    return str(value)


def _resolve_fig_path(args, out_path: Path) -> Path | None:
    if args.no_fig:
        return None
    if getattr(args, "fig", None):
        return Path(args.fig)
    return out_path.with_suffix(".svg")


def cmd_rate_scan(args) -> int:
    file_values = _load_config(args.config) if args.config else {}
    profile = _build_profile(args, file_values)
    curves = tuple(
        c.strip() for c in _merged(args, "curves", file_values).split(",")
        if c.strip()
    )
    cfg = ScanConfig(
        l_min=_merged(args, "l_min", file_values),
        l_max=_merged(args, "l_max", file_values),
        l_step=_merged(args, "l_step", file_values),
        profile=profile,
        delta_db_per_km=_merged(args, "delta_db", file_values),
        eta=_merged(args, "eta", file_values),
        p_d=_merged(args, "pd", file_values),
        rate_params=KeyRateParams(f=_merged(args, "f", file_values)),
        curves=curves,
        mode=_merged(args, "mode", file_values),
        per_pulse=bool(_merged(args, "per_pulse", file_values)),
    )
    rows = rate_scan(cfg)
    out_path = Path(_merged(args, "out", file_values) or "rate_scan.csv")
    write_scan_csv(cfg, rows, out_path)
    print(f"wrote {len(rows)} rows to {out_path}")
    fig_path = _resolve_fig_path(args, out_path)
    if fig_path is not None:
        from .plots import rate_scan_figure, save_figure

        save_figure(
            rate_scan_figure(cfg, rows, log_y=not args.linear_y), fig_path
        )
        print(f"wrote figure to {fig_path}")
    return 0


def _build_attack(args, file_values, profile, channel):
    kind = _merged(args, "attack", file_values)
    if kind == "none":
        return None
    if kind == "pns":
        beta = _merged(args, "beta", file_values)
        fe = _merged(args, "forward_efficiency", file_values)
        if beta is None:
            beta = pns_solve_beta(profile, channel, forward_efficiency=fe)
            print(f"solved PNS blocking fraction beta = {beta:.12g}")
        return PnsConfig(beta=beta, forward_efficiency=fe)
    return BsConfig(
        t=_merged(args, "bs_t", file_values),
        mode=_merged(args, "bs_mode", file_values),
    )


def _simulate_csv_lines(report) -> list[str]:
    lines = ["name,value"]

    def emit(name, value):
        lines.append(f"{name},{_fmt(value)}")

    tally = report.tally
    for counter in ("sent", "detected", "detected_z", "detected_x",
                    "errors_z", "errors_x", "double_clicks"):
        for pt in PULSE_TYPES:
            emit(f"tally_{counter}_{pt.value}", getattr(tally, counter)[pt])
    for pt in PULSE_TYPES:
        emit(f"Q_{pt.value}", report.stats.Q[pt])
    for pt in PULSE_TYPES:
        emit(f"E_x_{pt.value}", report.stats.E_x[pt])
    emit("E_sz", report.stats.E_sz)
    emit("Y0_L", report.bounds.Y0_L)
    emit("Y1_L", report.bounds.Y1_L)
    emit("Q1s_L", report.bounds.Q1s_L)
    emit("e1x_U", report.bounds.e1x_U)
    emit("R_decoy_raw", report.rate.R_raw)
    emit("R_decoy_secure", report.rate.R_secure)
    for pt in PULSE_TYPES:
        emit(f"analytic_Q_{pt.value}", report.analytic_stats.Q[pt])
    for pt in PULSE_TYPES:
        emit(f"analytic_E_x_{pt.value}", report.analytic_stats.E_x[pt])
    emit("analytic_E_sz", report.analytic_stats.E_sz)
    for entry in report.audit:
        emit(f"z_{entry.name}", entry.z)
    emit("max_abs_z", report.max_abs_z)
    if report.truth is not None:
        emit("truth_Y0", report.truth.Y0)
        emit("truth_Y1", report.truth.Y1)
        emit("truth_Q1s", report.truth.Q1s)
        emit("truth_e1x", report.truth.e1x)
        emit("bound_slack_Y1", report.truth.Y1 - report.bounds.Y1_L)
    if report.resolved_t is not None:
        emit("resolved_t", report.resolved_t)
    return lines


def cmd_simulate(args) -> int:
    file_values = _load_config(args.config) if args.config else {}
    profile = _build_profile(args, file_values)
    channel = ChannelParams(
        delta_db_per_km=_merged(args, "delta_db", file_values),
        L_km=_merged(args, "l", file_values),
        eta=_merged(args, "eta", file_values),
        p_d=_merged(args, "pd", file_values),
    )
    attack = _build_attack(args, file_values, profile, channel)
    cfg = SimConfig(
        n_pulses=_merged(args, "n_pulses", file_values),
        seed=_merged(args, "seed", file_values),
        profile=profile,
        channel=channel,
        attack=attack,
        double_click_policy=_merged(args, "policy", file_values),
    )
    params = KeyRateParams(f=_merged(args, "f", file_values))
    report = end_to_end_report(
        cfg, params, workers=_merged(args, "workers", file_values)
    )
    out_path = Path(_merged(args, "out", file_values) or "simulate_report.csv")
    with open(out_path, "w", newline="") as handle:
        handle.write("\n".join(_simulate_csv_lines(report)) + "\n")
    print(f"wrote report to {out_path}")
    fig_path = _resolve_fig_path(args, out_path)
    if fig_path is not None:
        from .plots import save_figure, simulation_audit_figure

        save_figure(simulation_audit_figure(report), fig_path)
        print(f"wrote figure to {fig_path}")

    print(f"R_decoy = {report.rate.R_raw:.6g} "
          f"(secure: {report.rate.R_secure:.6g})")
    print("3-sigma audit vs analytic model:")
    for entry in report.audit:
        flag = "ok" if abs(entry.z) <= 3.0 else "FAIL"
        print(f"  {entry.name:14s} emp={entry.empirical:.6g} "
              f"ana={entry.analytic:.6g} z={entry.z:+.2f} {flag}")
    if not report.audit_passed(3.0):
        print("audit FAILED: max |z| > 3", file=sys.stderr)
        return 1
    print(f"audit passed: max |z| = {report.max_abs_z:.2f}")
    return 0


def _suite_inequality() -> dict:
    report = compare_pns_bs(
        l_values=range(0, 201),
        mu_values=[round(0.1 * k, 1) for k in range(1, 11)],
        pd_values=[0.0, 1e-6, 1e-5],
        eta=0.1,
        delta_db_per_km=0.2,
    )
    return {
        "passed": report.all_strict,
        "points": report.points_checked,
        "min_gap": report.min_gap,
        "min_gap_point": list(report.min_gap_point),
    }


def _suite_convexity(seed: int, trials: int) -> dict:
    rng = np.random.default_rng(seed)
    details = {}
    for dim in (2, 3):
        rep = verify_joint_convexity(trials, dim, rng)
        details[f"dim{dim}_max_violation"] = rep.max_violation
    vac = verify_vacuum_component_entropy()
    details["vacuum_entropy"] = vac.value
    details["passed"] = True
    return details


def _suite_encoding() -> dict:
    expected = {
        (0, "z"): 0.0,
        (1, "z"): math.pi / 2.0,
        (0, "x"): math.pi / 4.0,
        (1, "x"): -math.pi / 4.0,
    }
    alpha = math.sqrt(0.5)
    cases = {}
    for (u, b), theta in expected.items():
        circ = to_circular(polarization_state(u, b, alpha))
        phase = phase_encoding_state(u, b, alpha)
        result = equivalent_up_to_global_phase(circ, phase)
        ok = result.equivalent and abs(result.phase - theta) < 1e-9
        intensity_ok = abs(circ.total_intensity - phase.total_intensity) < 1e-12
        cases[f"u{u}{b}"] = {
            "equivalent": result.equivalent,
            "phase": result.phase,
            "intensity_preserved": intensity_ok,
        }
        if not (ok and intensity_ok):
            raise AssertionFailure(
                f"encoding correspondence failed for (u={u}, b={b}): "
                f"phase={result.phase}, expected={theta}"
            )
    cases["passed"] = True
    return cases


def _suite_bounds(seed: int, trials: int) -> dict:
    # Honest validity and tightness over distance, then randomized
    # adversarial statistics.
    worst_slack = {}
    for nu1, nu2, cap in ((0.01, 0.001, 0.01), (1e-4, 1e-5, 0.001)):
        profile = IntensityProfile(0.5, nu1, nu2)
        worst = 0.0
        for L in range(0, 151, 5):
            channel = ChannelParams(0.2, L, 0.1, 1e-6)
            stats = honest_statistics(profile, channel, "paper")
            truth = honest_truth(profile, channel, "paper")
            bounds = estimate_bounds(stats, profile)
            if not (
                bounds.Y0_L <= channel.p_d + 1e-15
                and bounds.Y1_L <= truth.Y1 + 1e-15
                and bounds.e1x_U >= truth.e1x - 1e-15
            ):
                raise AssertionFailure(
                    f"bound validity failed at L={L}, nu1={nu1}, nu2={nu2}"
                )
            worst = max(worst, (truth.Y1 - bounds.Y1_L) / truth.Y1)
        if worst > cap:
            raise AssertionFailure(
                f"bound tightness {worst} exceeds {cap} at nu1={nu1}"
            )
        worst_slack[f"nu1_{nu1}"] = worst

    rng = np.random.default_rng(seed)
    for _ in range(trials):
        mu = rng.uniform(0.05, 1.0)
        nu1 = mu * rng.uniform(0.02, 0.4)
        nu2 = nu1 * rng.uniform(0.05, 0.8)
        if nu1 + nu2 >= mu:
            continue
        profile = IntensityProfile(mu, nu1, nu2)
        p_d = 10.0 ** rng.uniform(-8, -4)
        if rng.random() < 0.5:
            beta = rng.uniform(0.0, 1.0)
            stats = pns_statistics(profile, PnsConfig(beta), p_d)
            y1_true = (1.0 - beta) + beta * p_d
            e1_true = 0.0
        else:
            t = 10.0 ** rng.uniform(-5, 0)
            stats = bs_statistics(profile, t, p_d)
            y1_true = 1.0 - (1.0 - p_d) * (1.0 - t)
            e1_true = p_d / (2.0 * y1_true)
        bounds = estimate_bounds(stats, profile)
        if bounds.Y0_L > p_d * (1 + 1e-9) + 1e-15:
            raise AssertionFailure(
                f"Y0 bound violated: {bounds.Y0_L} > {p_d}"
            )
        if bounds.Y1_L > y1_true * (1 + 1e-9) + 1e-15:
            raise AssertionFailure(
                f"Y1 bound violated: {bounds.Y1_L} > {y1_true}"
            )
        if math.isfinite(bounds.e1x_U) and bounds.e1x_U < e1_true * (1 - 1e-9) - 1e-15:
            raise AssertionFailure(
                f"e1 bound violated: {bounds.e1x_U} < {e1_true}"
            )
    return {"passed": True, "worst_slack": worst_slack, "random_cases": trials}


def cmd_verify(args) -> int:
    requested = list(args.suites)
    if "all" in requested:
        requested = ["inequality", "convexity", "encoding", "bounds"]
    summary: dict = {"suites": {}}
    failed = False
    for name in requested:
        try:
            if name == "inequality":
                result = _suite_inequality()
            elif name == "convexity":
                result = _suite_convexity(args.seed, args.trials)
            elif name == "encoding":
                result = _suite_encoding()
            else:
                result = _suite_bounds(args.seed, args.trials)
        except AssertionFailure as exc:
            failed = True
            result = {"passed": False, "error": str(exc)}
            if exc.counterexample:
                result["counterexample"] = exc.counterexample
        summary["suites"][name] = result
    summary["passed"] = not failed
    print(json.dumps(summary, sort_keys=True, default=float))
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "rate-scan":
            return cmd_rate_scan(args)
        if args.command == "simulate":
            return cmd_simulate(args)
        return cmd_verify(args)
    except (ConfigError, Infeasible, DomainError, ConstraintViolation) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DecoyBB84Error as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
