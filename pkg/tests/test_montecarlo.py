import math

import pytest

from decoybb84 import (
    BsConfig,
    ChannelParams,
    InsufficientData,
    IntensityProfile,
    PnsConfig,
    PulseType,
    SimConfig,
    TallyCounts,
    empirical_statistics,
    end_to_end_report,
    estimate_bounds,
    honest_statistics,
    honest_truth,
    pns_solve_beta,
    pns_statistics,
    rate_decoy,
    run_simulation,
)
from decoybb84.errors import DomainError

QS_50 = 0.004988520807317688


def _y1l_three_sigma_allowance(profile, stats, tally):
    # Linearized propagation of binomial gain noise through the Y1 bound.
    mu, nu1, nu2 = profile.mu, profile.nu1, profile.nu2
    pref = mu / ((nu1 - nu2) * (mu - nu1 - nu2))
    quad = (nu1 - nu2) * (nu1 + nu2) / (mu * mu)
    sens = {
        PulseType.DECOY1: pref * math.exp(nu1),
        PulseType.DECOY2: pref * math.exp(nu2),
        PulseType.SIGNAL: pref * quad * math.exp(mu),
    }
    total = 0.0
    for pt, weight in sens.items():
        q = stats.Q[pt]
        sigma = math.sqrt(q * (1.0 - q) / tally.sent[pt])
        total += weight * sigma
    return 3.0 * total


class TestRunSimulation:
    def test_empirical_signal_gain_three_sigma(self, ref_profile, ref_channel):
        cfg = SimConfig(10**6, 2, ref_profile, ref_channel(50.0))
        tally = run_simulation(cfg)
        q_s = tally.detected[PulseType.SIGNAL] / tally.sent[PulseType.SIGNAL]
        sigma = math.sqrt(QS_50 * (1 - QS_50) / tally.sent[PulseType.SIGNAL])
        assert abs(q_s - QS_50) <= 3.0 * sigma

    def test_dead_channel_zero_detections(self, ref_profile):
        # eta must stay positive, so kill the transmission instead and
        # turn dark counts off: no clicks can happen.
        ch = ChannelParams(0.2, 20000.0, 0.1, 0.0)
        tally = run_simulation(SimConfig(10**4, 5, ref_profile, ch))
        assert sum(tally.detected.values()) == 0
        with pytest.raises(InsufficientData):
            empirical_statistics(tally)

    def test_determinism_bit_identical(self, ref_profile, ref_channel):
        cfg = SimConfig(3 * 10**5, 99, ref_profile, ref_channel(50.0))
        assert run_simulation(cfg) == run_simulation(cfg)

    def test_worker_count_does_not_change_result(self, ref_profile, ref_channel):
        cfg = SimConfig(3 * 10**6, 7, ref_profile, ref_channel(50.0))
        serial = run_simulation(cfg, workers=1)
        parallel = run_simulation(cfg, workers=4)
        assert serial == parallel

    def test_conservation_invariants(self, ref_profile, ref_channel):
        cfg = SimConfig(10**6, 13, ref_profile, ref_channel(25.0))
        tally = run_simulation(cfg)
        assert tally.total_sent == cfg.n_pulses
        for pt in PulseType:
            assert tally.detected[pt] <= tally.sent[pt]
            basis_matched = tally.detected_z[pt] + tally.detected_x[pt]
            assert basis_matched <= tally.detected[pt]
            assert tally.errors_z[pt] <= tally.detected_z[pt]
            assert tally.errors_x[pt] <= tally.detected_x[pt]

    def test_convergence_rate_envelope(self, ref_profile, ref_channel):
        # |Q_emp - Q| stays inside the shrinking 4-sigma binomial envelope.
        for n in (10**4, 10**5, 10**6):
            cfg = SimConfig(n, 6, ref_profile, ref_channel(50.0))
            tally = run_simulation(cfg)
            sent = tally.sent[PulseType.SIGNAL]
            q_s = tally.detected[PulseType.SIGNAL] / sent
            sigma = math.sqrt(QS_50 * (1 - QS_50) / sent)
            assert abs(q_s - QS_50) <= 4.0 * sigma

    def test_bs_at_etat_matches_honest_distribution(self, ref_profile, ref_channel):
        # Same seed: the BS transform at t = eta T consumes the photon
        # stream identically to the honest channel in distribution; use a
        # two-sample z at moderate n as a smoke check (full 1e7 check in
        # the acceptance suite).
        ch = ref_channel(25.0)
        t_h = run_simulation(SimConfig(10**6, 17, ref_profile, ch))
        t_b = run_simulation(
            SimConfig(10**6, 18, ref_profile, ch, attack=BsConfig(mode="eta_T"))
        )
        for pt in PulseType:
            k1, n1 = t_h.detected[pt], t_h.sent[pt]
            k2, n2 = t_b.detected[pt], t_b.sent[pt]
            pooled = (k1 + k2) / (n1 + n2)
            z = (k1 / n1 - k2 / n2) / math.sqrt(
                pooled * (1 - pooled) * (1 / n1 + 1 / n2)
            )
            assert abs(z) <= 3.0

    def test_double_click_policies(self, ref_profile):
        # discard never counts more detections than random assignment
        ch = ChannelParams(0.2, 10.0, 0.5, 1e-3)
        cfg_r = SimConfig(10**5, 3, ref_profile, ch, double_click_policy="random")
        cfg_d = SimConfig(10**5, 3, ref_profile, ch, double_click_policy="discard")
        t_r, t_d = run_simulation(cfg_r), run_simulation(cfg_d)
        for pt in PulseType:
            assert t_d.detected[pt] <= t_r.detected[pt]
        assert sum(t_r.double_clicks.values()) > 0

    def test_rejects_zero_pulses(self, ref_profile, ref_channel):
        with pytest.raises(DomainError):
            SimConfig(0, 1, ref_profile, ref_channel(50.0))

    def test_rejects_unsupported_intensity(self, ref_channel):
        bright = IntensityProfile(12.0, 0.01, 0.001)
        with pytest.raises(DomainError):
            SimConfig(10, 1, bright, ref_channel(50.0))

    def test_pns_forward_efficiency_sampled(self, ref_channel):
        # fe < 1 thins the forwarded photons in the simulator too
        profile = IntensityProfile(0.5, 0.2, 0.1)
        ch = ref_channel(50.0)
        attack = PnsConfig(beta=0.5, forward_efficiency=0.5)
        tally = run_simulation(SimConfig(10**6, 8, profile, ch, attack=attack))
        analytic = pns_statistics(profile, attack, ch.p_d)
        for pt in PulseType:
            emp = tally.detected[pt] / tally.sent[pt]
            ana = analytic.Q[pt]
            sigma = math.sqrt(ana * (1 - ana) / tally.sent[pt])
            assert abs(emp - ana) <= 4.0 * sigma, pt


class TestEmpiricalStatistics:
    def test_all_zero_detections(self):
        tally = TallyCounts()
        for pt in PulseType:
            tally.sent[pt] = 100
        with pytest.raises(InsufficientData, match="signal"):
            empirical_statistics(tally)

    def test_saturated_gain(self):
        tally = TallyCounts()
        for pt in PulseType:
            tally.sent[pt] = 50
            tally.detected[pt] = 50
            tally.detected_z[pt] = 20
            tally.detected_x[pt] = 20
        stats = empirical_statistics(tally)
        for pt in PulseType:
            assert stats.Q[pt] == 1.0

    def test_starved_type_named(self):
        tally = TallyCounts()
        for pt in PulseType:
            tally.sent[pt] = 100
            tally.detected[pt] = 10
            tally.detected_z[pt] = 5
            tally.detected_x[pt] = 5
        tally.detected_x[PulseType.DECOY2] = 0
        with pytest.raises(InsufficientData, match="decoy2"):
            empirical_statistics(tally)


class TestEndToEndReport:
    def test_honest_run_audits_and_rates(self, ref_profile, ref_channel):
        ch = ref_channel(50.0)
        report = end_to_end_report(SimConfig(10**7, 20260810, ref_profile, ch))
        assert report.audit_passed(3.0)
        analytic = honest_statistics(ref_profile, ch, "exact")
        r_analytic = rate_decoy(analytic, estimate_bounds(analytic, ref_profile))
        rel = abs(report.rate.R_raw - r_analytic.R_raw) / abs(r_analytic.R_raw)
        assert rel < 0.05
        truth = honest_truth(ref_profile, ch, "exact")
        allowance = _y1l_three_sigma_allowance(
            ref_profile, report.stats, report.tally
        )
        assert report.bounds.Y1_L <= truth.Y1 + allowance

    def test_pns_solved_beta_penalized(self):
        channel = ChannelParams(0.2, 25.0, 0.1, 1e-6)
        mu = 1.5 * channel.eta_t
        profile = IntensityProfile(mu, mu / 2.5, mu / 10.0)
        beta = pns_solve_beta(profile, channel)
        honest = end_to_end_report(SimConfig(10**7, 41, profile, channel))
        attacked = end_to_end_report(
            SimConfig(10**7, 1041, profile, channel, attack=PnsConfig(beta))
        )
        assert attacked.rate.R_raw < honest.rate.R_raw
        assert attacked.audit_passed(3.0)
        assert honest.audit_passed(3.0)

    def test_pns_full_blocking_collapses_bound(self, ref_channel):
        # Blocking every single photon starves the low-intensity decoys;
        # the certified single-photon yield collapses to zero.
        profile = IntensityProfile(0.5, 0.01, 0.001, p_s=0.2, p_d1=0.3, p_d2=0.5)
        report = end_to_end_report(
            SimConfig(
                2 * 10**7, 31, profile, ref_channel(50.0), attack=PnsConfig(1.0)
            )
        )
        assert report.bounds.Y1_L <= 10 * 1e-6
        assert report.bounds.saturated
