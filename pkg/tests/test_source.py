import math

import numpy as np
import pytest

from decoybb84 import (
    ConstraintViolation,
    IntensityProfile,
    photon_number_pmf,
    sample_photon_number,
    sample_photon_numbers,
    validate_profile,
)
from decoybb84.errors import DomainError


class TestValidateProfile:
    def test_reference_profile_valid(self, ref_profile):
        assert validate_profile(ref_profile) is ref_profile

    def test_decoy_sum_exceeds_signal(self):
        with pytest.raises(ConstraintViolation, match="nu1 \\+ nu2 < mu"):
            validate_profile(IntensityProfile(0.5, 0.3, 0.25))

    def test_decoys_out_of_order(self):
        with pytest.raises(ConstraintViolation, match="nu2 < nu1"):
            validate_profile(IntensityProfile(0.5, 0.001, 0.01))

    def test_negative_nu2(self):
        with pytest.raises(ConstraintViolation, match="nu2 >= 0"):
            validate_profile(IntensityProfile(0.5, 0.01, -0.001))

    @pytest.mark.parametrize(
        "mutation",
        [
            dict(nu2=0.02),            # nu2 >= nu1
            dict(nu1=0.6),             # nu1 + nu2 >= mu
            dict(nu2=-1e-9),           # nu2 < 0
            dict(p_s=0.5),             # selection probs no longer sum to 1
            dict(p_z=0.0),
            dict(p_z=1.0),
            dict(p_d1=0.0, p_d2=2.0 / 3.0),
        ],
    )
    def test_rejects_single_mutations(self, ref_profile, mutation):
        fields = dict(
            mu=ref_profile.mu, nu1=ref_profile.nu1, nu2=ref_profile.nu2,
            p_s=ref_profile.p_s, p_d1=ref_profile.p_d1,
            p_d2=ref_profile.p_d2, p_z=ref_profile.p_z,
        )
        fields.update(mutation)
        with pytest.raises(ConstraintViolation):
            validate_profile(IntensityProfile(**fields))


class TestPhotonNumberPmf:
    def test_vacuum_probability(self):
        # exp(-0.5) = 0.60653065971263342...
        assert photon_number_pmf(0.5, 0) == pytest.approx(
            0.6065306597126334, rel=1e-12
        )

    def test_degenerate_intensity(self):
        assert photon_number_pmf(0.0, 0) == 1.0
        for j in (1, 2, 7):
            assert photon_number_pmf(0.0, j) == 0.0

    @pytest.mark.parametrize("mu", [0.001, 0.1, 0.5, 1.0, 2.0])
    def test_normalization(self, mu):
        total = sum(photon_number_pmf(mu, j) for j in range(61))
        assert abs(total - 1.0) < 1e-12

    def test_large_j_stays_finite(self):
        value = photon_number_pmf(0.5, 55)
        assert 0.0 < value < 1e-60 or value == 0.0
        assert math.isfinite(value)

    def test_rejects_negative_arguments(self):
        with pytest.raises(DomainError):
            photon_number_pmf(-0.1, 0)
        with pytest.raises(DomainError):
            photon_number_pmf(0.5, -1)


class TestSampling:
    def test_zero_intensity_always_zero(self):
        rng = np.random.default_rng(1)
        assert all(sample_photon_number(0.0, rng) == 0 for _ in range(100))

    def test_deterministic_given_seed(self):
        a = [sample_photon_number(0.7, np.random.default_rng(9)) for _ in range(1)]
        b = [sample_photon_number(0.7, np.random.default_rng(9)) for _ in range(1)]
        assert a == b
        seq1 = np.random.default_rng(9)
        seq2 = np.random.default_rng(9)
        draws1 = [sample_photon_number(0.7, seq1) for _ in range(50)]
        draws2 = [sample_photon_number(0.7, seq2) for _ in range(50)]
        assert draws1 == draws2

    def test_rejects_unsupported_intensity(self):
        with pytest.raises(DomainError):
            sample_photon_number(11.0, np.random.default_rng(0))

    def test_empirical_mean_within_three_sigma(self):
        rng = np.random.default_rng(42)
        draws = sample_photon_numbers(0.5, 10**6, rng)
        assert abs(draws.mean() - 0.5) <= 3.0 * math.sqrt(0.5 / 10**6)

    def test_empirical_vacuum_fraction_within_three_sigma(self):
        rng = np.random.default_rng(42)
        draws = sample_photon_numbers(0.5, 10**6, rng)
        p0 = math.exp(-0.5)
        sigma = math.sqrt(p0 * (1 - p0) / 10**6)
        assert abs((draws == 0).mean() - p0) <= 3.0 * sigma

    def test_histogram_matches_pmf_within_four_sigma(self):
        n = 10**6
        rng = np.random.default_rng(42)
        draws = sample_photon_numbers(0.5, n, rng)
        for j in range(int(draws.max()) + 1):
            p = photon_number_pmf(0.5, j)
            count = int((draws == j).sum())
            sigma = math.sqrt(n * p * (1 - p))
            assert abs(count - n * p) <= 4.0 * sigma, f"bin {j}"

    def test_scalar_and_vector_agree_in_distribution(self):
        rng = np.random.default_rng(7)
        scalar = [sample_photon_number(0.5, rng) for _ in range(20000)]
        rng = np.random.default_rng(8)
        vector = sample_photon_numbers(0.5, 20000, rng)
        assert abs(np.mean(scalar) - vector.mean()) < 0.02
