import cmath
import math

import numpy as np
import pytest

from decoybb84 import (
    WrongModeLabels,
    equivalent_up_to_global_phase,
    phase_encoding_state,
    polarization_state,
    to_circular,
)
from decoybb84.encodings import TwoModeCoherentState

ALPHA = cmath.exp(0.37j) * math.sqrt(0.5)

# Global phases theta with phase_state = e^{i theta} * circular_state.
EXPECTED_PHASES = {
    (0, "z"): 0.0,
    (1, "z"): math.pi / 2.0,
    (0, "x"): math.pi / 4.0,
    (1, "x"): -math.pi / 4.0,
}


class TestPolarizationState:
    def test_z_basis_amplitudes(self):
        s0 = polarization_state(0, "z", ALPHA)
        assert s0.amplitudes() == (ALPHA, 0j)
        s1 = polarization_state(1, "z", ALPHA)
        assert s1.amplitudes() == (0j, ALPHA)

    def test_x_basis_amplitudes(self):
        s1 = polarization_state(1, "x", ALPHA)
        assert s1.alpha1 == pytest.approx(ALPHA / math.sqrt(2), abs=1e-15)
        assert s1.alpha2 == pytest.approx(-ALPHA / math.sqrt(2), abs=1e-15)

    def test_total_intensity_for_all_four(self):
        for u in (0, 1):
            for b in ("z", "x"):
                state = polarization_state(u, b, ALPHA)
                assert state.total_intensity == pytest.approx(
                    abs(ALPHA) ** 2, rel=1e-12
                )


class TestToCircular:
    def test_horizontal(self):
        out = to_circular(TwoModeCoherentState(ALPHA, 0j))
        assert out.alpha1 == pytest.approx(ALPHA / math.sqrt(2), abs=1e-15)
        assert out.alpha2 == pytest.approx(ALPHA / math.sqrt(2), abs=1e-15)

    def test_vertical(self):
        out = to_circular(TwoModeCoherentState(0j, ALPHA))
        assert out.alpha1 == pytest.approx(1j * ALPHA / math.sqrt(2), abs=1e-15)
        assert out.alpha2 == pytest.approx(-1j * ALPHA / math.sqrt(2), abs=1e-15)

    def test_intensity_preserved_random_inputs(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            a1 = complex(rng.normal(), rng.normal())
            a2 = complex(rng.normal(), rng.normal())
            state = TwoModeCoherentState(a1, a2)
            out = to_circular(state)
            assert abs(out.total_intensity - state.total_intensity) < 1e-12

    def test_wrong_labels_rejected(self):
        state = TwoModeCoherentState(ALPHA, 0j, ("t1", "t2"))
        with pytest.raises(WrongModeLabels):
            to_circular(state)


class TestPhaseEncodingState:
    def test_z_bit0(self):
        s = phase_encoding_state(0, "z", ALPHA)
        assert s.alpha1 == pytest.approx(ALPHA / math.sqrt(2), abs=1e-15)
        assert s.alpha2 == pytest.approx(ALPHA / math.sqrt(2), abs=1e-15)

    def test_z_bit1_sign_flip(self):
        s = phase_encoding_state(1, "z", ALPHA)
        assert s.alpha1 == pytest.approx(-ALPHA / math.sqrt(2), abs=1e-15)

    def test_x_bit0_quarter_phase(self):
        s = phase_encoding_state(0, "x", ALPHA)
        assert s.alpha1 == pytest.approx(1j * ALPHA / math.sqrt(2), abs=1e-15)

    def test_half_intensity_per_window(self):
        for u in (0, 1):
            for b in ("z", "x"):
                s = phase_encoding_state(u, b, ALPHA)
                mu = abs(ALPHA) ** 2
                assert abs(s.alpha1) ** 2 == pytest.approx(mu / 2, rel=1e-12)
                assert abs(s.alpha2) ** 2 == pytest.approx(mu / 2, rel=1e-12)


class TestEquivalence:
    @pytest.mark.parametrize("u,b", list(EXPECTED_PHASES))
    def test_all_four_correspondences(self, u, b):
        circular = to_circular(polarization_state(u, b, ALPHA))
        phase = phase_encoding_state(u, b, ALPHA)
        result = equivalent_up_to_global_phase(circular, phase)
        assert result.equivalent
        assert result.phase == pytest.approx(EXPECTED_PHASES[(u, b)], abs=1e-12)

    def test_orthogonal_states_not_equivalent(self):
        s1 = TwoModeCoherentState(ALPHA, 0j)
        s2 = TwoModeCoherentState(0j, ALPHA)
        assert not equivalent_up_to_global_phase(s1, s2).equivalent

    def test_different_magnitudes_not_equivalent(self):
        s1 = TwoModeCoherentState(ALPHA, ALPHA)
        s2 = TwoModeCoherentState(2 * ALPHA, 2 * ALPHA)
        assert not equivalent_up_to_global_phase(s1, s2).equivalent

    def test_zero_states_equivalent(self):
        z1 = TwoModeCoherentState(0j, 0j)
        z2 = TwoModeCoherentState(0j, 0j)
        result = equivalent_up_to_global_phase(z1, z2)
        assert result.equivalent and result.phase == 0.0

    def test_random_global_phases_detected(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            a1 = complex(rng.normal(), rng.normal())
            a2 = complex(rng.normal(), rng.normal())
            theta = rng.uniform(-math.pi, math.pi)
            s1 = TwoModeCoherentState(a1, a2)
            s2 = TwoModeCoherentState(
                cmath.exp(1j * theta) * a1, cmath.exp(1j * theta) * a2
            )
            result = equivalent_up_to_global_phase(s1, s2)
            assert result.equivalent
            assert cmath.exp(1j * result.phase) == pytest.approx(
                cmath.exp(1j * theta), abs=1e-9
            )
