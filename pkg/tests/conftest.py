import numpy as np
import pytest

from decoybb84 import ChannelParams, IntensityProfile

# Reference operating point used throughout: mu=0.5, nu1=0.01, nu2=0.001,
# p_d=1e-6, eta=0.1, delta=0.2 dB/km.


@pytest.fixture
def ref_profile():
    return IntensityProfile(mu=0.5, nu1=0.01, nu2=0.001)


@pytest.fixture
def ref_channel():
    def make(L_km: float) -> ChannelParams:
        return ChannelParams(delta_db_per_km=0.2, L_km=L_km, eta=0.1, p_d=1e-6)

    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
