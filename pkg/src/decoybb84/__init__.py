"""Decoy-state BB84 security-analysis toolkit.

Closed-form channel statistics, the three-intensity decoy-state
estimator, key-rate engines for the photon-number-splitting and
beam-splitting adversaries, a pulse-level Monte Carlo simulator, a
truncated-Fock entropy oracle, and an encoding-equivalence checker.
"""

from .attacks import (
    BsConfig,
    PnsConfig,
    bs_eve_ignorance,
    bs_split,
    bs_statistics,
    pns_known_fraction,
    pns_solve_beta,
    pns_statistics,
    pns_yields,
)
from .channel import (
    ChannelParams,
    ObservedStatistics,
    SinglePhotonTruth,
    honest_statistics,
    honest_truth,
    honest_yield,
    transmittance,
)
from .decoy import (
    UNBOUNDED,
    DecoyBounds,
    e1_upper,
    estimate_bounds,
    q1_lower,
    y0_lower,
    y1_lower,
)
from .encodings import (
    TwoModeCoherentState,
    equivalent_up_to_global_phase,
    phase_encoding_state,
    polarization_state,
    to_circular,
)
from .entropy import (
    CqState,
    DensityMatrix,
    KrausChannel,
    bs_attack_cq_state,
    conditional_entropy_cq,
    poisson_tail_mass,
    relative_entropy,
    verify_joint_convexity,
    verify_vacuum_component_entropy,
    von_neumann_entropy,
)
from .errors import (
    AssertionFailure,
    ConstraintViolation,
    DecoyBB84Error,
    DegenerateChannel,
    DomainError,
    Infeasible,
    InsufficientData,
    InvalidState,
    WrongModeLabels,
)
from .montecarlo import (
    EndToEndReport,
    SimConfig,
    TallyCounts,
    empirical_statistics,
    end_to_end_report,
    run_simulation,
)
from .rates import (
    ComparisonReport,
    KeyRateParams,
    RatePoint,
    binary_entropy,
    compare_pns_bs,
    rate_bs,
    rate_decoy,
    rate_gllp,
)
from .scan import ScanConfig, ScanRow, find_zero_crossing, rate_scan, write_scan_csv
from .source import (
    IntensityProfile,
    PulseType,
    photon_number_pmf,
    sample_photon_number,
    sample_photon_numbers,
    validate_profile,
)

__version__ = "0.1.0"
