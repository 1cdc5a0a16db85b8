"""Robust Wald-type detection for single-snapshot colocated MIMO radar.

The package is organised by concern:

* :mod:`robust_wald.geometry` -- steering vectors and transmit beampattern.
* :mod:`robust_wald.disturbance` -- correlated, heavy-tailed clutter generators
  and their second-order analytics.
* :mod:`robust_wald.detector` -- LS amplitude estimate, truncated-lag covariance
  quadratic form and the Wald statistic.
* :mod:`robust_wald.theory` -- chi-squared tail, Marcum Q and predicted Pd.
* :mod:`robust_wald.montecarlo` -- deterministic Monte Carlo engine.
* :mod:`robust_wald.cli` -- JSON-configured command line front end.
"""

from .geometry import (
    ArrayConfig,
    SteeringVector,
    beampattern,
    build_virtual_vector,
    ula_steering,
    virtual_steering,
)
from .disturbance import (
    ArSpec,
    Autocovariance,
    CgSpec,
    InnovationSpec,
    ar_autocovariance,
    ar_psd,
    check_stability,
    generate_ar,
    generate_cg,
    generate_clutter,
    sample_innovations,
)
from .detector import (
    DegenerateStatisticError,
    DetectionOutcome,
    DetectorConfig,
    default_truncation_lag,
    hac_quadratic_form,
    ls_estimate,
    residuals,
    threshold_for_pfa,
    wald_statistic,
)
from .theory import (
    AsymptoticPrediction,
    asymptotic_pd,
    chi2_2_cdf,
    chi2_2_sf,
    marcum_q1,
    noncentrality,
)
from .montecarlo import (
    ExperimentResult,
    Scenario,
    ks_distance,
    run_trials,
    sweep,
    wilson_interval,
)

__version__ = "0.1.0"
