"""Training over sparse multipath channels in the low-SNR regime."""
from .errors import ConfigError, DomainError
from .estimators import (
    ChannelEstimate,
    EvaluationReport,
    Method,
    bg_posterior_mean,
    evaluate_estimate,
    iht_recover,
    omp_recover,
    threshold_detect,
)
from .model import (
    ChannelRealization,
    GainModel,
    ModelParams,
    SamplingMode,
    Seed,
    baron_bounds,
    binary_entropy,
    detection_threshold,
    rate_distortion,
    sample_channel,
    snr_zero,
)
from .montecarlo import (
    ExperimentConfig,
    Scheme,
    SweepResult,
    empirical_mutual_info,
    locate_transition,
    run_sweep,
    run_trial,
)
from .signals import (
    FrequencyObservation,
    FrequencySubset,
    ImpulseObservation,
    circular_convolve,
    dft_eigenvalues,
    frequency_observe,
    frequency_signal,
    impulse_observe,
    sample_frequency_subset,
    snr_f,
)
from .theory import (
    TheoryCurve,
    fletcher_compare,
    mmse_hc_step,
    mmse_hg_quadrature,
    mmse_hg_theory,
    penalty_bound,
    rip_counts,
    training_mutual_info,
)

__version__ = "0.1.0"
