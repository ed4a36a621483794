"""Closed-form optimal H-infinity static state feedback for symmetric Hurwitz plants."""
from .errors import *  # noqa: F401,F403
from .hinfnorm import NormResult, closed_loop, freq_sweep_norm, hinf_norm_bisect
from .model import (
    CostWeights,
    GainMatrix,
    LtiSystem,
    SparsityPattern,
    StateSpace,
    is_incidence_matrix,
    sparsity_pattern,
    validate_system,
)
from .positivity import (
    PositivityCertificate,
    closed_loop_positivity_condition,
    internal_positivity,
    is_metzler,
)
from .riccati import CareSolution, solve_hinf_care, synth_are
from .simulate import ExperimentConfig, matrix_exponential, run_comparison_experiment, step_response
from .synthesis import (
    CoordinatedGain,
    CoordinatedPlant,
    optimal_gamma,
    reduce_coordination,
    synth_coordinated,
    synth_optimal,
    synth_weighted,
)

__version__ = "0.1.0"
