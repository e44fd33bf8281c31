"""Asymptotic structure of unital completely positive maps on matrix algebras.

The pipeline: validate a channel, extract its peripheral spectrum and the
spectral idempotent Q, build the reversible system (N, alpha, E) on the
peripheral eigenspace with its Choi-Effros product, identify the Poisson
boundary as the fixed algebra, classify slow oscillation, and (for stochastic
matrices) recover the cyclic Frobenius structure. Every construction ships
with numerical certificates for the norm equalities and decay estimates that
justify it.
"""

from .config import Config, DEFAULT_CONFIG
from .operators import (
    Functional,
    Operator,
    SystemDescriptor,
    SystemKind,
    operator_norm,
    pair,
    tensor,
    trace_norm,
    unvec,
    vec,
)
from .channels import (
    Channel,
    ChoiMatrix,
    KrausSet,
    Superoperator,
    ValidationReport,
    amplify,
    apply,
    compose,
    from_choi,
    from_kraus,
    from_stochastic,
    from_superoperator,
    identity_channel,
    power,
    predual,
    validate,
)
from .spectral import (
    PeripheralDecomposition,
    SpectralData,
    eigendecompose,
    kuperberg_sequence,
    peripheral,
    power_limit_check,
)
from .lift import (
    AsymptoticLift,
    CandidateLift,
    ChoiEffrosAlgebra,
    OperatorSubsystem,
    build_lift,
    build_subsystem,
    choi_effros,
    decay_certificate,
    inverse_sequence,
    poisson_boundary,
    verify_asymptotic_equalities,
    verify_reversible_lift,
    wedderburn,
)
from .markov import (
    CyclicStructure,
    MarkovLift,
    StochasticMatrix,
    analyze_structure,
    build_markov_lift,
    markov_decay_certificate,
    peripheral_spectrum_check,
)
from .diagnostics import (
    ClassificationReport,
    classify,
    fixed_point_audit,
    monotonicity_audit,
)

__version__ = "0.1.0"
