"""Exact-arithmetic toolkit for belief systems over learning environments.

Builds finite learning environments, checks belief systems for forward and
complete consistency, converts between lexicographic and complete conditional
probability systems, and constructs or verifies Dutch books against
inconsistent beliefs. All verdicts are computed with rational arithmetic;
floats appear only in Monte Carlo summaries.
"""

from .consistency import (
    ConsistencyResult,
    ForwardViolation,
    Lcps,
    check_complete_consistency,
    check_forward_consistency,
    derive_beliefs,
    extract_lcps,
    validate_lcps,
    verify_ccbs,
)
from .cps import (
    CompleteCps,
    CpsViolation,
    SiniscalchiViolation,
    check_siniscalchi,
    cps_to_lcps,
    lcps_to_cps,
    validate_complete_cps,
)
from .errors import (
    DomainError,
    DutchbookError,
    IndeterminateProduct,
    IndeterminateRatio,
    InputError,
    InternalError,
    InvalidEnvironment,
    NonUniformReach,
    PreconditionViolation,
    UnsupportedEnvironment,
)
from .gambles import (
    AcceptanceReport,
    BookVerdict,
    DeterministicVerdict,
    GambleSystem,
    SynthesisParams,
    accepts_system,
    classify_deterministic,
    classify_dutch_book,
    expected_payoff,
    is_willing_to_accept,
    synthesize_deterministic_db,
    synthesize_dutch_book,
)
from .model import (
    BeliefSystem,
    ContingencyForest,
    Distribution,
    LearningEnvironment,
    build_environment,
    has_deterministic_continuation,
    is_uniform_reach,
    reach_probability,
    validate_belief_system,
)
from .odds import (
    CoherenceCertificate,
    CoherenceGraph,
    CoherenceViolation,
    ExtendedRatio,
    OddsLink,
    PlausibilityPartition,
    build_coherence_graph,
    check_coherence,
    discounted_odds_ratio,
    generalized_odds_ratio,
    plausibility_levels,
)
from .simulate import (
    FixedState,
    Prior,
    SimConfig,
    SimReport,
    StateStats,
    compare_to_exact,
    flagged_states,
    run_rounds,
)

__version__ = "0.1.0"

__all__ = [
    "AcceptanceReport",
    "BeliefSystem",
    "BookVerdict",
    "CoherenceCertificate",
    "CoherenceGraph",
    "CoherenceViolation",
    "CompleteCps",
    "ConsistencyResult",
    "ContingencyForest",
    "CpsViolation",
    "DeterministicVerdict",
    "Distribution",
    "DomainError",
    "DutchbookError",
    "ExtendedRatio",
    "FixedState",
    "ForwardViolation",
    "GambleSystem",
    "IndeterminateProduct",
    "IndeterminateRatio",
    "InputError",
    "InternalError",
    "InvalidEnvironment",
    "Lcps",
    "LearningEnvironment",
    "NonUniformReach",
    "OddsLink",
    "PlausibilityPartition",
    "PreconditionViolation",
    "Prior",
    "SimConfig",
    "SimReport",
    "SiniscalchiViolation",
    "StateStats",
    "SynthesisParams",
    "UnsupportedEnvironment",
    "accepts_system",
    "build_coherence_graph",
    "build_environment",
    "check_coherence",
    "check_complete_consistency",
    "check_forward_consistency",
    "check_siniscalchi",
    "classify_deterministic",
    "classify_dutch_book",
    "compare_to_exact",
    "cps_to_lcps",
    "derive_beliefs",
    "discounted_odds_ratio",
    "expected_payoff",
    "extract_lcps",
    "flagged_states",
    "generalized_odds_ratio",
    "has_deterministic_continuation",
    "is_uniform_reach",
    "is_willing_to_accept",
    "lcps_to_cps",
    "plausibility_levels",
    "reach_probability",
    "run_rounds",
    "synthesize_deterministic_db",
    "synthesize_dutch_book",
    "validate_belief_system",
    "validate_complete_cps",
    "validate_lcps",
    "verify_ccbs",
]
