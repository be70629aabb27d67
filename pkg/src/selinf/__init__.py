"""Selective-influence analysis for 2x2 factorial experiments with binary responses.

Given the four joint distributions of two +1/-1 responses under two binary
factors, this package computes the CHSH statistic over all eight odd-plus
sign patterns, checks marginal selectivity exactly and statistically, and
decides by exact linear feasibility whether a distribution over the 16
deterministic hidden states reproduces the data, emitting a witness or a
certificate of impossibility. All probability arithmetic is exact rational.
"""

from .chsh import (
    SIGN_PATTERNS,
    BoundClassification,
    ChshReport,
    SignPattern,
    chsh_facet_value,
    compute_gamma,
)
from .errors import (
    BadCell,
    ConflictingData,
    InvalidDistribution,
    InvalidPattern,
    InvalidTable,
    InvalidValue,
    MissingCounts,
    MissingTreatment,
    ParseError,
    SelinfError,
    SumNotOne,
    ZeroTotal,
)
from .feasibility import (
    HIDDEN_STATES,
    FacetViolation,
    FeasibilityResult,
    GeneralRepresentation,
    HiddenState,
    HiddenStateDistribution,
    Verdict,
    construct_general_representation,
    fine_criterion,
    fine_violations,
    predicted_tables,
    solve_feasibility,
    verify_witness,
)
from .io import (
    AnalysisReport,
    analyze,
    parse_experiment,
    parse_model,
    render_report_text,
    report_from_json_dict,
    report_to_json_dict,
    serialize_experiment,
)
from .model import (
    ALPHA_A,
    ALPHA_A_PRIME,
    BETA_B,
    BETA_B_PRIME,
    CELLS,
    TREATMENTS,
    CountTable,
    ExperimentData,
    Factor,
    FactorLevel,
    JointTable,
    LabelSet,
    Level,
    Probability,
    Treatment,
    expectation,
    flip_a_coding,
    flip_b_coding,
    from_counts,
    marginals,
    mix_experiments,
    rational,
    swap_alpha_levels,
    swap_beta_levels,
)
from .selectivity import (
    MarginalComparison,
    MarginalReport,
    MsTestResult,
    Response,
    check_marginal_selectivity,
    test_marginal_selectivity,
)
from .simulate import (
    ContaminatedModel,
    SampleSpec,
    SelectiveModel,
    SplitMix64,
    model_tables,
    sample_counts,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA_A",
    "ALPHA_A_PRIME",
    "AnalysisReport",
    "BETA_B",
    "BETA_B_PRIME",
    "BadCell",
    "BoundClassification",
    "CELLS",
    "ChshReport",
    "ConflictingData",
    "ContaminatedModel",
    "CountTable",
    "ExperimentData",
    "FacetViolation",
    "Factor",
    "FactorLevel",
    "FeasibilityResult",
    "GeneralRepresentation",
    "HIDDEN_STATES",
    "HiddenState",
    "HiddenStateDistribution",
    "InvalidDistribution",
    "InvalidPattern",
    "InvalidTable",
    "InvalidValue",
    "JointTable",
    "LabelSet",
    "Level",
    "MarginalComparison",
    "MarginalReport",
    "MissingCounts",
    "MissingTreatment",
    "MsTestResult",
    "ParseError",
    "Probability",
    "Response",
    "SIGN_PATTERNS",
    "SampleSpec",
    "SelectiveModel",
    "SelinfError",
    "SignPattern",
    "SplitMix64",
    "SumNotOne",
    "TREATMENTS",
    "Treatment",
    "Verdict",
    "ZeroTotal",
    "analyze",
    "check_marginal_selectivity",
    "chsh_facet_value",
    "compute_gamma",
    "construct_general_representation",
    "expectation",
    "fine_criterion",
    "fine_violations",
    "flip_a_coding",
    "flip_b_coding",
    "from_counts",
    "marginals",
    "mix_experiments",
    "model_tables",
    "parse_experiment",
    "parse_model",
    "predicted_tables",
    "rational",
    "render_report_text",
    "report_from_json_dict",
    "report_to_json_dict",
    "sample_counts",
    "serialize_experiment",
    "solve_feasibility",
    "swap_alpha_levels",
    "swap_beta_levels",
    "test_marginal_selectivity",
    "verify_witness",
]
