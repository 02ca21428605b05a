"""Sequential projective-measurement simulator and hypothesis discriminator.

Models a measurement either as a collapse onto the joint eigenbasis of a
complete commuting pair or as a collapse onto the eigenspaces of a
degenerate function of its outcomes, computes exact chain statistics under
both rules, and quantifies how many trials tell the two apart.
"""

from .discriminate import (
    Decision,
    HypothesisTestReport,
    final_marginal,
    likelihood_ratio_test,
    required_samples,
    run_discrimination,
    total_variation,
)
from .errors import (
    DimensionError,
    FunctionDomainError,
    IndistinguishableError,
    InvariantError,
    ModelMismatchError,
    NotCompleteError,
    ScenarioParseError,
    SeqmeasError,
)
from .hilbert import (
    PROB_ZERO,
    TOL_NORM,
    Projector,
    StateVector,
    canonical_phase,
    inner_product,
    phase_aligned_max_diff,
    project,
    tensor,
)
from .measurement import (
    MeasurementStep,
    Model,
    OutcomeDistribution,
    Scenario,
    functional_step,
    marginal,
    run_chain_analytic,
    sample_chain,
    separate_step,
    skip_step,
    step_outcomes,
)
from .observables import (
    EIG_SEP,
    CommutingPair,
    FunctionObservable,
    JointVector,
    SpectralObservable,
    co_measurement_basis,
    eigenspace_projectors,
    function_observable,
    pair_from_locals,
    pauli_direction,
    product_function,
    table_function,
)
from .scenario_io import (
    dump_scenario,
    load_scenario,
    scenario_from_dict,
    scenario_to_dict,
)

__version__ = "0.1.0"

__all__ = [
    "CommutingPair",
    "Decision",
    "DimensionError",
    "EIG_SEP",
    "FunctionDomainError",
    "FunctionObservable",
    "HypothesisTestReport",
    "IndistinguishableError",
    "InvariantError",
    "JointVector",
    "MeasurementStep",
    "Model",
    "ModelMismatchError",
    "NotCompleteError",
    "OutcomeDistribution",
    "PROB_ZERO",
    "Projector",
    "Scenario",
    "ScenarioParseError",
    "SeqmeasError",
    "SpectralObservable",
    "StateVector",
    "TOL_NORM",
    "canonical_phase",
    "co_measurement_basis",
    "dump_scenario",
    "eigenspace_projectors",
    "final_marginal",
    "function_observable",
    "functional_step",
    "inner_product",
    "likelihood_ratio_test",
    "load_scenario",
    "marginal",
    "pair_from_locals",
    "pauli_direction",
    "phase_aligned_max_diff",
    "product_function",
    "project",
    "required_samples",
    "run_chain_analytic",
    "run_discrimination",
    "sample_chain",
    "scenario_from_dict",
    "scenario_to_dict",
    "separate_step",
    "skip_step",
    "step_outcomes",
    "table_function",
    "tensor",
    "total_variation",
]
