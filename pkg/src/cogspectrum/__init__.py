"""Cognitive-radio channel assignment: geometric interference model,
network-utility objectives, ant-colony allocator, and baselines."""

from .acs import (
    AcsParams,
    AcsResult,
    AdmissionPolicy,
    AntState,
    ConvergenceTrace,
    NoCandidateError,
    PheromoneTensor,
    allocate,
    deposit_amount,
    final_selection,
    global_evaporation,
    group_by_nan,
    hgw_score,
    local_update,
    nan_probabilities,
    select,
    semi_local_update,
)
from .baselines import (
    AlgorithmKind,
    CapacityError,
    ExactResult,
    brute_force_optimal,
    csgc_assignment,
    random_assignment,
)
from .harness import (
    DEFAULT_SWEEP_VALUES,
    ScenarioFormatError,
    SweepResult,
    SweepRow,
    SweepSpec,
    ant_count_study,
    emit_csv,
    load_scenario,
    run_convergence,
    run_sweep,
    save_scenario,
)
from .topology import (
    ConfigurationError,
    Point,
    PrimaryUser,
    Scenario,
    ScenarioConfig,
    SecondaryUser,
    SpectrumModel,
    build_model,
    coverage_radius,
    generate_scenario,
)
from .utility import (
    STARVATION_SHIFT,
    Assignment,
    DimensionMismatchError,
    InfeasibleAssignmentError,
    UtilityKind,
    evaluate,
    is_feasible,
    reward_vector,
    utility,
)

__version__ = "0.1.0"
