"""Double adaptive stochastic gradient optimization.

A numpy library implementing one stepping engine for the SGD / ap-SGD /
ADAGrad / RMSProp / Adam / AMSGrad / DASGrad family, an adaptive
importance-sampling engine backed by a sum tree, expected-regret
instrumentation, and a reproducible desk-scale experiment harness.
"""

from .problems import (
    BINARY_LOGISTIC,
    CENTROID,
    Example,
    KINDS,
    MULTICLASS_LOGISTIC,
    Problem,
    SparseVector,
    example_gradient,
    example_loss,
    finite_difference_check,
    full_gradient,
    full_objective,
)
from .sampling import (
    SamplingTree,
    expected_weighted_second_moment,
    importance_weight,
    normalize_scores,
    scores_apsgd,
    scores_dasgrad,
    target_weight,
)
from .optimizers import (
    DivergenceError,
    METHODS,
    MomentState,
    OptimizerConfig,
    RunResult,
    moment_update,
    project_box,
    refresh_probabilities,
    run,
    step_general,
    step_size,
)
from .metrics import (
    AggregateTrace,
    ReferenceSolution,
    RegretLedger,
    accuracy,
    aggregate_runs,
    gradient_norm_variance,
    instantaneous_regret,
    regret_ledger,
    solve_reference,
)
from .datasets import (
    Dataset,
    box_muller,
    load_dense_csv,
    load_sparse,
    make_problem,
    synth_centroid,
    synth_classification,
    unbalance,
    write_dense_csv,
)
from .harness import (
    ExperimentConfig,
    ProblemSpec,
    convex_preset,
    load_config,
    matching_experiment,
    parse_config_text,
    read_trace_csv,
    run_experiment,
    self_check,
    sweep_variance,
)

__version__ = "0.1.0"
