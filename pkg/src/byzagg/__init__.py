"""Byzantine-resilient distributed gradient aggregation, simulated.

Redundant task assignment, graph-based adversary detection, robust
aggregation, attack models, a distortion-fraction analyzer, and a
deterministic training harness.
"""

from .adversary import (
    AttackScenario,
    DistortionSpec,
    GradientTable,
    alie_z_max,
    byzantine_returns,
    choose_adversaries,
    choose_disagreement_set,
    distort,
    vote_threshold,
)
from .aggregation import (
    AggregationResult,
    AggregationRule,
    aggregate,
    coordinate_median,
    majority_vote,
    median_of_means,
    select_honest_gradients,
    sign_majority,
)
from .analysis import (
    DistortionReport,
    brute_force_cmax,
    c_aspis_att1,
    c_baseline,
    c_detox,
    cmax_aspis_att2,
    count_distorted_files,
    distortion_reports,
    emit_tables,
    round_half_up,
)
from .assignment import (
    SchemeSpec,
    TaskAssignment,
    assign_aspis,
    assign_aspis_plus,
    assign_baseline,
    assign_detox,
    assign_for_scheme,
    pair_overlap,
)
from .bench import BenchRow, attack_agreement_graph, bench_cliques, bench_csv
from .combinatorics import (
    BlockDesign,
    binom,
    build_steiner_triple_system,
    enumerate_r_subsets,
    inverse_permutation,
    sample_permutation,
    subset_rank,
    subset_unrank,
)
from .detection import (
    AgreementGraph,
    DetectionOutcome,
    WindowedDetector,
    build_agreement_graph,
    detect_aspis,
    enumerate_maximal_cliques,
    gradients_equal,
    pair_counts,
)
from .errors import (
    CapacityError,
    ConfigError,
    DegenerateDetectionError,
    MissingGradientError,
    ProtocolViolationError,
    UnsupportedOrderError,
    UnsupportedParameterError,
)
from .tasks import SyntheticTask, synthetic_task
from .training import (
    IterationRecord,
    LearningRate,
    TrainConfig,
    TrainResult,
    train,
)

__version__ = "0.1.0"
