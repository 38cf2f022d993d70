"""Multi-fidelity GP estimation fused with Voronoi/Lloyd coverage control."""

from .accel import USING_NUMBA
from .algorithms import (
    COVER,
    LEARN,
    AgentAction,
    DmlcState,
    SmlcState,
    StepOutcome,
    VirtualSamplingError,
    dmlc_epoch,
    dmlc_virtual_sampling,
    initial_max_variance,
    known_density_baseline,
    single_fidelity_model,
    smlc_iteration,
)
from .geometry import (
    DensitySpec,
    EmptyCellError,
    GridEnvironment,
    Rect,
    TeamConfiguration,
    argmax_variance_in_cell,
    coverage_loss,
    eval_density_at,
    eval_test_density,
    instantaneous_regret,
    lloyd_step,
    mass_and_centroid,
    partition_centroids,
    voronoi_partition,
)
from .harness import (
    ExperimentConfig,
    MetricsRecord,
    aggregate_metrics,
    default_config,
    load_config,
    read_metrics,
    run_batch,
    run_compare,
    run_experiment,
    save_config,
    seed_low_fidelity,
    write_metrics,
)
from .mfgp import (
    DegenerateCovarianceError,
    FidelityDataset,
    KernelParams,
    MfgpHyper,
    MfgpModel,
    assemble_block_covariance,
    collapse_to_single_fidelity,
    cross_covariance,
    fit_hyperparameters,
    kernel_eval,
    log_marginal_likelihood,
)
from .planner import Tour, nearest_neighbor_tour, two_opt_improve

__version__ = "0.1.0"
