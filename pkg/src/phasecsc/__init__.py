"""Complex convolutional sparse coding for interferometric phase restoration.

Learn a bank of small complex filters from clean interferograms, code noisy
interferograms against it with ADMM (optionally gradient-regularized), and
evaluate the restorations. Includes a synthetic scene generator, the boxcar
baseline, and bit-exact binary raster formats with a CLI front end.
"""

from .metrics import MetricReport, colinearity_map, psnr, report, residual_phase
from .ops import (
    complex_soft_threshold,
    convolve_sum,
    pad_filters,
    project_to_constraint_set,
    solve_iterated_sherman_morrison,
    solve_rank1_diag_systems,
)
from .sim import (
    PatternSpec,
    SyntheticScene,
    boxcar_filter,
    make_pattern,
    mc_step_experiment,
    simulate_interferogram,
    simulate_slc_pair,
)
from .solver import (
    AdmmTrace,
    GradientFilters,
    SolverConfig,
    SolverDiverged,
    denoise,
    encode,
    objective,
)
from .trainer import (
    TrainConfig,
    TrainState,
    dict_step,
    learn_dictionary,
    sparse_step,
    training_objective,
)

__version__ = "0.1.0"
