"""Factored margin risks and mean-operator learning for weak supervision.

The package decomposes margin losses into even and odd parts, factors the
empirical risk of linear-odd losses into a label-free term plus a linear term
in the mean operator E[y x], estimates that operator from weakly supervised
data (noisy labels, positive/unlabeled), trains models on the factored
objective with projected stochastic subgradient or proximal steps, and
evaluates the matching generalization and noise-robustness bounds.
"""

from .bounds import (
    BoundInputs,
    aln_epsilon,
    c_of_XB,
    empirical_rademacher_mc,
    generalization_bound,
    generalization_bound_with_deviation,
    mean_op_deviation_bound,
    minimizer_distance_bound,
    noisy_generalization_bound,
    rademacher_bound,
    rademacher_v,
)
from .estimators import (
    MeanOperator,
    covariance_identity_check,
    expected_noisy_mean_vector,
    mean_op,
    noise_corrected_mean_op,
    pu_mean_op,
)
from .experiments import (
    ExperimentRecord,
    emit,
    gaussian_pair_sample,
    load_records,
    run_figure2,
    run_figure3,
    run_table2,
    toy_dataset,
    uci_surrogates,
)
from .losses import (
    AffineBound,
    LossSpec,
    affine_odd_bound,
    catalog,
    craft_lol,
    even_part,
    get_loss,
    lol_slope_check,
    odd_part,
)
from .risks import (
    Model,
    empirical_risk,
    estimated_risk,
    expected_noisy_risk,
    factored_risk,
    general_factored_risk,
    regression_factored_objective,
    zero_one_error,
)
from .samples import (
    DoubledSample,
    NoiseSpec,
    Sample,
    double_sample,
    inject_noise,
    k_folds,
    load_csv,
    split,
    standardize,
)
from .solvers import (
    Regularizer,
    SolverConfig,
    exact_minimizer_square,
    minimize_expected_noisy_risk,
    minimize_risk,
    mosgd_noisy,
    mosgd_train,
    prox_train,
    sgd_baseline,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
