"""AODE ensembles with compression-based weighting and credal extensions.

The pipeline: load a CSV into a fully categorical ``Dataset`` (imputation +
MDL discretization), fit the k superparent models and the null model, then
classify with one of five ensembles: plain averaging (aode), conditional-
likelihood weighting (bma-aode), compression weighting (comp-aode), or the
credal variants (bma-aode-star, comp-aode-star) that replace the single
model prior with a set of priors and return every non-dominated class.
"""

from .credal import (
    BMA_STAR,
    COMP_STAR,
    CredalPrediction,
    CredalSpec,
    bma_dominates,
    comp_dominates,
    comp_upper_pi,
    nondominated,
    predict_credal,
)
from .dataset import (
    Codec,
    ConfigurationError,
    DataError,
    Dataset,
    FoldPlan,
    RawTable,
    discretize_mdl,
    encode,
    fit_codec,
    impute,
    load_csv,
    make_folds,
    mdl_cut_points,
)
from .ensemble import (
    EmptyEnsembleError,
    EnsembleScores,
    aode_predict,
    bma_predict,
    bma_weights,
    comp_predict,
    compute_scores,
    fit_ensemble,
    mix_posteriors,
    model_posteriors,
    normalized_compression,
    raw_compression,
    robust_exp,
)
from .evaluation import (
    ALL_CLASSIFIERS,
    CREDAL_CLASSIFIERS,
    DETERMINATE_CLASSIFIERS,
    EvalReport,
    brier,
    credal_metrics,
    cross_validate,
    discounted_accuracy,
    utility,
    wilcoxon_signed_rank,
)
from .optimize import (
    DOMINANCE_MARGIN,
    DenominatorSignError,
    FractionalLP,
    IndefiniteRatioError,
    LinearProgram,
    RatioProgram,
    charnes_cooper,
    fractional_min,
    minimize_ratio,
    solve_lp,
    vertex_oracle,
)
from .spode import (
    Cpt,
    NullModel,
    SpodeModel,
    conditional_log_likelihood,
    fit_null,
    fit_spode,
    predict_spode,
)

__version__ = "0.1.0"
