"""Determinate ensemble classifiers over SPODE posteriors.

Three weighting schemes share the same mixture machinery:

* plain arithmetic averaging of the per-model posteriors;
* conditional-likelihood weighting with a uniform model prior, after
  pruning models whose log-likelihood trails the best by more than
  ``pruning_exponent`` orders of magnitude;
* compression weighting, where each model's weight is one minus the ratio
  of its code length to the null model's code length, normalized over the
  models that beat the null (positive coefficient).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .spode import NullModel, conditional_log_likelihood, fit_null, fit_spode, log_posteriors

DEFAULT_EPSILON = 0.01
DEFAULT_PRUNING_EXPONENT = 4.0


class EmptyEnsembleError(Exception):
    """No model has a positive compression coefficient."""


@dataclass(frozen=True)
class EnsembleScores:
    """Training-side sufficient statistics shared by all weighting schemes."""

    log_likelihoods: np.ndarray  # per-SPODE conditional log-likelihood
    null_log_likelihood: float
    class_entropy: float         # unsmoothed empirical H(C), natural log
    n_train: int

    @property
    def k(self) -> int:
        return self.log_likelihoods.shape[0]


def compute_scores(models, null: NullModel, ds: Dataset) -> EnsembleScores:
    lls = np.array([conditional_log_likelihood(m, ds) for m in models])
    return EnsembleScores(
        log_likelihoods=lls,
        null_log_likelihood=conditional_log_likelihood(null, ds),
        class_entropy=null.class_entropy,
        n_train=ds.n,
    )


def fit_ensemble(ds: Dataset):
    """Fit all k SPODEs plus the null model and score them on the training data."""
    models = [fit_spode(ds, j) for j in range(ds.k)]
    null = fit_null(ds)
    return models, null, compute_scores(models, null, ds)


def robust_exp(log_values) -> np.ndarray:
    """Normalized exponentials of possibly very negative log values.

    Shifting by the maximum before exponentiating keeps every intermediate
    in (0, 1], so inputs as low as -1e6 are handled without under- or
    overflow; the shift cancels in the normalization.
    """
    arr = np.asarray(log_values, dtype=float)
    if arr.size == 0:
        raise ValueError("robust_exp needs a nonempty input")
    shifted = np.exp(arr - arr.max())
    return shifted / shifted.sum()


def prune_mask(scores: EnsembleScores,
               pruning_exponent: float = DEFAULT_PRUNING_EXPONENT) -> np.ndarray:
    """True for models whose likelihood is within max/10^exponent (log domain)."""
    lls = scores.log_likelihoods
    return lls >= lls.max() - pruning_exponent * np.log(10.0)


def bma_weights(scores: EnsembleScores,
                pruning_exponent: float = DEFAULT_PRUNING_EXPONENT) -> np.ndarray:
    """Posterior model weights under a uniform prior (which cancels).

    Pruned models get weight exactly 0; survivors are the robust
    exponentials of their conditional log-likelihoods, summing to 1.
    """
    alive = prune_mask(scores, pruning_exponent)
    weights = np.zeros(scores.k)
    weights[alive] = robust_exp(scores.log_likelihoods[alive])
    return weights


def raw_compression(scores: EnsembleScores, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Per-SPODE raw compression coefficients.

    pi_j = 1 - (LL_j + log((1-eps)/k)) / (-n H(C) + log eps); the null
    model's own coefficient is 0 by construction, positive values mean the
    model compresses the class labels better than the null.
    """
    denom = -scores.n_train * scores.class_entropy + np.log(epsilon)
    return 1.0 - (scores.log_likelihoods + np.log((1.0 - epsilon) / scores.k)) / denom


def normalized_compression(pi: np.ndarray) -> np.ndarray:
    """Normalize positive coefficients; non-feasible models get weight 0.

    Raises EmptyEnsembleError when no coefficient is positive; the caller
    falls back to the null model's marginal prediction.
    """
    pi = np.asarray(pi, dtype=float)
    feasible = pi > 0.0
    if not np.any(feasible):
        raise EmptyEnsembleError("all compression coefficients are non-positive")
    weights = np.zeros_like(pi)
    weights[feasible] = pi[feasible] / pi[feasible].sum()
    return weights


def model_posteriors(models, X: np.ndarray) -> np.ndarray:
    """Stacked per-model posteriors, shape (k, n, n_classes)."""
    return np.stack([np.exp(log_posteriors(m, X)) for m in models])


def mix_posteriors(posteriors: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Weighted mixture of per-model posteriors, renormalized row-wise."""
    mixed = np.tensordot(weights, posteriors, axes=(0, 0))
    return mixed / mixed.sum(axis=-1, keepdims=True)


def aode_predict(models, instance) -> np.ndarray:
    """Arithmetic mean of all SPODE posteriors."""
    post = model_posteriors(models, np.asarray(instance)[None, :])
    return mix_posteriors(post, np.full(len(models), 1.0 / len(models)))[0]


def bma_predict(models, weights, instance) -> np.ndarray:
    """Likelihood-weighted mixture of SPODE posteriors."""
    post = model_posteriors(models, np.asarray(instance)[None, :])
    return mix_posteriors(post, np.asarray(weights, dtype=float))[0]


def comp_predict(models, weights, instance) -> np.ndarray:
    """Compression-weighted mixture of SPODE posteriors."""
    return bma_predict(models, weights, instance)


def argmax_class(posterior: np.ndarray) -> int:
    """Most probable class; ties broken by the lowest class index."""
    return int(np.argmax(posterior))
