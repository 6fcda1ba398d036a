"""Credal ensemble classifiers: a set of model priors instead of one prior.

The prior credal set keeps every model's prior probability above a small
epsilon (with the null model pinned at exactly epsilon in the compression
variant).  A class is returned iff no other class is more probable under
*every* prior in the set; prior-dependent instances therefore come back as
a set of classes rather than a single guess.

Dominance between two classes reduces to checking whether the minimum of a
ratio over the credal set exceeds one: a linear-fractional program for the
likelihood-weighted variant (solved exactly via Charnes-Cooper) and a
ratio-of-log-sums program for the compression variant (solved by multistart
projected gradient).  Both use a small margin so that numerical noise errs
toward returning extra classes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .ensemble import (
    DEFAULT_EPSILON,
    DEFAULT_PRUNING_EXPONENT,
    EmptyEnsembleError,
    EnsembleScores,
    bma_weights,
    mix_posteriors,
    model_posteriors,
    normalized_compression,
    prune_mask,
    raw_compression,
    robust_exp,
)
from .optimize import (
    DOMINANCE_MARGIN,
    DenominatorSignError,
    FractionalLP,
    IndefiniteRatioError,
    RatioProgram,
    fractional_min,
    minimize_ratio,
)

BMA_STAR = "bma-star"
COMP_STAR = "comp-star"


@dataclass(frozen=True)
class CredalSpec:
    """Description of the prior credal set over the k models.

    Without the null model the priors range over {P(s_j) >= epsilon,
    sum P(s_j) = 1}; with it the null keeps a fixed epsilon and the SPODE
    priors share the remaining mass under the same lower bound.
    """

    k: int
    epsilon: float = DEFAULT_EPSILON
    includes_null: bool = False

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.k * self.epsilon >= 1.0:
            raise ValueError("k * epsilon must stay below 1")
        if self.includes_null and (self.k + 1) * self.epsilon > 1.0:
            raise ValueError("(k + 1) * epsilon must not exceed 1")


@dataclass(frozen=True)
class CredalPrediction:
    """Non-dominated class set plus the single-prior posterior for reporting."""

    classes: tuple
    posterior: np.ndarray
    prior_dependent: bool

    def __post_init__(self):
        if len(self.classes) == 0:
            raise ValueError("credal prediction cannot be empty")


def nondominated(classes, dominates) -> list[int]:
    """All classes not dominated by any other class (maximality).

    ``dominates(c1, c2)`` must be defined for every ordered pair; the double
    loop removes c2 whenever some c1 dominates it.
    """
    nd = set(classes)
    for c1 in classes:
        for c2 in classes:
            if c2 == c1:
                continue
            if dominates(c1, c2):
                nd.discard(c2)
    return sorted(nd)


def bma_dominates(
    c1: int,
    c2: int,
    models,
    scores: EnsembleScores,
    spec: CredalSpec,
    instance=None,
    *,
    posteriors: np.ndarray | None = None,
    pruning_exponent: float = DEFAULT_PRUNING_EXPONENT,
) -> bool:
    """True iff c1 beats c2 under every prior of the likelihood credal set.

    Pruned models (likelihood below max/10^exponent) are dropped from both
    sides with their prior mass parked at epsilon, shrinking the remaining
    simplex accordingly.  The minimum of the posterior-mass ratio is found
    exactly via Charnes-Cooper plus simplex.
    """
    if posteriors is None:
        posteriors = model_posteriors(models, np.asarray(instance)[None, :])[:, 0, :]
    alive = prune_mask(scores, pruning_exponent)
    m = int(alive.sum())
    lik = robust_exp(scores.log_likelihoods[alive])
    gamma = posteriors[alive, c1] * lik
    delta = posteriors[alive, c2] * lik
    # normalize each side separately (scaling leaves the optimizer unchanged)
    # so the simplex never sees the raw 1e-300..1 spread of posterior masses;
    # the scale factors move into the dominance threshold in log space
    scale_num = float(gamma.max())
    scale_den = float(delta.max())
    if scale_num <= 0.0:
        return False
    if scale_den <= 0.0:
        return True
    total = 1.0 - (scores.k - m) * spec.epsilon
    fp = FractionalLP(gamma / scale_num, delta / scale_den,
                      lower=spec.epsilon, total=total)
    try:
        value, _ = fractional_min(fp)
    except DenominatorSignError:
        return False
    if value <= 0.0:
        return False
    return (np.log(value) + np.log(scale_num) - np.log(scale_den)
            > np.log1p(DOMINANCE_MARGIN))


def comp_upper_pi(scores: EnsembleScores, spec: CredalSpec) -> tuple[np.ndarray, np.ndarray]:
    """Per-SPODE (lower, upper) bounds of the raw compression coefficient.

    The bounds come from sweeping each model's prior over [epsilon, 1 - k*epsilon]
    inside the null-inclusive credal set; models with non-positive upper
    bound are unfeasible for every prior.
    """
    if not spec.includes_null:
        raise ValueError("compression bounds require the null-inclusive credal set")
    eps = spec.epsilon
    denom = -scores.n_train * scores.class_entropy + np.log(eps)
    lower = 1.0 - (scores.log_likelihoods + np.log(eps)) / denom
    upper = 1.0 - (scores.log_likelihoods + np.log(1.0 - scores.k * eps)) / denom
    return lower, upper


def _comp_program(c1, c2, posteriors, scores, spec, feasible):
    eps = spec.epsilon
    alpha = posteriors[feasible, c1]
    beta = posteriors[feasible, c2]
    d = np.log(eps) + scores.null_log_likelihood - scores.log_likelihoods[feasible]
    return RatioProgram(
        alpha=alpha,
        beta=beta,
        a=float(alpha @ d),
        b=float(beta @ d),
        epsilon=eps,
        n_models=scores.k,
        n_feasible=int(feasible.sum()),
    )


def comp_dominates(
    c1: int,
    c2: int,
    models,
    scores: EnsembleScores,
    spec: CredalSpec,
    instance=None,
    *,
    posteriors: np.ndarray | None = None,
    seed: int = 0,
) -> bool:
    """True iff c1 beats c2 under every prior of the compression credal set.

    The ratio of compression-weighted posterior masses is minimized over the
    feasible models' priors (nonlinear program in y_j = P(s_j)).  Two exact
    bounds short-circuit most calls: when every coefficient stays positive
    over the whole set, min_j alpha_j/beta_j lower-bounds the program, and
    the objective value at any feasible point upper-bounds it.
    """
    if posteriors is None:
        posteriors = model_posteriors(models, np.asarray(instance)[None, :])[:, 0, :]
    lower, upper = comp_upper_pi(scores, spec)
    feasible = upper > 0.0
    if not np.any(feasible):
        return False
    rp = _comp_program(c1, c2, posteriors, scores, spec, feasible)

    margin = 1.0 + DOMINANCE_MARGIN
    alpha, beta = rp.alpha, rp.beta
    if np.all(lower[feasible] > 0.0) and float(np.min(alpha / beta)) > margin:
        return True
    # any feasible point at or below the threshold settles the test; sample
    # the vertices, the barycenter and a seeded batch of interior points
    kt = rp.n_feasible
    points = [rp.vertices(), np.full((1, kt), rp.total() / kt)]
    if kt > 1:
        interior = np.random.default_rng(seed).dirichlet(np.ones(kt), size=256)
        points.append(spec.epsilon + (rp.total() - kt * spec.epsilon) * interior)
    logs = np.log(np.vstack(points))
    nums = logs @ alpha - rp.a
    dens = logs @ beta - rp.b
    if np.any(dens <= 0.0):
        return False  # mixture mass for c2 is not positive everywhere
    if float(np.min(nums / dens)) <= margin:
        return False
    try:
        value, _ = minimize_ratio(rp, seed=seed)
    except IndefiniteRatioError:
        return False
    return value > margin


def predict_credal(
    variant: str,
    models,
    scores: EnsembleScores,
    spec: CredalSpec,
    instance=None,
    *,
    null_model=None,
    posteriors: np.ndarray | None = None,
    pruning_exponent: float = DEFAULT_PRUNING_EXPONENT,
    seed: int = 0,
) -> CredalPrediction:
    """Non-dominated class set plus the determinate counterpart's posterior.

    A singleton always equals the counterpart's most probable class; when the
    compression feasible set is empty the full class set is returned (maximal
    caution) and a warning is emitted.
    """
    if posteriors is None:
        posteriors = model_posteriors(models, np.asarray(instance)[None, :])[:, 0, :]
    n_classes = posteriors.shape[1]
    classes = range(n_classes)

    if variant == BMA_STAR:
        det = mix_posteriors(posteriors[:, None, :],
                             bma_weights(scores, pruning_exponent))[0]

        def dominates(c1, c2):
            return bma_dominates(c1, c2, models, scores, spec,
                                 posteriors=posteriors,
                                 pruning_exponent=pruning_exponent)

        nd = nondominated(classes, dominates)
    elif variant == COMP_STAR:
        pi = raw_compression(scores, spec.epsilon)
        try:
            det = mix_posteriors(posteriors[:, None, :], normalized_compression(pi))[0]
        except EmptyEnsembleError:
            if null_model is None:
                raise
            det = np.asarray(null_model.class_marginal, dtype=float)
        _, upper = comp_upper_pi(scores, spec)
        if not np.any(upper > 0.0):
            warnings.warn("empty compression feasible set; returning all classes")
            nd = list(classes)
        else:

            def dominates(c1, c2):
                return comp_dominates(c1, c2, models, scores, spec,
                                      posteriors=posteriors, seed=seed)

            nd = nondominated(classes, dominates)
    else:
        raise ValueError(f"unknown credal variant {variant!r}")

    best = int(np.argmax(det))
    if best not in nd:
        # only possible when the feasible model sets of the determinate and
        # credal variants differ; observed never, so log instead of failing
        warnings.warn(
            f"determinate argmax {best} missing from non-dominated set {nd}"
        )
    return CredalPrediction(
        classes=tuple(nd),
        posterior=det,
        prior_dependent=len(nd) > 1,
    )
