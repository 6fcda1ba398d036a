"""Superparent one-dependence models and the no-arc null model.

A SPODE with superparent j factorizes the joint as
P(c) * P(a_j | c) * prod_{l != j} P(a_l | a_j, c).  All conditional tables
are Dirichlet posterior means with a symmetric prior of total mass 1 per
parent configuration, so every estimate is strictly positive and unseen
parent configurations fall back to uniform columns.

Feature values encoded as -1 (unseen by the training codec) contribute a
uniform factor, which is constant across classes and therefore dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset

MASS_TOL = 1e-12


@dataclass(frozen=True)
class Cpt:
    """Dense conditional probability table.

    ``probs[x, p]`` is P(target = x | parent configuration p); every column
    is a strictly positive mass function.
    """

    probs: np.ndarray

    @property
    def target_card(self) -> int:
        return self.probs.shape[0]

    @property
    def n_parent_configs(self) -> int:
        return self.probs.shape[1]

    def check(self) -> None:
        sums = self.probs.sum(axis=0)
        if np.any(np.abs(sums - 1.0) > MASS_TOL):
            raise AssertionError("CPT column does not sum to 1")
        if np.any(self.probs <= 0.0):
            raise AssertionError("CPT entry not strictly positive")


def _smoothed(counts: np.ndarray) -> np.ndarray:
    """Dirichlet posterior mean per column: (n_x + 1/|X|) / (n + 1)."""
    card = counts.shape[0]
    return (counts + 1.0 / card) / (counts.sum(axis=0, keepdims=True) + 1.0)


@dataclass(frozen=True)
class SpodeModel:
    super_parent: int
    class_prior: Cpt      # (n_classes, 1)
    sp_given_class: Cpt   # (card_j, n_classes)
    children: tuple       # per feature l != j: Cpt of shape (card_l, card_j * n_classes)
    cardinalities: np.ndarray
    n_classes: int

    def _child(self, l: int) -> Cpt:
        shift = 0 if l < self.super_parent else 1
        return self.children[l - shift]

    def log_tables(self):
        """(log prior (l,), log sp (card_j, l), per-child log (card_l, card_j, l))."""
        lc = self.n_classes
        card_j = int(self.cardinalities[self.super_parent])
        logs = []
        for l in range(self.cardinalities.shape[0]):
            if l == self.super_parent:
                logs.append(None)
                continue
            t = self._child(l).probs.reshape(-1, card_j, lc)
            logs.append(np.log(t))
        return (
            np.log(self.class_prior.probs[:, 0]),
            np.log(self.sp_given_class.probs),
            logs,
        )


@dataclass(frozen=True)
class NullModel:
    class_marginal: np.ndarray
    class_entropy: float


def fit_spode(ds: Dataset, super_parent: int) -> SpodeModel:
    """Fit a SPODE on the training partition with ESS-1 Dirichlet smoothing."""
    if not 0 <= super_parent < ds.k:
        raise ValueError("super_parent out of range")
    lc = ds.n_classes
    j = super_parent
    card_j = int(ds.cardinalities[j])
    y, X = ds.y, ds.X

    class_counts = np.bincount(y, minlength=lc).astype(float)
    prior = Cpt(_smoothed(class_counts[:, None]))

    sp_counts = np.zeros((card_j, lc))
    np.add.at(sp_counts, (X[:, j], y), 1.0)
    sp = Cpt(_smoothed(sp_counts))

    children = []
    for l in range(ds.k):
        if l == j:
            continue
        card_l = int(ds.cardinalities[l])
        counts = np.zeros((card_l, card_j * lc))
        np.add.at(counts, (X[:, l], X[:, j] * lc + y), 1.0)
        children.append(Cpt(_smoothed(counts)))
    return SpodeModel(
        super_parent=j,
        class_prior=prior,
        sp_given_class=sp,
        children=tuple(children),
        cardinalities=ds.cardinalities.copy(),
        n_classes=lc,
    )


def fit_null(ds: Dataset) -> NullModel:
    """Smoothed class marginal plus the unsmoothed empirical class entropy.

    The entropy uses the natural logarithm so that the unsmoothed null
    log-likelihood equals -n * H(C) exactly.
    """
    counts = np.bincount(ds.y, minlength=ds.n_classes).astype(float)
    marginal = _smoothed(counts[:, None])[:, 0]
    freq = counts / counts.sum()
    nz = freq[freq > 0]
    entropy = float(-(nz * np.log(nz)).sum())
    return NullModel(class_marginal=marginal, class_entropy=entropy)


def log_posteriors(model: SpodeModel, X: np.ndarray) -> np.ndarray:
    """Normalized log P(c | x) for every row of X, shape (n, n_classes).

    Evaluated in the log domain with a max shift before exponentiation, so
    many-feature products cannot underflow.
    """
    X = np.atleast_2d(X)
    n = X.shape[0]
    log_prior, log_sp, log_children = model.log_tables()
    j = model.super_parent
    lj = np.broadcast_to(log_prior, (n, model.n_classes)).copy()

    xj = X[:, j]
    seen_j = xj >= 0
    lj[seen_j] += log_sp[xj[seen_j]]
    for l in range(model.cardinalities.shape[0]):
        if l == j:
            continue
        xl = X[:, l]
        use = seen_j & (xl >= 0)
        if np.any(use):
            lj[use] += log_children[l][xl[use], xj[use]]

    lj -= lj.max(axis=1, keepdims=True)
    post = np.exp(lj)
    post /= post.sum(axis=1, keepdims=True)
    return np.log(post)


def predict_spode(model: SpodeModel, instance: np.ndarray) -> np.ndarray:
    """Posterior class mass function for one instance; sums to 1."""
    return np.exp(log_posteriors(model, np.asarray(instance)[None, :]))[0]


def conditional_log_likelihood(model, ds: Dataset) -> float:
    """Sum over instances of log P(true class | features).

    For the null model this is the log of the smoothed class marginal at the
    true class, instance by instance.
    """
    if isinstance(model, NullModel):
        return float(np.log(model.class_marginal[ds.y]).sum())
    logs = log_posteriors(model, ds.X)
    return float(logs[np.arange(ds.n), ds.y].sum())
