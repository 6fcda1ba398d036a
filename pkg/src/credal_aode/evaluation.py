"""Scoring, significance testing and cross-validated experiments.

Determinate classifiers are scored by accuracy and Brier loss; credal
classifiers additionally by determinacy, single/set accuracy, indeterminate
output size, discounted accuracy and the u65/u80 utilities.  A fully
determinate prediction has discounted accuracy equal to its correctness, so
utilities and accuracy coincide for determinate classifiers.

Experiment cells (run, fold) are independent: preprocessing statistics
(imputation fills, discretization cuts, value dictionaries) are fitted on
the training split only, and cells may be computed in parallel with a
deterministic reduction.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .credal import BMA_STAR, COMP_STAR, CredalSpec, predict_credal
from .dataset import ConfigurationError, FoldPlan, RawTable, encode, fit_codec
from .ensemble import (
    DEFAULT_EPSILON,
    DEFAULT_PRUNING_EXPONENT,
    EmptyEnsembleError,
    bma_weights,
    fit_ensemble,
    mix_posteriors,
    model_posteriors,
    normalized_compression,
    raw_compression,
)

DETERMINATE_CLASSIFIERS = ("aode", "bma-aode", "comp-aode")
CREDAL_CLASSIFIERS = ("bma-aode-star", "comp-aode-star")
ALL_CLASSIFIERS = DETERMINATE_CLASSIFIERS + CREDAL_CLASSIFIERS

_CREDAL_VARIANT = {"bma-aode-star": BMA_STAR, "comp-aode-star": COMP_STAR}


def brier(predictions: np.ndarray, truths: np.ndarray) -> float:
    """Mean squared complement of the probability assigned to the true class."""
    predictions = np.asarray(predictions, dtype=float)
    truths = np.asarray(truths)
    known = truths >= 0
    p_true = np.zeros(truths.shape[0])
    p_true[known] = predictions[np.nonzero(known)[0], truths[known]]
    return float(np.mean((1.0 - p_true) ** 2))


def accuracy(predictions: np.ndarray, truths: np.ndarray) -> float:
    return float(np.mean(np.argmax(predictions, axis=1) == np.asarray(truths)))


@dataclass(frozen=True)
class CredalMetrics:
    determinacy: float
    single_accuracy: float | None
    set_accuracy: float | None
    output_size: float | None


def credal_metrics(pred_sets, truths) -> CredalMetrics:
    """Determinacy, single/set accuracy and mean indeterminate output size.

    Aggregates with an empty denominator (no singletons, or no indeterminate
    outputs) are reported as None, never as zero.
    """
    truths = np.asarray(truths)
    sizes = np.array([len(s) for s in pred_sets])
    hits = np.array([int(t) in set(int(c) for c in s)
                     for s, t in zip(pred_sets, truths)])
    single = sizes == 1
    determinacy = float(np.mean(single))
    single_accuracy = float(np.mean(hits[single])) if single.any() else None
    indet = ~single
    set_accuracy = float(np.mean(hits[indet])) if indet.any() else None
    output_size = float(np.mean(sizes[indet])) if indet.any() else None
    return CredalMetrics(determinacy, single_accuracy, set_accuracy, output_size)


def discounted_accuracy(pred_sets, truths) -> float:
    """Mean of 1/m for m-class predictions containing the truth, else 0."""
    truths = np.asarray(truths)
    rewards = [
        (1.0 / len(s)) if int(t) in set(int(c) for c in s) else 0.0
        for s, t in zip(pred_sets, truths)
    ]
    return float(np.mean(rewards))


def per_instance_discounted(pred_sets, truths) -> np.ndarray:
    truths = np.asarray(truths)
    return np.array([
        (1.0 / len(s)) if int(t) in set(int(c) for c in s) else 0.0
        for s, t in zip(pred_sets, truths)
    ])


# quadratic utilities through {u(0)=0, u(0.5)=0.65 resp. 0.8, u(1)=1};
# u65(x) = 1.6x - 0.6x^2 and u80(x) = 2.2x - 1.2x^2
_UTILITY_BONUS = {"u65": 0.6, "u80": 1.2}


def utility(x, which: str):
    """Risk-averse utility of a discounted-accuracy value: u65 or u80."""
    try:
        c = _UTILITY_BONUS[which]
    except KeyError:
        raise ValueError(f"unknown utility {which!r}; use 'u65' or 'u80'")
    x = np.asarray(x, dtype=float)
    # the x + c*x*(1-x) form lands on the 0 / 0.65 / 0.8 / 1 anchors exactly
    out = x + c * x * (1.0 - x)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Wilcoxon signed-rank test
# ---------------------------------------------------------------------------

def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.shape[0])
    i = 0
    while i < values.shape[0]:
        j = i
        while j + 1 < values.shape[0] and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _exact_two_sided_p(ranks: np.ndarray, statistic: float) -> float:
    """P(|T| >= |t|) under random signs, by counting subset sums of doubled
    ranks (midranks double to integers, so ties are handled exactly)."""
    doubled = np.rint(2.0 * ranks).astype(np.int64)
    total = int(doubled.sum())
    counts = np.zeros(total + 1)
    counts[0] = 1.0
    for r in doubled:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: counts.shape[0] - r]
        counts = counts + shifted
    sums = np.arange(total + 1)
    t_values = 2 * sums - total  # doubled-scale statistic per subset sum
    threshold = abs(2.0 * statistic) - 1e-9
    mass = counts[np.abs(t_values) >= threshold].sum()
    return float(min(mass / 2.0 ** len(ranks), 1.0))


def wilcoxon_signed_rank(a, b) -> tuple[float, float]:
    """Two-sided Wilcoxon signed-rank test on paired scores.

    Zero differences are dropped.  Returns the signed-rank sum
    T = sum sign(d_i) * rank|d_i| (so swapping the inputs negates it) and
    the two-sided p-value: exact for up to 25 surviving pairs, otherwise a
    normal approximation with tie-corrected variance and continuity
    correction.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("need two equally long 1-d score vectors")
    d = a - b
    d = d[d != 0.0]
    n = d.shape[0]
    if n == 0:
        return 0.0, 1.0
    ranks = _midranks(np.abs(d))
    statistic = float((np.sign(d) * ranks).sum())
    if n <= 25:
        return statistic, _exact_two_sided_p(ranks, statistic)
    w_plus = float(ranks[d > 0].sum())
    mean = ranks.sum() / 2.0
    var = float((ranks**2).sum()) / 4.0  # equals the tie-corrected variance
    z = w_plus - mean
    z -= 0.5 * np.sign(z)
    z /= math.sqrt(var)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return statistic, float(min(p, 1.0))


# ---------------------------------------------------------------------------
# cross-validated experiments
# ---------------------------------------------------------------------------

@dataclass
class CellResult:
    run: int
    fold: int
    n_test: int
    accuracy: float
    brier: float
    determinacy: float | None = None
    single_accuracy: float | None = None
    set_accuracy: float | None = None
    output_size: float | None = None
    discounted_accuracy: float | None = None
    u65: float | None = None
    u80: float | None = None
    n_safe: int = 0
    n_prior_dependent: int = 0
    counterpart_correct_safe: int = 0
    counterpart_correct_prior_dependent: int = 0


@dataclass
class EvalReport:
    """Per-cell results plus fold-mean aggregates for one classifier."""

    classifier: str
    n: int
    k: int
    folds: int
    runs: int
    seed: int
    epsilon: float
    cells: list[CellResult] = field(default_factory=list)

    def _mean(self, name: str) -> float | None:
        values = [getattr(c, name) for c in self.cells]
        values = [v for v in values if v is not None]
        return float(np.mean(values)) if values else None

    @property
    def accuracy(self):
        return self._mean("accuracy")

    @property
    def brier(self):
        return self._mean("brier")

    @property
    def determinacy(self):
        return self._mean("determinacy")

    @property
    def single_accuracy(self):
        return self._mean("single_accuracy")

    @property
    def set_accuracy(self):
        return self._mean("set_accuracy")

    @property
    def output_size(self):
        return self._mean("output_size")

    @property
    def discounted_accuracy(self):
        return self._mean("discounted_accuracy")

    @property
    def u65(self):
        return self._mean("u65")

    @property
    def u80(self):
        return self._mean("u80")

    def counterpart_accuracy_safe(self) -> float | None:
        """Pooled counterpart accuracy on instances the credal variant called safe."""
        n = sum(c.n_safe for c in self.cells)
        if n == 0:
            return None
        return sum(c.counterpart_correct_safe for c in self.cells) / n

    def counterpart_accuracy_prior_dependent(self) -> float | None:
        """Pooled counterpart accuracy on prior-dependent instances."""
        n = sum(c.n_prior_dependent for c in self.cells)
        if n == 0:
            return None
        return sum(c.counterpart_correct_prior_dependent for c in self.cells) / n

    def metric_dict(self) -> dict:
        return {
            "classifier": self.classifier,
            "accuracy": self.accuracy,
            "brier": self.brier,
            "determinacy": self.determinacy,
            "single_accuracy": self.single_accuracy,
            "set_accuracy": self.set_accuracy,
            "output_size": self.output_size,
            "discounted_accuracy": self.discounted_accuracy,
            "u65": self.u65,
            "u80": self.u80,
            "n": self.n,
            "k": self.k,
            "folds": self.folds,
            "runs": self.runs,
            "seed": self.seed,
            "epsilon": self.epsilon,
        }


def _evaluate_cell(args) -> dict:
    (table, train_idx, test_idx, run, fold, classifiers,
     epsilon, pruning_exponent, seed) = args
    codec = fit_codec(table, train_idx)
    train = encode(table, codec, train_idx)
    test = encode(table, codec, test_idx)
    models, null, scores = fit_ensemble(train)
    posts = model_posteriors(models, test.X)  # (k, n_test, l)
    n_test = test.n
    k = train.k

    determinate: dict[str, np.ndarray] = {}
    if {"aode", "bma-aode-star"} & set(classifiers):
        determinate["aode"] = mix_posteriors(posts, np.full(k, 1.0 / k))
    if {"bma-aode", "bma-aode-star"} & set(classifiers):
        determinate["bma-aode"] = mix_posteriors(
            posts, bma_weights(scores, pruning_exponent))
    if {"comp-aode", "comp-aode-star"} & set(classifiers):
        try:
            w = normalized_compression(raw_compression(scores, epsilon))
            determinate["comp-aode"] = mix_posteriors(posts, w)
        except EmptyEnsembleError:
            determinate["comp-aode"] = np.tile(null.class_marginal, (n_test, 1))

    out: dict[str, CellResult] = {}
    for name in classifiers:
        if name in DETERMINATE_CLASSIFIERS:
            pred = determinate[name]
            acc = accuracy(pred, test.y)
            out[name] = CellResult(
                run=run, fold=fold, n_test=n_test,
                accuracy=acc, brier=brier(pred, test.y),
                discounted_accuracy=acc, u65=acc, u80=acc,
            )
            continue
        variant = _CREDAL_VARIANT[name]
        spec = CredalSpec(k=k, epsilon=epsilon,
                          includes_null=(variant == COMP_STAR))
        counterpart = determinate["bma-aode" if variant == BMA_STAR else "comp-aode"]
        sets = []
        for i in range(n_test):
            cp = predict_credal(
                variant, models, scores, spec,
                posteriors=posts[:, i, :], null_model=null,
                pruning_exponent=pruning_exponent, seed=seed,
            )
            sets.append(cp.classes)
        cm = credal_metrics(sets, test.y)
        da = per_instance_discounted(sets, test.y)
        correct = np.argmax(counterpart, axis=1) == test.y
        pd_mask = np.array([len(s) > 1 for s in sets])
        out[name] = CellResult(
            run=run, fold=fold, n_test=n_test,
            accuracy=accuracy(counterpart, test.y),
            brier=brier(counterpart, test.y),
            determinacy=cm.determinacy,
            single_accuracy=cm.single_accuracy,
            set_accuracy=cm.set_accuracy,
            output_size=cm.output_size,
            discounted_accuracy=float(da.mean()),
            u65=float(utility(da, "u65").mean()),
            u80=float(utility(da, "u80").mean()),
            n_safe=int((~pd_mask).sum()),
            n_prior_dependent=int(pd_mask.sum()),
            counterpart_correct_safe=int(correct[~pd_mask].sum()),
            counterpart_correct_prior_dependent=int(correct[pd_mask].sum()),
        )
    return out


def cross_validate(
    table: RawTable,
    plan: FoldPlan,
    classifiers,
    epsilon: float = DEFAULT_EPSILON,
    pruning_exponent: float = DEFAULT_PRUNING_EXPONENT,
    seed: int = 0,
    jobs: int = 1,
) -> dict[str, EvalReport]:
    """Fit and score every classifier on every (run, fold) cell of the plan.

    Preprocessing (imputation fills, discretization cuts, dictionaries) is
    refitted inside each cell from the training split only.  Deterministic
    for fixed inputs regardless of ``jobs``.
    """
    classifiers = list(classifiers)
    unknown = [c for c in classifiers if c not in ALL_CLASSIFIERS]
    if unknown:
        raise ConfigurationError(
            f"unknown classifier(s) {', '.join(unknown)}; "
            f"valid names: {', '.join(ALL_CLASSIFIERS)}"
        )
    tasks = [
        (table, plan.train(run, fold), plan.test(run, fold), run, fold,
         classifiers, epsilon, pruning_exponent, seed)
        for run in range(plan.runs)
        for fold in range(plan.folds)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cell_dicts = list(pool.map(_evaluate_cell, tasks))
    else:
        cell_dicts = [_evaluate_cell(t) for t in tasks]

    k = len(table.feature_indices)
    reports = {
        name: EvalReport(
            classifier=name, n=table.n, k=k, folds=plan.folds,
            runs=plan.runs, seed=seed, epsilon=epsilon,
        )
        for name in classifiers
    }
    for cells in cell_dicts:
        for name, cell in cells.items():
            reports[name].cells.append(cell)
    return reports
