"""Small public benchmark tables for the directional experiments.

iris, wine and the Wisconsin breast-cancer table ship with scikit-learn.
The MONK's problems are rule-defined, so their complete 432-instance
attribute spaces are regenerated here from the published target concepts:

* monks1: a1 == a2 or a5 == 1
* monks2: exactly two of the six attributes equal 1
* monks3: (a5 == 3 and a4 == 1) or (a5 != 4 and a2 != 3)

Attribute domains: a1, a2, a4 in {1,2,3}; a3, a6 in {1,2}; a5 in {1,2,3,4}.
The waveform table is a seeded sample from the classic three-class
generator (each class a random convex combination of two of three
triangular base waves plus unit Gaussian noise on all 21 attributes).

monks2 is generated for completeness but kept out of the benchmark roster:
its "exactly two of six" concept defeats one-dependence models outright
(accuracy below the majority baseline), which makes safe/prior-dependent
accuracy splits meaningless there.
"""

import itertools

import numpy as np

from credal_aode.dataset import RawTable

MONKS_DOMAINS = (3, 3, 2, 3, 4, 2)
WAVEFORM_SEED = 20250810


def _monks_label(which, a):
    if which == 1:
        return a[0] == a[1] or a[4] == 1
    if which == 2:
        return sum(1 for v in a if v == 1) == 2
    if which == 3:
        return (a[4] == 3 and a[3] == 1) or (a[4] != 4 and a[1] != 3)
    raise ValueError(which)


def monks_table(which: int) -> RawTable:
    names = [f"a{i + 1}" for i in range(6)] + ["cls"]
    kinds = ["categorical"] * 7
    rows = []
    for combo in itertools.product(*[range(1, d + 1) for d in MONKS_DOMAINS]):
        label = "1" if _monks_label(which, combo) else "0"
        rows.append([str(v) for v in combo] + [label])
    return RawTable(names, kinds, rows, "cls")


def waveform_table(n: int = 1000, seed: int = WAVEFORM_SEED) -> RawTable:
    rng = np.random.default_rng(seed)
    base = np.zeros((3, 21))
    for i in range(1, 22):
        base[0, i - 1] = max(6 - abs(i - 7), 0)
        base[1, i - 1] = max(6 - abs(i - 15), 0)
        base[2, i - 1] = max(6 - abs(i - 11), 0)
    pairs = {0: (0, 1), 1: (0, 2), 2: (1, 2)}
    rows = []
    for _ in range(n):
        c = int(rng.integers(0, 3))
        a, b = pairs[c]
        u = rng.uniform()
        x = u * base[a] + (1 - u) * base[b] + rng.normal(size=21)
        rows.append([float(v) for v in x] + [f"w{c}"])
    names = [f"x{i}" for i in range(1, 22)] + ["cls"]
    return RawTable(names, ["numeric"] * 21 + ["categorical"], rows, "cls")


def _sklearn_table(loader) -> RawTable:
    bunch = loader()
    names = [str(n).replace(" ", "_") for n in bunch.feature_names] + ["cls"]
    kinds = ["numeric"] * len(bunch.feature_names) + ["categorical"]
    rows = [
        [float(v) for v in x] + [str(bunch.target_names[t])]
        for x, t in zip(bunch.data, bunch.target)
    ]
    return RawTable(names, kinds, rows, "cls")


def benchmark_tables() -> dict:
    from sklearn.datasets import load_breast_cancer, load_iris, load_wine

    return {
        "iris": _sklearn_table(load_iris),
        "wine": _sklearn_table(load_wine),
        "monks1": monks_table(1),
        "monks3": monks_table(3),
        "breast_w": _sklearn_table(load_breast_cancer),
        "waveform": waveform_table(),
    }
