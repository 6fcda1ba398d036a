import numpy as np

from credal_aode.dataset import Dataset


def toy_dataset(rng, n=40, cards=(2, 3, 2), n_classes=2, planted=True):
    """Random categorical dataset; with ``planted`` the first feature carries
    class signal so the SPODEs have something to learn."""
    k = len(cards)
    y = rng.integers(0, n_classes, size=n)
    X = np.column_stack([rng.integers(0, c, size=n) for c in cards])
    if planted:
        flip = rng.random(n) < 0.8
        X[flip, 0] = y[flip] % cards[0]
    # make sure every class and every feature value occurs at least once
    y[:n_classes] = np.arange(n_classes)
    for j, c in enumerate(cards):
        X[:c, j] = np.arange(c)
    return Dataset(
        y=y,
        X=X,
        n_classes=n_classes,
        cardinalities=np.asarray(cards, dtype=int),
        class_labels=[str(c) for c in range(n_classes)],
        feature_names=[f"f{j}" for j in range(k)],
        feature_labels=[[str(v) for v in range(c)] for c in cards],
    )
