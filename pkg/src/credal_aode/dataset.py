"""Tabular data handling: CSV loading, imputation, MDL discretization, folds.

Every classifier in this package consumes a fully categorical ``Dataset``;
this module turns a raw CSV (possibly numeric, possibly with missing cells)
into that form.  Numeric columns are discretized by recursive binary entropy
splits accepted under the MDL criterion; preprocessing statistics (fills,
cut points, value dictionaries) can be fitted on a training subset and
applied to held-out rows via ``Codec``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

MISSING_MARKERS = {"", "?", "na"}  # matched case-insensitively


class DataError(Exception):
    """Malformed or unusable data (CLI exit code 1)."""


class ConfigurationError(Exception):
    """Invalid configuration or parameters (CLI exit code 2)."""


NUMERIC = "numeric"
CATEGORICAL = "categorical"


@dataclass
class RawTable:
    """A parsed table: cells are float, str or None (missing)."""

    column_names: list[str]
    kinds: list[str]
    rows: list[list[object]]
    class_column: str

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def class_index(self) -> int:
        return self.column_names.index(self.class_column)

    @property
    def feature_indices(self) -> list[int]:
        ci = self.class_index
        return [i for i in range(len(self.column_names)) if i != ci]

    def column(self, i: int) -> list[object]:
        return [row[i] for row in self.rows]


@dataclass
class Dataset:
    """Fully categorical instance table, encoded as dense indices.

    ``X[i, j] == -1`` marks a value unseen by the fitted codec; it only
    occurs when encoding held-out rows.
    """

    y: np.ndarray
    X: np.ndarray
    n_classes: int
    cardinalities: np.ndarray
    class_labels: list[str]
    feature_names: list[str]
    feature_labels: list[list[str]]

    @property
    def n(self) -> int:
        return int(self.y.shape[0])

    @property
    def k(self) -> int:
        return int(self.X.shape[1])

    def validate(self) -> None:
        if self.n < 1 or self.k < 1:
            raise DataError("dataset must have at least one row and one feature")
        if self.y.min() < 0 or self.y.max() >= self.n_classes:
            raise DataError("class index out of range")
        if self.X.min() < 0 or np.any(self.X.max(axis=0) >= self.cardinalities):
            raise DataError("feature index out of range")


@dataclass
class FoldPlan:
    """Stratified test-fold index lists for every (run, fold) pair."""

    runs: int
    folds: int
    seed: int
    n: int
    test_indices: list[list[np.ndarray]]

    def test(self, run: int, fold: int) -> np.ndarray:
        return self.test_indices[run][fold]

    def train(self, run: int, fold: int) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        mask[self.test_indices[run][fold]] = False
        return np.nonzero(mask)[0]


def _parse_cell(text: str) -> object:
    text = text.strip()
    if text.lower() in MISSING_MARKERS:
        return None
    return text


def _as_float(text: str):
    try:
        return float(text)
    except ValueError:
        return None


def load_csv(path, class_column: str, schema: dict[str, str] | None = None) -> RawTable:
    """Parse a headered CSV into a RawTable.

    Column kinds are inferred (numeric if every non-missing cell parses as a
    number) unless overridden via ``schema``; the class column is always
    categorical.  Cells equal to "", "?" or "NA" (any case) are missing.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file")
        header = [h.strip() for h in header]
        raw_rows = []
        for i, row in enumerate(reader):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}: row {i + 2} has {len(row)} cells, expected {len(header)}"
                )
            raw_rows.append([_parse_cell(cell) for cell in row])
    if class_column not in header:
        raise ConfigurationError(
            f"class column {class_column!r} not found; columns: {', '.join(header)}"
        )
    if not raw_rows:
        raise DataError(f"{path}: no data rows")

    schema = schema or {}
    kinds = []
    for j, name in enumerate(header):
        if name == class_column:
            kinds.append(CATEGORICAL)
            continue
        if name in schema:
            if schema[name] not in (NUMERIC, CATEGORICAL):
                raise ConfigurationError(f"unknown column kind {schema[name]!r}")
            kinds.append(schema[name])
            continue
        cells = [row[j] for row in raw_rows if row[j] is not None]
        numeric = len(cells) > 0 and all(_as_float(c) is not None for c in cells)
        kinds.append(NUMERIC if numeric else CATEGORICAL)

    ci = header.index(class_column)
    rows = []
    for i, raw in enumerate(raw_rows):
        if raw[ci] is None:
            raise DataError(f"{path}: missing class value in row {i + 2}")
        row = []
        for j, cell in enumerate(raw):
            if cell is None:
                row.append(None)
            elif kinds[j] == NUMERIC:
                row.append(float(cell))
            else:
                row.append(str(cell))
        rows.append(row)
    return RawTable(header, kinds, rows, class_column)


def _column_fill(values: list[object], kind: str, name: str) -> object:
    present = [v for v in values if v is not None]
    if not present:
        raise DataError(f"column {name!r} is entirely missing")
    if kind == NUMERIC:
        arr = np.sort(np.asarray(present, dtype=float))
        mid = arr.shape[0] // 2
        if arr.shape[0] % 2:
            return float(arr[mid])
        return float((arr[mid - 1] + arr[mid]) / 2.0)
    # mode, ties broken by first-seen value
    counts: dict[object, int] = {}
    for v in present:
        counts[v] = counts.get(v, 0) + 1
    best = max(counts.values())
    for v in present:
        if counts[v] == best:
            return v
    raise AssertionError("unreachable")


def impute(table: RawTable) -> RawTable:
    """Fill missing cells with the column median (numeric) or mode (categorical)."""
    fills = [
        _column_fill(table.column(j), table.kinds[j], name)
        for j, name in enumerate(table.column_names)
    ]
    rows = [
        [fills[j] if cell is None else cell for j, cell in enumerate(row)]
        for row in table.rows
    ]
    return RawTable(list(table.column_names), list(table.kinds), rows, table.class_column)


# ---------------------------------------------------------------------------
# MDL (entropy-based) discretization
# ---------------------------------------------------------------------------

def _entropy2(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def mdl_cut_points(values: np.ndarray, classes: np.ndarray, n_classes: int) -> list[float]:
    """Cut points accepted by recursive MDL-tested binary entropy splits.

    Candidates are midpoints between adjacent distinct values whose
    neighbourhood is not a single pure class (class-boundary points);
    recursion depth is unlimited.
    """
    order = np.argsort(values, kind="stable")
    v = np.asarray(values, dtype=float)[order]
    cls = np.asarray(classes)[order]
    n = v.shape[0]
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), cls] = 1.0
    prefix = np.vstack([np.zeros(n_classes), np.cumsum(onehot, axis=0)])

    cuts: list[float] = []

    def counts(lo: int, hi: int) -> np.ndarray:
        return prefix[hi] - prefix[lo]

    def split(lo: int, hi: int) -> None:
        seg_counts = counts(lo, hi)
        n_seg = hi - lo
        ent = _entropy2(seg_counts)
        if ent == 0.0:
            return
        # candidate positions: distinct-value boundaries that separate classes
        best_gain, best_pos = -np.inf, -1
        pos = lo
        while pos < hi:
            nxt = pos
            while nxt < hi and v[nxt] == v[pos]:
                nxt += 1
            if nxt < hi:
                left_group = counts(pos, nxt)
                right_end = nxt
                while right_end < hi and v[right_end] == v[nxt]:
                    right_end += 1
                right_group = counts(nxt, right_end)
                group_union = (left_group > 0) | (right_group > 0)
                if group_union.sum() > 1:
                    left = counts(lo, nxt)
                    right = counts(nxt, hi)
                    n1, n2 = nxt - lo, hi - nxt
                    gain = ent - (n1 * _entropy2(left) + n2 * _entropy2(right)) / n_seg
                    if gain > best_gain:
                        best_gain, best_pos = gain, nxt
            pos = nxt
        if best_pos < 0:
            return
        left = counts(lo, best_pos)
        right = counts(best_pos, hi)
        c = int((seg_counts > 0).sum())
        c1 = int((left > 0).sum())
        c2 = int((right > 0).sum())
        threshold = (
            np.log2(n_seg - 1)
            + np.log2(3.0**c - 2.0)
            - c * ent
            + c1 * _entropy2(left)
            + c2 * _entropy2(right)
        ) / n_seg
        if best_gain > threshold:
            cuts.append(float((v[best_pos - 1] + v[best_pos]) / 2.0))
            split(lo, best_pos)
            split(best_pos, hi)

    split(0, n)
    return sorted(cuts)


# ---------------------------------------------------------------------------
# codec: fitted preprocessing, reusable on held-out rows
# ---------------------------------------------------------------------------

@dataclass
class Codec:
    """Imputation fills, numeric cut points and value dictionaries fitted on
    a set of rows; applying it to other rows uses only these statistics."""

    fills: list
    cuts: list
    cat_maps: list
    class_map: dict
    class_labels: list[str]
    feature_names: list[str] = field(default_factory=list)
    feature_labels: list[list[str]] = field(default_factory=list)
    cardinalities: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))


def _interval_labels(cuts: list[float]) -> list[str]:
    if not cuts:
        return ["all"]
    edges = ["-inf"] + [f"{c:g}" for c in cuts] + ["inf"]
    return [f"({lo}, {hi}]" for lo, hi in zip(edges[:-1], edges[1:])]


def fit_codec(table: RawTable, rows: np.ndarray | None = None) -> Codec:
    """Learn fills, class/value dictionaries and MDL cuts from the given rows."""
    idx = np.arange(table.n) if rows is None else np.asarray(rows)
    if idx.size == 0:
        raise DataError("cannot fit preprocessing on an empty row set")
    ci = table.class_index

    fills = []
    for j, name in enumerate(table.column_names):
        col = [table.rows[i][j] for i in idx]
        fills.append(_column_fill(col, table.kinds[j], name))

    class_map: dict = {}
    for i in idx:
        val = table.rows[i][ci]
        if val not in class_map:
            class_map[val] = len(class_map)
    class_labels = [str(v) for v in class_map]
    y = np.array([class_map[table.rows[i][ci]] for i in idx])

    cuts: list = [None] * len(table.column_names)
    cat_maps: list = [None] * len(table.column_names)
    feature_names, feature_labels, cards = [], [], []
    for j in table.feature_indices:
        feature_names.append(table.column_names[j])
        filled = [
            fills[j] if table.rows[i][j] is None else table.rows[i][j] for i in idx
        ]
        if table.kinds[j] == NUMERIC:
            values = np.asarray(filled, dtype=float)
            cj = mdl_cut_points(values, y, len(class_map))
            cuts[j] = np.asarray(cj, dtype=float)
            feature_labels.append(_interval_labels(cj))
            cards.append(len(cj) + 1)
        else:
            mapping: dict = {}
            for v in filled:
                if v not in mapping:
                    mapping[v] = len(mapping)
            cat_maps[j] = mapping
            feature_labels.append([str(v) for v in mapping])
            cards.append(len(mapping))
    return Codec(
        fills=fills,
        cuts=cuts,
        cat_maps=cat_maps,
        class_map=class_map,
        class_labels=class_labels,
        feature_names=feature_names,
        feature_labels=feature_labels,
        cardinalities=np.asarray(cards, dtype=int),
    )


def encode(table: RawTable, codec: Codec, rows: np.ndarray | None = None) -> Dataset:
    """Encode rows with a fitted codec; unseen values become index -1."""
    idx = np.arange(table.n) if rows is None else np.asarray(rows)
    ci = table.class_index
    n, k = idx.size, len(table.feature_indices)
    y = np.empty(n, dtype=np.int64)
    X = np.empty((n, k), dtype=np.int64)
    for out_i, i in enumerate(idx):
        row = table.rows[i]
        y[out_i] = codec.class_map.get(row[ci], -1)
        for out_j, j in enumerate(table.feature_indices):
            cell = row[j]
            if cell is None:
                cell = codec.fills[j]
            if table.kinds[j] == NUMERIC:
                X[out_i, out_j] = int(np.searchsorted(codec.cuts[j], float(cell)))
            else:
                X[out_i, out_j] = codec.cat_maps[j].get(cell, -1)
    return Dataset(
        y=y,
        X=X,
        n_classes=len(codec.class_labels),
        cardinalities=codec.cardinalities.copy(),
        class_labels=list(codec.class_labels),
        feature_names=list(codec.feature_names),
        feature_labels=[list(l) for l in codec.feature_labels],
    )


def discretize_mdl(table: RawTable) -> Dataset:
    """Discretize numeric columns by MDL entropy splits; map everything to indices."""
    for i, row in enumerate(table.rows):
        if any(cell is None for cell in row):
            raise DataError(f"row {i + 2} still has missing cells; impute first")
    codec = fit_codec(table)
    ds = encode(table, codec)
    ds.validate()
    return ds


def make_folds(ds: Dataset, runs: int, folds: int, seed: int) -> FoldPlan:
    """Seeded stratified fold plan: per run, a class-stratified partition.

    Leftover instances after proportional assignment are dealt round-robin
    to folds in index order (the counter is shared across classes so fold
    sizes stay within one instance of each other).
    """
    if folds < 2:
        raise ConfigurationError("folds must be >= 2")
    if runs < 1:
        raise ConfigurationError("runs must be >= 1")
    if ds.n < folds:
        raise ConfigurationError(f"need at least {folds} instances for {folds} folds")
    root = np.random.SeedSequence(seed)
    children = root.spawn(runs)
    by_class = [np.nonzero(ds.y == c)[0] for c in range(ds.n_classes)]
    plans = []
    for run in range(runs):
        rng = np.random.default_rng(children[run])
        fold_lists: list[list[int]] = [[] for _ in range(folds)]
        rr = 0
        for members in by_class:
            perm = members[rng.permutation(members.size)]
            base = members.size // folds
            for f in range(folds):
                fold_lists[f].extend(perm[f * base:(f + 1) * base].tolist())
            for v in perm[base * folds:]:
                fold_lists[rr % folds].append(int(v))
                rr += 1
        plans.append([np.sort(np.asarray(f, dtype=np.int64)) for f in fold_lists])
    return FoldPlan(runs=runs, folds=folds, seed=seed, n=ds.n, test_indices=plans)
