"""Dataset loading, schema handling, and the repeated two-fold splitter.

A loaded dataset is column-typed (numeric or nominal) and stored as a dense
float64 matrix: numeric columns keep their parsed values, nominal columns
hold category codes (index into the sorted category list), and missing
entries are NaN.  Labels are binary and mapped to 1 (positive) / 0
(negative) at load time.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from rdtcombine._splitmix import Stream, derive

#: cell values treated as missing, compared case-insensitively
MISSING_TOKENS = frozenset({"", "?", "na", "n/a", "nan", "null"})

_SALT_SPLIT = 0x5B17


class DatasetError(ValueError):
    """Raised for malformed input files or invalid dataset operations."""


@dataclass(frozen=True)
class FeatureSpec:
    """Schema of one feature column."""

    name: str
    kind: str  # "numeric" | "nominal"
    categories: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("numeric", "nominal"):
            raise DatasetError(f"unknown feature kind {self.kind!r}")
        if self.kind == "nominal":
            if not self.categories:
                raise DatasetError(f"nominal feature {self.name!r} has no categories")
            if len(set(self.categories)) != len(self.categories):
                raise DatasetError(f"duplicate categories in feature {self.name!r}")
        elif self.categories is not None:
            raise DatasetError(f"numeric feature {self.name!r} cannot list categories")


@dataclass(frozen=True)
class Instance:
    """One row: encoded feature values plus its binary label (1/0)."""

    values: np.ndarray
    label: int


@dataclass(frozen=True)
class Dataset:
    """An encoded binary-classification dataset."""

    name: str
    features: tuple[FeatureSpec, ...]
    X: np.ndarray  # (n, m) float64; nominal columns hold category codes
    y: np.ndarray  # (n,) int8; 1 positive, 0 negative
    pos_label: str
    neg_label: str

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[1] != len(self.features):
            raise DatasetError("feature matrix does not match schema")
        if self.X.shape[0] != self.y.shape[0]:
            raise DatasetError("label vector length does not match instances")
        if self.X.shape[0] < 1:
            raise DatasetError(f"dataset {self.name!r} has no instances")
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise DatasetError("duplicate feature names")

    @property
    def n_instances(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def n_pos(self) -> int:
        return int(self.y.sum())

    @property
    def n_neg(self) -> int:
        return self.n_instances - self.n_pos

    @property
    def class_ratio(self) -> float:
        """Fraction of positive instances."""
        return self.n_pos / self.n_instances

    def feature_kinds(self) -> np.ndarray:
        """0 for numeric columns, 1 for nominal ones."""
        return np.array(
            [0 if f.kind == "numeric" else 1 for f in self.features], dtype=np.int8
        )

    def category_counts(self) -> np.ndarray:
        """Number of categories per column (0 for numeric)."""
        return np.array(
            [len(f.categories) if f.categories else 0 for f in self.features],
            dtype=np.int64,
        )

    def instance(self, i: int) -> Instance:
        return Instance(values=self.X[i].copy(), label=int(self.y[i]))

    def subset(self, indices: np.ndarray, name: str | None = None) -> "Dataset":
        """A new dataset restricted to ``indices`` (same schema and labels)."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            name=name if name is not None else self.name,
            features=self.features,
            X=self.X[idx],
            y=self.y[idx],
            pos_label=self.pos_label,
            neg_label=self.neg_label,
        )


@dataclass(frozen=True)
class SplitPlan:
    """Fold assignments for repeated two-fold cross validation."""

    repetitions: int
    folds: int
    seed: int
    assignments: np.ndarray  # (repetitions, n) int8 fold index per instance

    def __post_init__(self):
        if self.folds != 2:
            raise DatasetError("only two-fold splits are supported")
        if self.assignments.shape[0] != self.repetitions:
            raise DatasetError("assignment matrix does not match repetitions")

    def train_test(self, repetition: int, fold: int) -> tuple[np.ndarray, np.ndarray]:
        """Indices for the training and test halves of one (rep, fold) cell.

        ``fold`` selects which half serves as the test set.
        """
        assign = self.assignments[repetition]
        test = np.flatnonzero(assign == fold)
        train = np.flatnonzero(assign != fold)
        return train, test


def _is_missing(token: str) -> bool:
    return token.strip().lower() in MISSING_TOKENS


def _parse_numeric(token: str) -> float | None:
    try:
        return float(token)
    except ValueError:
        return None


def load_csv(
    path: str | Path,
    *,
    label: str | int | None = None,
    positive_label: str | None = None,
    nominal: tuple[str | int, ...] = (),
    name: str | None = None,
) -> Dataset:
    """Load a comma-separated file into a :class:`Dataset`.

    The first row is the header.  Columns whose every non-missing value
    parses as a number become numeric; all others (plus any listed in
    ``nominal``) become nominal with lexicographically sorted categories.
    The label column (``label`` by name or index, default: last column) is
    mapped to 1/0 using ``positive_label``; when omitted, the
    lexicographically greater of the two distinct label values is positive.
    """
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path.name}: empty file") from None
        n_cols = len(header)
        rows: list[list[str]] = []
        for row in reader:
            if len(row) != n_cols:
                raise DatasetError(
                    f"{path.name}: line {reader.line_num}: expected {n_cols} "
                    f"fields, got {len(row)}"
                )
            rows.append(row)
    if not rows:
        raise DatasetError(f"{path.name}: no data rows")
    if len(rows) < 2:
        raise DatasetError(f"{path.name}: needs at least 2 data rows")

    if label is None:
        label_idx = n_cols - 1
    elif isinstance(label, int):
        label_idx = label if label >= 0 else n_cols + label
    else:
        try:
            label_idx = header.index(label)
        except ValueError:
            raise DatasetError(f"{path.name}: no column named {label!r}") from None
    if not 0 <= label_idx < n_cols:
        raise DatasetError(f"{path.name}: label column {label} out of range")

    label_values = [row[label_idx].strip() for row in rows]
    for i, v in enumerate(label_values):
        if _is_missing(v):
            raise DatasetError(f"{path.name}: missing label in data row {i + 1}")
    distinct = sorted(set(label_values))
    if len(distinct) > 2:
        raise DatasetError(
            f"{path.name}: label column has {len(distinct)} distinct values "
            f"(expected 2): {distinct[:5]}"
        )
    if positive_label is None:
        pos = distinct[-1]
    else:
        pos = positive_label
        if pos not in distinct and len(distinct) == 2:
            raise DatasetError(
                f"{path.name}: positive label {pos!r} not among label values {distinct}"
            )
    negatives = [v for v in distinct if v != pos]
    neg = negatives[0] if negatives else ""
    y = np.array([1 if v == pos else 0 for v in label_values], dtype=np.int8)

    forced_nominal = set()
    for sel in nominal:
        if isinstance(sel, int):
            forced_nominal.add(sel if sel >= 0 else n_cols + sel)
        else:
            try:
                forced_nominal.add(header.index(sel))
            except ValueError:
                raise DatasetError(
                    f"{path.name}: nominal override {sel!r} is not a column"
                ) from None

    feature_cols = [c for c in range(n_cols) if c != label_idx]
    specs: list[FeatureSpec] = []
    n = len(rows)
    X = np.empty((n, len(feature_cols)), dtype=np.float64)
    for out_col, c in enumerate(feature_cols):
        column = [row[c].strip() for row in rows]
        missing = [_is_missing(v) for v in column]
        present = [v for v, miss in zip(column, missing) if not miss]
        numeric_vals = None
        if c not in forced_nominal:
            parsed = [_parse_numeric(v) for v in present]
            if all(p is not None for p in parsed):
                numeric_vals = parsed
        if numeric_vals is not None and present:
            specs.append(FeatureSpec(name=header[c], kind="numeric"))
            it = iter(numeric_vals)
            X[:, out_col] = [np.nan if miss else next(it) for miss in missing]
        else:
            cats = tuple(sorted(set(present)))
            if not cats:
                raise DatasetError(
                    f"{path.name}: column {header[c]!r} has no usable values"
                )
            specs.append(FeatureSpec(name=header[c], kind="nominal", categories=cats))
            code = {v: i for i, v in enumerate(cats)}
            X[:, out_col] = [
                np.nan if miss else code[v] for v, miss in zip(column, missing)
            ]

    return Dataset(
        name=name if name is not None else path.stem,
        features=tuple(specs),
        X=X,
        y=y,
        pos_label=pos,
        neg_label=neg,
    )


def make_5x2(dataset: Dataset, seed: int, repetitions: int = 5) -> SplitPlan:
    """Plan ``repetitions`` independent shuffled two-fold splits.

    Each repetition shuffles all instances and cuts them into two halves
    whose sizes differ by at most one.  Deterministic in (dataset size,
    seed); the same inputs always yield the same assignments.
    """
    n = dataset.n_instances
    if dataset.n_pos < 2 or dataset.n_neg < 2:
        raise DatasetError(
            f"dataset {dataset.name!r} needs at least 2 instances of each class "
            f"(has {dataset.n_pos} positive / {dataset.n_neg} negative)"
        )
    assignments = np.empty((repetitions, n), dtype=np.int8)
    first_half = (n + 1) // 2
    for rep in range(repetitions):
        stream = Stream(derive(seed, _SALT_SPLIT, rep))
        perm = np.arange(n, dtype=np.int64)
        stream.shuffle(perm)
        fold = np.empty(n, dtype=np.int8)
        fold[perm[:first_half]] = 0
        fold[perm[first_half:]] = 1
        assignments[rep] = fold
    return SplitPlan(
        repetitions=repetitions, folds=2, seed=seed, assignments=assignments
    )


def bundled_path(name: str) -> Path:
    """Filesystem path of a dataset CSV shipped with the package."""
    candidate = resources.files("rdtcombine").joinpath("datasets", f"{name}.csv")
    with resources.as_file(candidate) as p:
        if not p.exists():
            available = sorted(
                f.name[: -len(".csv")]
                for f in resources.files("rdtcombine").joinpath("datasets").iterdir()
                if f.name.endswith(".csv")
            )
            raise DatasetError(f"no bundled dataset {name!r}; available: {available}")
        return Path(p)


def load_bundled(name: str) -> Dataset:
    """Load one of the datasets shipped with the package."""
    return load_csv(bundled_path(name), name=name)
