import numpy as np
import pytest

from rdtcombine.data import Dataset, FeatureSpec


def _specs(kinds, ncats):
    specs = []
    for i, kind in enumerate(kinds):
        if kind == 0:
            specs.append(FeatureSpec(name=f"f{i}", kind="numeric"))
        else:
            specs.append(
                FeatureSpec(
                    name=f"f{i}",
                    kind="nominal",
                    categories=tuple(f"c{j}" for j in range(ncats[i])),
                )
            )
    return tuple(specs)


def build_dataset(X, y, kinds=None, ncats=None, name="synth"):
    """Assemble a Dataset from raw arrays with a generated schema."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int8)
    m = X.shape[1]
    if kinds is None:
        kinds = [0] * m
    if ncats is None:
        ncats = [
            int(np.nanmax(X[:, i])) + 1 if kinds[i] == 1 else 0 for i in range(m)
        ]
    return Dataset(
        name=name,
        features=_specs(kinds, ncats),
        X=X,
        y=y,
        pos_label="1",
        neg_label="0",
    )


@pytest.fixture
def dataset_factory():
    return build_dataset


@pytest.fixture
def numeric_dataset():
    """40 instances, 3 numeric features, both classes well represented."""
    rng = np.random.default_rng(1234)
    X = rng.normal(size=(40, 3))
    y = (X[:, 0] + 0.3 * rng.normal(size=40) > 0).astype(np.int8)
    y[:4] = [0, 1, 0, 1]  # both classes guaranteed
    return build_dataset(X, y)


@pytest.fixture
def mixed_dataset():
    """Numeric + nominal features with a few missing values."""
    rng = np.random.default_rng(99)
    n = 30
    num = rng.normal(size=n)
    nom = rng.integers(0, 3, size=n).astype(np.float64)
    X = np.column_stack([num, nom])
    X[3, 0] = np.nan
    X[7, 1] = np.nan
    y = ((num > 0) ^ (nom == 2)).astype(np.int8)
    y[:4] = [0, 1, 0, 1]
    return build_dataset(X, y, kinds=[0, 1], ncats=[0, 3])
