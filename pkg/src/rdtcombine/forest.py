"""Random decision tree ensembles: construction and leaf routing.

Trees are built by drawing tests at random: a feature is picked uniformly
from the available set (nominal features are excluded once used on the
current path, numeric features stay available), and numeric thresholds copy
the feature value of a uniformly drawn training instance at the node.  A
node becomes a leaf when its instance count is at most ``min_leaf``, when no
test is available, when ``retries`` successive random draws fail to separate
its instances, or at ``max_depth``.  Every node stores its class counts, so
routing can fall back to the deepest visited node if a branch holds no
training instances (unseen nominal categories).

Missing values: during construction they follow the child that received
more (non-missing) training instances (ties go to the first child); at
prediction time they follow the stored per-node missing direction, which is
consistent with that rule.

Trees live in flat arrays (one slab per tree) shared by the numba and numpy
backends; see :mod:`rdtcombine.backend`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from rdtcombine import backend as _backend
from rdtcombine._splitmix import derive
from rdtcombine.data import Dataset

#: random test draws attempted before a node gives up and becomes a leaf
SPLIT_RETRIES = 10

_SALT_TREE = 0x7EE5
_MODEL_FORMAT = "rdtcombine-model/1"

KIND_LEAF = 0
KIND_NUMERIC = 1
KIND_NOMINAL = 2


@dataclass(frozen=True)
class LeafStats:
    """Class counts collected by one node: positives and negatives."""

    pos: int
    neg: int

    def __post_init__(self):
        if self.pos < 0 or self.neg < 0:
            raise ValueError("leaf counts must be nonnegative")

    @property
    def n(self) -> int:
        return self.pos + self.neg


@dataclass(frozen=True)
class TreeNodeView:
    """Read-only view of one tree node, for inspection and tests."""

    kind: int
    feature: int
    threshold: float
    counts: LeafStats
    children: tuple[int, ...]  # local node ids, -1 for empty branches
    miss_child: int
    parent: int

    @property
    def is_leaf(self) -> bool:
        return self.kind == KIND_LEAF


@dataclass(frozen=True)
class EnsembleModel:
    """K random trees over a fixed schema, stored as flat array slabs."""

    k: int
    min_leaf: int
    seed: int
    max_depth: int  # -1 means unlimited
    prior_pos: float
    n_features: int
    feature_kinds: np.ndarray  # (m,) int8: 0 numeric, 1 nominal
    category_counts: np.ndarray  # (m,) int64: 0 for numeric
    tree_offsets: np.ndarray  # (k+1,) int64 into the node arrays
    child_offsets: np.ndarray  # (k+1,) int64 into the children array
    node_kind: np.ndarray
    node_feature: np.ndarray
    node_threshold: np.ndarray
    node_pos: np.ndarray
    node_neg: np.ndarray
    node_child_base: np.ndarray
    node_n_children: np.ndarray
    node_miss_child: np.ndarray
    node_parent: np.ndarray
    children: np.ndarray

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("ensemble needs at least one tree")
        if not 0.0 <= self.prior_pos <= 1.0:
            raise ValueError("prior_pos must be a fraction")

    @property
    def n_nodes(self) -> int:
        return int(self.tree_offsets[-1])

    def tree(self, t: int) -> "Tree":
        if not 0 <= t < self.k:
            raise IndexError(f"tree index {t} outside 0..{self.k - 1}")
        return Tree(model=self, index=t)


@dataclass(frozen=True)
class Tree:
    """View of one tree inside an :class:`EnsembleModel`."""

    model: EnsembleModel
    index: int

    @property
    def n_nodes(self) -> int:
        off = self.model.tree_offsets
        return int(off[self.index + 1] - off[self.index])

    def node(self, local_id: int) -> TreeNodeView:
        if not 0 <= local_id < self.n_nodes:
            raise IndexError(f"node {local_id} outside this tree")
        m = self.model
        g = int(m.tree_offsets[self.index]) + local_id
        cb = int(m.child_offsets[self.index])
        base = int(m.node_child_base[g])
        n_ch = int(m.node_n_children[g])
        kids = (
            tuple(int(c) for c in m.children[cb + base : cb + base + n_ch])
            if n_ch
            else ()
        )
        return TreeNodeView(
            kind=int(m.node_kind[g]),
            feature=int(m.node_feature[g]),
            threshold=float(m.node_threshold[g]),
            counts=LeafStats(pos=int(m.node_pos[g]), neg=int(m.node_neg[g])),
            children=kids,
            miss_child=int(m.node_miss_child[g]),
            parent=int(m.node_parent[g]),
        )

    def nodes(self):
        for i in range(self.n_nodes):
            yield self.node(i)


def _schema_of(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    return dataset.feature_kinds(), dataset.category_counts()


def _assemble(
    dataset: Dataset,
    k: int,
    min_leaf: int,
    seed: int,
    max_depth: int,
    per_tree: list[tuple],
) -> EnsembleModel:
    kinds, ncats = _schema_of(dataset)
    tree_offsets = np.zeros(k + 1, dtype=np.int64)
    child_offsets = np.zeros(k + 1, dtype=np.int64)
    for t, arrays in enumerate(per_tree):
        tree_offsets[t + 1] = tree_offsets[t] + arrays[0].shape[0]
        child_offsets[t + 1] = child_offsets[t] + arrays[9].shape[0]
    cat = lambda i: np.concatenate([a[i] for a in per_tree])
    return EnsembleModel(
        k=k,
        min_leaf=min_leaf,
        seed=seed,
        max_depth=max_depth,
        prior_pos=dataset.n_pos / dataset.n_instances,
        n_features=dataset.n_features,
        feature_kinds=kinds,
        category_counts=ncats,
        tree_offsets=tree_offsets,
        child_offsets=child_offsets,
        node_kind=cat(0),
        node_feature=cat(1),
        node_threshold=cat(2),
        node_pos=cat(3),
        node_neg=cat(4),
        node_child_base=cat(5),
        node_n_children=cat(6),
        node_miss_child=cat(7),
        node_parent=cat(8),
        children=cat(9),
    )


def build_ensemble(
    train: Dataset,
    k: int,
    min_leaf: int,
    seed: int,
    max_depth: int | None = None,
    backend: str | None = None,
) -> EnsembleModel:
    """Build ``k`` random trees on ``train``.

    Tree ``i`` draws its randomness from a seed derived purely from
    ``(seed, i)``, so the result does not depend on build order and single
    trees can be rebuilt in isolation.  The training data must contain both
    classes (the per-leaf scorers and the prior need a two-class ratio).
    """
    if train.n_pos < 1 or train.n_neg < 1:
        raise ValueError("training data must contain both classes")
    return _build(train, k, min_leaf, seed, max_depth, backend)


def _build(
    train: Dataset,
    k: int,
    min_leaf: int,
    seed: int,
    max_depth: int | None,
    backend: str | None,
) -> EnsembleModel:
    if k < 1:
        raise ValueError("k must be >= 1")
    if min_leaf < 1:
        raise ValueError("min_leaf must be >= 1")
    if train.n_instances == 0:
        raise ValueError("training subset is empty")
    kern = _backend.kernels(backend)
    kinds, ncats = _schema_of(train)
    X = np.ascontiguousarray(train.X, dtype=np.float64)
    y = np.ascontiguousarray(train.y, dtype=np.int8)
    depth = -1 if max_depth is None else int(max_depth)
    if max_depth is not None and max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    per_tree = [
        kern.build_tree_arrays(
            X, y, kinds, ncats, min_leaf, depth, derive(seed, _SALT_TREE, t), SPLIT_RETRIES
        )
        for t in range(k)
    ]
    return _assemble(train, k, min_leaf, seed, depth, per_tree)


def build_tree(
    train: Dataset,
    min_leaf: int,
    seed: int,
    max_depth: int | None = None,
    backend: str | None = None,
) -> Tree:
    """Build a single random tree (an ensemble of size one).

    Unlike :func:`build_ensemble`, single-class training data is accepted:
    the tree simply collects one-sided counts.
    """
    model = _build(train, 1, min_leaf, seed, max_depth, backend)
    return model.tree(0)


def _check_schema(model: EnsembleModel, X: np.ndarray) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(
            f"instance arity {X.shape[-1] if X.ndim else '?'} does not match "
            f"model schema ({model.n_features} features)"
        )
    nominal = model.feature_kinds == 1
    if np.any(nominal):
        codes = X[:, nominal]
        limits = model.category_counts[nominal].astype(np.float64)
        present = ~np.isnan(codes)
        bad = present & ((codes < 0) | (codes >= limits) | (codes != np.floor(codes)))
        if np.any(bad):
            raise ValueError("nominal feature codes outside the model schema")
    return X


def route_all(
    model: EnsembleModel, X: np.ndarray, backend: str | None = None
) -> np.ndarray:
    """Route every row of ``X`` through every tree.

    Returns an (n, k, 2) int64 array of per-tree leaf counts.  Every
    returned pair has at least one observation: walks that hit an empty
    branch settle on the last visited node.
    """
    X = _check_schema(model, X)
    kern = _backend.kernels(backend)
    return kern.route_all(
        X,
        model.node_kind,
        model.node_feature,
        model.node_threshold,
        model.node_pos,
        model.node_neg,
        model.node_child_base,
        model.node_n_children,
        model.node_miss_child,
        model.children,
        model.tree_offsets,
        model.child_offsets,
    )


def route(
    model: EnsembleModel, values: np.ndarray, backend: str | None = None
) -> np.ndarray:
    """Route one instance; returns the (k, 2) per-tree leaf counts."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1:
        raise ValueError("route expects a single instance value vector")
    return route_all(model, values[None, :], backend=backend)[0]


def reorder_trees(model: EnsembleModel, order) -> EnsembleModel:
    """A new model whose trees appear in ``order`` (a permutation)."""
    order = list(order)
    if sorted(order) != list(range(model.k)):
        raise ValueError("order must be a permutation of 0..k-1")
    per_tree = []
    for t in order:
        ns, ne = int(model.tree_offsets[t]), int(model.tree_offsets[t + 1])
        cs, ce = int(model.child_offsets[t]), int(model.child_offsets[t + 1])
        per_tree.append(
            (
                model.node_kind[ns:ne],
                model.node_feature[ns:ne],
                model.node_threshold[ns:ne],
                model.node_pos[ns:ne],
                model.node_neg[ns:ne],
                model.node_child_base[ns:ne],
                model.node_n_children[ns:ne],
                model.node_miss_child[ns:ne],
                model.node_parent[ns:ne],
                model.children[cs:ce],
            )
        )
    tree_offsets = np.zeros(model.k + 1, dtype=np.int64)
    child_offsets = np.zeros(model.k + 1, dtype=np.int64)
    for t, arrays in enumerate(per_tree):
        tree_offsets[t + 1] = tree_offsets[t] + arrays[0].shape[0]
        child_offsets[t + 1] = child_offsets[t] + arrays[9].shape[0]
    cat = lambda i: np.concatenate([a[i] for a in per_tree])
    return EnsembleModel(
        k=model.k,
        min_leaf=model.min_leaf,
        seed=model.seed,
        max_depth=model.max_depth,
        prior_pos=model.prior_pos,
        n_features=model.n_features,
        feature_kinds=model.feature_kinds,
        category_counts=model.category_counts,
        tree_offsets=tree_offsets,
        child_offsets=child_offsets,
        node_kind=cat(0),
        node_feature=cat(1),
        node_threshold=cat(2),
        node_pos=cat(3),
        node_neg=cat(4),
        node_child_base=cat(5),
        node_n_children=cat(6),
        node_miss_child=cat(7),
        node_parent=cat(8),
        children=cat(9),
    )


def save_model(model: EnsembleModel, path: str | Path) -> None:
    """Serialize a model to a self-describing, versioned JSON file."""
    doc = {
        "format": _MODEL_FORMAT,
        "k": model.k,
        "min_leaf": model.min_leaf,
        "seed": model.seed,
        "max_depth": model.max_depth,
        "prior_pos": model.prior_pos,
        "n_features": model.n_features,
        "feature_kinds": model.feature_kinds.tolist(),
        "category_counts": model.category_counts.tolist(),
        "tree_offsets": model.tree_offsets.tolist(),
        "child_offsets": model.child_offsets.tolist(),
        "node_kind": model.node_kind.tolist(),
        "node_feature": model.node_feature.tolist(),
        "node_threshold": [repr(float(v)) for v in model.node_threshold],
        "node_pos": model.node_pos.tolist(),
        "node_neg": model.node_neg.tolist(),
        "node_child_base": model.node_child_base.tolist(),
        "node_n_children": model.node_n_children.tolist(),
        "node_miss_child": model.node_miss_child.tolist(),
        "node_parent": model.node_parent.tolist(),
        "children": model.children.tolist(),
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_model(path: str | Path) -> EnsembleModel:
    """Load a model saved by :func:`save_model`."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != _MODEL_FORMAT:
        raise ValueError(
            f"unsupported model format {doc.get('format')!r}; expected {_MODEL_FORMAT}"
        )
    return EnsembleModel(
        k=doc["k"],
        min_leaf=doc["min_leaf"],
        seed=doc["seed"],
        max_depth=doc["max_depth"],
        prior_pos=doc["prior_pos"],
        n_features=doc["n_features"],
        feature_kinds=np.array(doc["feature_kinds"], dtype=np.int8),
        category_counts=np.array(doc["category_counts"], dtype=np.int64),
        tree_offsets=np.array(doc["tree_offsets"], dtype=np.int64),
        child_offsets=np.array(doc["child_offsets"], dtype=np.int64),
        node_kind=np.array(doc["node_kind"], dtype=np.int8),
        node_feature=np.array(doc["node_feature"], dtype=np.int32),
        node_threshold=np.array(
            [float(v) for v in doc["node_threshold"]], dtype=np.float64
        ),
        node_pos=np.array(doc["node_pos"], dtype=np.int64),
        node_neg=np.array(doc["node_neg"], dtype=np.int64),
        node_child_base=np.array(doc["node_child_base"], dtype=np.int64),
        node_n_children=np.array(doc["node_n_children"], dtype=np.int32),
        node_miss_child=np.array(doc["node_miss_child"], dtype=np.int64),
        node_parent=np.array(doc["node_parent"], dtype=np.int64),
        children=np.array(doc["children"], dtype=np.int64),
    )
