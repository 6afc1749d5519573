"""Nearest-prototype classification and per-class k-means prototypes."""

from __future__ import annotations

import numpy as np

from .averaging import DBA_MAX_ITER, dba_mean
from .dataset import LabeledDataset
from .dtw import _squared_dtw, as_series
from .errors import InputError
from .lvq import Codebook, LabeledPrototype, _distortions, nearest_prototype

KMEANS_MAX_ITER = 50


def classify(cb: Codebook, x) -> int:
    return cb.prototypes[nearest_prototype(cb, x)].label


def predict(cb: Codebook, D: LabeledDataset) -> np.ndarray:
    cb.validate()
    series, labels = cb.series, cb.labels
    return np.array([labels[int(np.argmin(_distortions(series, x)))] for x in D.series])


def accuracy(cb: Codebook, D: LabeledDataset) -> float:
    """Fraction of ``D`` that ``cb`` labels correctly."""
    if len(D) == 0:
        raise InputError("accuracy of an empty dataset")
    return float(np.mean(predict(cb, D) == D.labels))


def one_nn(D: LabeledDataset) -> Codebook:
    """Codebook of the 1-NN classifier: the training set itself."""
    return Codebook.from_series(D.series, D.labels)


def _dist_matrix(members, centroids) -> np.ndarray:
    return np.array([[_squared_dtw(c, x) for c in centroids] for x in members])


def kmeans(members: list[np.ndarray], k: int, rng: np.random.Generator,
           max_iter: int = KMEANS_MAX_ITER, dba_max_iter: int = DBA_MAX_ITER,
           trace: list | None = None) -> list[np.ndarray]:
    """Lloyd iteration in DTW space with DBA centroids.

    Centroids start at ``k`` distinct random members and keep their length.
    An empty cluster is reseeded with the member farthest from its own
    centroid. ``trace`` receives the clustering objective after every round.
    """
    members = [as_series(x) for x in members]
    if len(members) < k:
        raise InputError(f"cannot form {k} clusters from {len(members)} series")
    if k == 1:
        return [dba_mean(members, max_iter=dba_max_iter)]
    centroids = [members[i].copy() for i in rng.choice(len(members), size=k, replace=False)]
    assign = None
    for _ in range(max_iter):
        dist = _dist_matrix(members, centroids)
        new_assign = np.argmin(dist, axis=1)
        for c in range(k):
            if not np.any(new_assign == c):
                own = dist[np.arange(len(members)), new_assign]
                # only take members from clusters that keep at least one other member
                sizes = np.bincount(new_assign, minlength=k)
                donors = np.flatnonzero(sizes[new_assign] > 1)
                far = donors[np.argmax(own[donors])]
                new_assign[far] = c
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        centroids = [
            dba_mean([members[i] for i in np.flatnonzero(assign == c)], init=centroids[c],
                     max_iter=dba_max_iter)
            for c in range(k)
        ]
        if trace is not None:
            trace.append(float(sum(_squared_dtw(centroids[c], members[i])
                                   for i, c in enumerate(assign))))
    return centroids


def kmeans_per_class(D: LabeledDataset, k: int = 1, max_iter: int = KMEANS_MAX_ITER, seed: int = 0,
                     dba_max_iter: int = DBA_MAX_ITER) -> Codebook:
    """``k`` DBA centroids per class, clustered independently per class."""
    if k < 1:
        raise InputError("k must be >= 1")
    protos = []
    for label in D.classes:
        members = D.of_class(int(label))
        if len(members) < k:
            raise InputError(f"class {label} has {len(members)} series, fewer than k={k}")
        rng = np.random.default_rng([seed, int(label)])
        for c in kmeans(members, k, rng, max_iter=max_iter, dba_max_iter=dba_max_iter):
            protos.append(LabeledPrototype(c, int(label)))
    return Codebook(protos)
