"""Cross-validation with training-error model selection, and the pairwise
comparison statistics used to summarize a results table."""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classifiers import KMEANS_MAX_ITER, accuracy, kmeans_per_class, one_nn
from .averaging import DBA_MAX_ITER
from .dataset import LabeledDataset
from .errors import ConfigError, DtwLvqError, InputError
from .lvq import METHODS, TrainConfig, train, training_error

SIGMA_GRID = (0.1, 0.5, 1.0, 5.0, 10.0, 25.0, 50.0)
ETA_GRID = (0.001, 0.0025, 0.005, 0.01, 0.025, 0.05, 0.1, 0.25, 0.5)

ALIASES = {
    "alvq": "asymmetric-lvq1",
    "slvq": "symmetric-lvq1",
    "glvq": "asymmetric-glvq",
    "1nn": "1-nn",
}
CLASSIFIERS = ("1-nn", "kmeans") + METHODS


def canonical_method(name: str) -> str:
    method = ALIASES.get(name, name)
    if method not in CLASSIFIERS:
        raise ConfigError(f"unknown method {name!r}; expected one of {CLASSIFIERS + tuple(ALIASES)}")
    return method


@dataclass
class FoldPlan:
    folds: np.ndarray
    n_folds: int
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.folds == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.folds != fold)


def make_folds(D: LabeledDataset, n_folds: int = 10, seed: int = 0) -> FoldPlan:
    """Seeded stratified partition of ``D`` into ``n_folds`` folds.

    Members of each class are shuffled and dealt round-robin, continuing the
    deal across classes so fold sizes stay balanced as well.
    """
    if n_folds < 2:
        raise ConfigError("need at least 2 folds")
    if n_folds > len(D):
        raise ConfigError(f"{n_folds} folds for {len(D)} examples")
    rng = np.random.default_rng(seed)
    folds = np.empty(len(D), dtype=np.int64)
    dealt = 0
    for label in D.classes:
        members = np.flatnonzero(D.labels == label)
        if len(members) < 2:
            raise InputError(f"class {label} has a single example; some training set would lack it")
        if len(members) < n_folds:
            warnings.warn(f"class {label} has {len(members)} < {n_folds} examples; "
                          "some test folds will miss it", stacklevel=2)
        members = rng.permutation(members)
        folds[members] = (dealt + np.arange(len(members))) % n_folds
        dealt += len(members)
    return FoldPlan(folds, n_folds, seed)


@dataclass
class HyperGrid:
    sigma: tuple[float, ...] = SIGMA_GRID
    eta: tuple[float, ...] = ETA_GRID

    def __post_init__(self):
        self.sigma = tuple(float(s) for s in self.sigma)
        self.eta = tuple(float(e) for e in self.eta)
        for name, values in (("sigma", self.sigma), ("eta", self.eta)):
            if not values or min(values) <= 0:
                raise ConfigError(f"{name} grid must be nonempty and positive")

    def values_for(self, method: str) -> tuple[float, ...]:
        if method == "asymmetric-glvq":
            return self.sigma
        if method in ("asymmetric-lvq1", "symmetric-lvq1"):
            return self.eta
        return ()


@dataclass
class FoldResult:
    fold: int
    accuracy: float
    train_error: float
    selected: float | None = None
    candidates: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "fold": self.fold,
            "accuracy": self.accuracy,
            "train_error": self.train_error,
            "selected": self.selected,
            "candidates": self.candidates,
        }


def select_and_test(D: LabeledDataset, plan: FoldPlan, fold: int, method: str,
                    grid: HyperGrid | None = None, *, k: int = 1, max_epochs: int = 1000,
                    seed: int = 0, dba_max_iter: int = DBA_MAX_ITER,
                    kmeans_max_iter: int = KMEANS_MAX_ITER, init=None,
                    track: bool = True) -> FoldResult:
    """Train ``method`` on every grid value on the training part of ``fold``,
    keep the model with the lowest training error (ties: smaller value, then
    grid order) and report its accuracy on the held-out fold.

    LVQ variants start from the per-class k-means centroids of the training
    part, or from ``init`` when given (it must come from the same training
    part). ``track=False`` skips the per-epoch training curves.
    """
    method = canonical_method(method)
    grid = grid or HyperGrid()
    if not 0 <= fold < plan.n_folds:
        raise ConfigError(f"fold {fold} out of range for {plan.n_folds} folds")
    train_set, test_set = D[plan.train_indices(fold)], D[plan.test_indices(fold)]
    if len(test_set) == 0:
        raise InputError(f"fold {fold} is empty")
    missing = set(D.classes.tolist()) - set(train_set.classes.tolist())
    if missing:
        raise InputError(f"training set of fold {fold} lacks classes {sorted(missing)}")

    if method == "1-nn":
        cb = one_nn(train_set)
        return FoldResult(fold, accuracy(cb, test_set), 0.0)

    if init is None:
        init = kmeans_per_class(train_set, k=k, max_iter=kmeans_max_iter, seed=seed,
                                dba_max_iter=dba_max_iter)
    if method == "kmeans":
        return FoldResult(fold, accuracy(init, test_set), training_error(init, train_set))

    best = None
    candidates = []
    for order, value in enumerate(grid.values_for(method)):
        config = TrainConfig(method=method, max_epochs=max_epochs, seed=seed,
                             eta0=value, sigma0=value, track=track)
        cb, report = train(train_set, init, config)
        err = report.error_rate[-1] if report.error_rate else training_error(cb, train_set)
        candidates.append({"value": value, "train_error": err, **report.to_dict()})
        key = (err, value, order)
        if best is None or key < best[0]:
            best = (key, cb)
    (err, value, _), cb = best
    return FoldResult(fold, accuracy(cb, test_set), err, value, candidates)


@dataclass
class ResultsTable:
    """Accuracies in percent, one row per dataset, one column per classifier."""

    datasets: list[str]
    classifiers: list[str]
    acc: np.ndarray

    def __post_init__(self):
        self.acc = np.asarray(self.acc, dtype=np.float64).reshape(len(self.datasets), len(self.classifiers))
        if np.isnan(self.acc).any():
            raise InputError("results table contains NaN")
        if (self.acc < 0).any() or (self.acc > 100).any():
            raise InputError("accuracies must lie in [0, 100]")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["dataset", *self.classifiers])
        for name, row in zip(self.datasets, self.acc):
            writer.writerow([name, *(repr(float(v)) for v in row)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ResultsTable":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or not rows[0] or rows[0][0] != "dataset":
            raise InputError("results CSV must start with a 'dataset,...' header")
        header = rows[0][1:]
        datasets, acc = [], []
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != len(header) + 1:
                raise InputError(f"line {lineno}: expected {len(header) + 1} fields, got {len(row)}")
            datasets.append(row[0])
            acc.append([float(v) for v in row[1:]])
        return cls(datasets, header, np.array(acc))

    @classmethod
    def read(cls, path) -> "ResultsTable":
        return cls.from_csv(Path(path).read_text(encoding="utf-8"))

    def write(self, path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8", newline="\n")


def merge_tables(tables: list[ResultsTable]) -> ResultsTable:
    """Concatenate classifier columns of tables covering the same datasets."""
    if not tables:
        raise InputError("nothing to merge")
    ref = tables[0]
    for t in tables[1:]:
        if set(t.datasets) != set(ref.datasets):
            only_ref = sorted(set(ref.datasets) - set(t.datasets))
            only_t = sorted(set(t.datasets) - set(ref.datasets))
            raise InputError(f"dataset sets differ: missing {only_ref}, unexpected {only_t}")
    classifiers = [c for t in tables for c in t.classifiers]
    if len(set(classifiers)) != len(classifiers):
        raise InputError("duplicate classifier columns across tables")
    acc = np.hstack([t.acc[[t.datasets.index(d) for d in ref.datasets]] for t in tables])
    return ResultsTable(list(ref.datasets), classifiers, acc)


def competition_ranks(values: np.ndarray) -> np.ndarray:
    """Rank 1 for the highest value; tied values share the smallest rank of
    their block and the following ranks are skipped."""
    values = np.asarray(values, dtype=np.float64)
    return np.array([1 + int(np.count_nonzero(values > v)) for v in values])


@dataclass
class RankSummary:
    ranks: np.ndarray
    counts: np.ndarray
    average: np.ndarray
    std: np.ndarray
    std_population: np.ndarray


def rank_table(T: ResultsTable) -> RankSummary:
    """Per-dataset competition ranks and their per-classifier distribution.

    ``std`` is the sample standard deviation of each classifier's ranks;
    ``std_population`` divides by the number of datasets instead.
    """
    ranks = np.array([competition_ranks(row) for row in T.acc])
    n = len(T.classifiers)
    counts = np.array([[int(np.count_nonzero(ranks[:, c] == r)) for r in range(1, n + 1)]
                       for c in range(n)])
    ddof = 1 if len(T.datasets) > 1 else 0
    return RankSummary(ranks, counts, ranks.mean(axis=0), ranks.std(axis=0, ddof=ddof),
                       ranks.std(axis=0))


def winning_percentage(T: ResultsTable) -> np.ndarray:
    """w[i, j]: percentage of datasets where classifier i strictly beats j."""
    acc = T.acc
    wins = (acc[:, :, None] > acc[:, None, :]).sum(axis=0)
    return 100.0 * wins / len(T.datasets)


def tie_percentage(T: ResultsTable) -> np.ndarray:
    w = winning_percentage(T)
    return 100.0 - w - w.T


def mean_percentage_difference(T: ResultsTable) -> np.ndarray:
    """a[i, j] = 100 * 2/|D| * sum_d (acc_i - acc_j) / (acc_i + acc_j)."""
    acc = T.acc
    n = len(T.classifiers)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            denom = acc[:, i] + acc[:, j]
            if (denom == 0).any():
                d = T.datasets[int(np.argmax(denom == 0))]
                raise DtwLvqError(f"dataset {d!r}: {T.classifiers[i]} and {T.classifiers[j]} "
                                  "both have zero accuracy")
            out[i, j] = 100.0 * 2.0 / len(T.datasets) * np.sum((acc[:, i] - acc[:, j]) / denom)
    return out


def comparison_report(T: ResultsTable) -> dict:
    summary = rank_table(T)
    return {
        "datasets": list(T.datasets),
        "classifiers": list(T.classifiers),
        "ranks": summary.ranks.tolist(),
        "rank_counts": summary.counts.tolist(),
        "avg_rank": summary.average.tolist(),
        "std_rank": summary.std.tolist(),
        "std_rank_population": summary.std_population.tolist(),
        "winning": winning_percentage(T).tolist(),
        "mean_pct_diff": mean_percentage_difference(T).tolist(),
    }
