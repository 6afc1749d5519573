"""Learning vector quantization in DTW spaces.

Prototypes are updated with the asymmetric rule

    p <- p - eta * f(p, x) * (V p - W x)

where V, W are the valence and warping matrices of an optimal warping path
between p and x, and f is a class-compatible force function (LVQ1 or GLVQ).
The symmetric Somervuo-Kohonen LVQ1 rule is provided as a baseline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.special import expit

from .averaging import resample, symmetric_weighted_average
from .dataset import LabeledDataset
from .dtw import _accumulate, _backtrace, _pair, _squared_dtw, as_series
from .errors import ConfigError, InputError, ModelError

METHODS = ("asymmetric-lvq1", "symmetric-lvq1", "asymmetric-glvq")
CODEBOOK_VERSION = 1


@dataclass
class LabeledPrototype:
    series: np.ndarray
    label: int

    def __post_init__(self):
        self.series = as_series(self.series)
        self.label = int(self.label)


@dataclass
class Codebook:
    prototypes: list[LabeledPrototype] = field(default_factory=list)

    def __len__(self):
        return len(self.prototypes)

    def __iter__(self):
        return iter(self.prototypes)

    @classmethod
    def from_series(cls, series, labels) -> "Codebook":
        return cls([LabeledPrototype(s, z) for s, z in zip(series, labels)])

    @property
    def labels(self) -> np.ndarray:
        return np.array([p.label for p in self.prototypes], dtype=np.int64)

    @property
    def series(self) -> list[np.ndarray]:
        return [p.series for p in self.prototypes]

    def copy(self) -> "Codebook":
        return Codebook([LabeledPrototype(p.series.copy(), p.label) for p in self.prototypes])

    def validate(self, classes=None) -> None:
        """Raise ModelError unless every class in ``classes`` has a prototype."""
        if not self.prototypes:
            raise ModelError("codebook is empty")
        if len({p.series.shape[1] for p in self.prototypes}) != 1:
            raise ModelError("prototypes have mixed feature dimensions")
        if classes is not None:
            missing = sorted(set(int(c) for c in classes) - set(self.labels.tolist()))
            if missing:
                raise ModelError(f"no prototype for classes {missing}")

    def to_dict(self) -> dict:
        return {
            "version": CODEBOOK_VERSION,
            "classes": sorted(set(self.labels.tolist())),
            "prototypes": [
                {
                    "label": p.label,
                    "length": int(p.series.shape[0]),
                    "dim": int(p.series.shape[1]),
                    "values": [float(v) for v in p.series.ravel()],
                }
                for p in self.prototypes
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Codebook":
        if doc.get("version") != CODEBOOK_VERSION:
            raise ModelError(f"unsupported codebook version {doc.get('version')!r}")
        protos = []
        for entry in doc["prototypes"]:
            values = np.asarray(entry["values"], dtype=np.float64)
            if values.size != entry["length"] * entry["dim"]:
                raise ModelError("prototype values do not match length x dim")
            protos.append(LabeledPrototype(values.reshape(entry["length"], entry["dim"]), entry["label"]))
        return cls(protos)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Codebook":
        return cls.from_dict(json.loads(text))


@dataclass
class ForceResult:
    forces: np.ndarray
    skip: bool = False


def distortions(cb: Codebook, x) -> np.ndarray:
    """Squared DTW distance from ``x`` to every prototype, in codebook order."""
    if not cb.prototypes:
        raise ModelError("codebook is empty")
    x = as_series(x)
    return _distortions(cb.series, x)


def _distortions(series: list[np.ndarray], x: np.ndarray) -> np.ndarray:
    if series[0].shape[1] != x.shape[1]:
        raise InputError(f"feature dimensions differ: {series[0].shape[1]} vs {x.shape[1]}")
    return np.array([_squared_dtw(p, x) for p in series])


def nearest_prototype(cb: Codebook, x) -> int:
    """Index of the prototype closest to ``x``; ties go to the lowest index."""
    return int(np.argmin(distortions(cb, x)))


def lvq1_force(cb: Codebook, x, y: int, dist: np.ndarray | None = None) -> ForceResult:
    """+1 / -1 on the best-matching prototype depending on label agreement."""
    if dist is None:
        dist = distortions(cb, x)
    forces = np.zeros(len(cb))
    k = int(np.argmin(dist))
    forces[k] = 1.0 if cb.prototypes[k].label == y else -1.0
    return ForceResult(forces)


def _closest(dist: np.ndarray, members: np.ndarray) -> tuple[int, float, bool]:
    d = dist[members]
    k = int(np.argmin(d))
    unique = int(np.count_nonzero(d == d[k])) == 1
    return int(members[k]), float(d[k]), unique


def relative_distance_difference(d_plus: float, d_minus: float) -> float:
    """(d+ - d-) / (d+ + d-); NaN at the singularity d+ = d- = 0."""
    s = d_plus + d_minus
    if s == 0.0:
        return float("nan")
    return (d_plus - d_minus) / s


def sigmoid(u, sigma: float):
    return expit(sigma * np.asarray(u, dtype=np.float64))


def glvq_force(cb: Codebook, x, y: int, sigma: float, dist: np.ndarray | None = None) -> ForceResult:
    """GLVQ force on the closest correct (p+) and closest wrong (p-) prototype.

    The input is skipped, with all forces zero, when d+ + d- = 0 or when
    either p+ or p- is not unique.
    """
    labels = cb.labels
    same = np.flatnonzero(labels == y)
    other = np.flatnonzero(labels != y)
    if same.size == 0 or other.size == 0:
        raise ModelError(f"GLVQ needs prototypes with and without label {y}")
    if dist is None:
        dist = distortions(cb, x)
    forces = np.zeros(len(cb))
    kp, dp, up = _closest(dist, same)
    km, dm, um = _closest(dist, other)
    s = dp + dm
    if s == 0.0 or not (up and um):
        return ForceResult(forces, skip=True)
    kappa = (dp - dm) / s
    h = float(sigmoid(kappa, sigma))
    dh = h * (1.0 - h)
    forces[kp] = dh * dm / (s * s)
    forces[km] = -dh * dp / (s * s)
    return ForceResult(forces)


@numba.njit(cache=True)
def _asymmetric_step(p, x, step, path):
    out = p.copy()
    valence = np.zeros(p.shape[0])
    warped = np.zeros(p.shape)
    for l in range(path.shape[0]):
        i, j = path[l, 0], path[l, 1]
        valence[i] += 1.0
        for k in range(p.shape[1]):
            warped[i, k] += x[j, k]
    for i in range(p.shape[0]):
        for k in range(p.shape[1]):
            out[i, k] = p[i, k] - step * (valence[i] * p[i, k] - warped[i, k])
    return out


def _asymmetric(p: np.ndarray, x: np.ndarray, step: float) -> np.ndarray:
    path = _backtrace(_accumulate(p, x))
    return _asymmetric_step(p, x, step, path)


def _symmetric(p: np.ndarray, x: np.ndarray, step: float) -> np.ndarray:
    path = _backtrace(_accumulate(p, x))
    return resample(symmetric_weighted_average(p, x, step, path), len(p))


def _check_step(eta: float, force: float) -> None:
    if not np.isfinite(force):
        raise InputError("force must be finite")
    if not eta > 0:
        raise InputError("learning rate must be positive")


def apply_asymmetric_update(p, x, eta: float, force: float) -> np.ndarray:
    """p - eta * force * (V p - W x) along the deterministic optimal path."""
    _check_step(eta, force)
    p, x = _pair(p, x)
    if force == 0.0:
        return p.copy()
    return _asymmetric(p, x, eta * force)


def apply_symmetric_update(p, x, eta: float, force: float) -> np.ndarray:
    """Symmetric weighted average with alpha = eta * force, projected back to
    the length of ``p``."""
    _check_step(eta, force)
    p, x = _pair(p, x)
    if force == 0.0:
        return p.copy()
    return _symmetric(p, x, eta * force)


def _glvq_terms(labels: np.ndarray, dist: np.ndarray, y: int) -> tuple[float, bool]:
    same, other = labels == y, labels != y
    if not same.any() or not other.any():
        raise ModelError(f"GLVQ needs prototypes with and without label {y}")
    kappa = relative_distance_difference(float(dist[same].min()), float(dist[other].min()))
    return kappa, np.isnan(kappa)


def glvq_cost(cb: Codebook, D: LabeledDataset, sigma: float, return_singular: bool = False):
    """Sum over examples of sigmoid(kappa(x)); examples where kappa is
    undefined add nothing and are counted separately."""
    cb.validate()
    labels = cb.labels
    cost, singular = 0.0, 0
    for x, y in zip(D.series, D.labels):
        kappa, undefined = _glvq_terms(labels, _distortions(cb.series, x), int(y))
        if undefined:
            singular += 1
        else:
            cost += float(sigmoid(kappa, sigma))
    return (cost, singular) if return_singular else cost


@dataclass
class TrainConfig:
    method: str = "asymmetric-glvq"
    eta0: float = 0.1
    sigma0: float = 1.0
    max_epochs: int = 1000
    seed: int = 0
    shuffle: bool = True
    # stop once an epoch moves no prototype element by more than tol
    tol: float = 0.0
    track: bool = True

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.max_epochs < 0:
            raise ConfigError("max_epochs must be >= 0")
        if self.method == "asymmetric-glvq":
            if not self.sigma0 > 0:
                raise ConfigError("sigma0 must be positive for GLVQ")
        elif not self.eta0 > 0:
            raise ConfigError("eta0 must be positive for LVQ1")

    def learning_rate(self, epoch: int) -> float:
        """Rate used during ``epoch`` (1-based)."""
        if self.method == "asymmetric-glvq":
            return 1.0
        return self.eta0 * (1.0 - (epoch - 1) / self.max_epochs)

    def slope(self, epoch: int) -> float:
        return self.sigma0 * epoch


@dataclass
class TrainReport:
    """Training curves; ``error_rate[t]`` and ``cost[t]`` describe the codebook
    after epoch t + 1. The GLVQ cost is evaluated at the initial slope."""

    initial_error: float = float("nan")
    initial_cost: float | None = None
    error_rate: list[float] = field(default_factory=list)
    cost: list[float] = field(default_factory=list)
    epochs: int = 0
    skipped: int = 0

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "skipped": self.skipped,
            "initial_error": self.initial_error,
            "initial_cost": self.initial_cost,
            "error_rate": list(self.error_rate),
            "cost": list(self.cost),
        }


def _evaluate(series, labels, D: LabeledDataset, sigma: float | None) -> tuple[float, float | None]:
    wrong, cost = 0, 0.0
    for x, y in zip(D.series, D.labels):
        dist = _distortions(series, x)
        wrong += int(labels[int(np.argmin(dist))] != y)
        if sigma is not None:
            kappa, undefined = _glvq_terms(labels, dist, int(y))
            if not undefined:
                cost += float(sigmoid(kappa, sigma))
    return wrong / len(D), (cost if sigma is not None else None)


def train(D: LabeledDataset, init: Codebook, config: TrainConfig) -> tuple[Codebook, TrainReport]:
    """Stochastic LVQ training in DTW space.

    Each epoch visits the examples in a seeded random order. For every
    example the forces of all prototypes are computed from the current
    codebook, then each prototype with nonzero force is updated. Prototype
    lengths and labels never change.
    """
    config.validate()
    init.validate(D.classes)
    if init.series[0].shape[1] != D.dim:
        raise ModelError("codebook and data have different feature dimensions")
    cb = init.copy()
    report = TrainReport(epochs=0)
    glvq = config.method == "asymmetric-glvq"
    if glvq:
        for y in D.classes:
            _glvq_terms(cb.labels, np.zeros(len(cb)), int(y))
    if config.max_epochs == 0:
        return cb, report

    update = _symmetric if config.method == "symmetric-lvq1" else _asymmetric
    rng = np.random.default_rng(config.seed)
    series = cb.series
    labels = cb.labels
    track_sigma = config.sigma0 if glvq else None
    if config.track:
        report.initial_error, report.initial_cost = _evaluate(series, labels, D, track_sigma)

    for epoch in range(1, config.max_epochs + 1):
        eta = config.learning_rate(epoch)
        sigma = config.slope(epoch)
        order = rng.permutation(len(D)) if config.shuffle else np.arange(len(D))
        shift = 0.0
        for idx in order:
            x, y = D.series[idx], int(D.labels[idx])
            dist = _distortions(series, x)
            res = glvq_force(cb, x, y, sigma, dist) if glvq else lvq1_force(cb, x, y, dist)
            if res.skip:
                report.skipped += 1
                continue
            for k in np.flatnonzero(res.forces):
                new = update(series[k], x, eta * res.forces[k])
                shift = max(shift, float(np.max(np.abs(new - series[k]))))
                series[k] = new
                cb.prototypes[k].series = new
        report.epochs = epoch
        if config.track:
            err, cost = _evaluate(series, labels, D, track_sigma)
            report.error_rate.append(err)
            if cost is not None:
                report.cost.append(cost)
        if shift <= config.tol:
            break
    return cb, report


def training_error(cb: Codebook, D: LabeledDataset) -> float:
    err, _ = _evaluate(cb.series, cb.labels, D, None)
    return err


__all__ = [
    "METHODS",
    "Codebook",
    "ForceResult",
    "LabeledPrototype",
    "TrainConfig",
    "TrainReport",
    "apply_asymmetric_update",
    "apply_symmetric_update",
    "distortions",
    "glvq_cost",
    "glvq_force",
    "lvq1_force",
    "nearest_prototype",
    "relative_distance_difference",
    "sigmoid",
    "train",
    "training_error",
]
