"""Dataset files, experiment configuration and the cross-validation driver."""

from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .dataset import LabeledDataset
from .errors import ConfigError, DtwLvqError, ParseError
from .evaluation import (
    ETA_GRID,
    SIGMA_GRID,
    HyperGrid,
    ResultsTable,
    canonical_method,
    comparison_report,
    make_folds,
    merge_tables,
    select_and_test,
)

log = logging.getLogger(__name__)

WORKERS_ENV = "DTWLVQ_WORKERS"


def _detect_delimiter(line: str) -> str | None:
    if "\t" in line:
        return "\t"
    if "," in line:
        return ","
    return None  # whitespace


def _parse_label(text: str, lineno: int) -> str:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"line {lineno}: label {text!r} is not numeric") from None
    if not np.isfinite(value) or value != int(value):
        raise ParseError(f"line {lineno}: label {text!r} is not an integer")
    return str(int(value))


def znormalize(x: np.ndarray) -> np.ndarray:
    std = x.std(axis=0)
    return (x - x.mean(axis=0)) / np.where(std > 0, std, 1.0)


def load_dataset(path, strict: bool = True, normalize: bool = False) -> LabeledDataset:
    """Read a UCR-style file: one series per line, class label first.

    The delimiter (tab, comma or whitespace) is detected from the first
    line. Labels are remapped to 1..C in ascending numeric order; the
    original labels are kept in ``label_names``. With ``strict=False`` rows
    may differ in length and trailing NaN padding is dropped.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    numbered = [(n, line) for n, line in enumerate(lines, start=1) if line.strip()]
    if not numbered:
        raise ParseError(f"{path}: no data")
    delim = _detect_delimiter(numbered[0][1])
    raw_labels, series = [], []
    width = None
    for lineno, line in numbered:
        fields = line.strip().split(delim) if delim else line.split()
        fields = [f.strip() for f in fields]
        if len(fields) < 2:
            raise ParseError(f"{path}:{lineno}: expected a label and at least one value")
        raw_labels.append(_parse_label(fields[0], lineno))
        try:
            values = np.array([float(f) for f in fields[1:]])
        except ValueError:
            bad = next(f for f in fields[1:] if not _is_float(f))
            raise ParseError(f"{path}:{lineno}: non-numeric field {bad!r}") from None
        if strict:
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise ParseError(f"{path}:{lineno}: row has {len(values)} values, expected {width}")
            if not np.all(np.isfinite(values)):
                raise ParseError(f"{path}:{lineno}: NaN or Inf value")
        else:
            finite = np.isfinite(values)
            if not finite.any():
                raise ParseError(f"{path}:{lineno}: no finite values")
            values = values[: np.flatnonzero(finite)[-1] + 1]
            if not np.all(np.isfinite(values)):
                raise ParseError(f"{path}:{lineno}: NaN or Inf inside the series")
        x = values[:, None]
        series.append(znormalize(x) if normalize else x)
    names = sorted(set(raw_labels), key=int)
    if len(names) < 2:
        raise ParseError(f"{path}: only one class ({names[0]})")
    ids = {name: i for i, name in enumerate(names, start=1)}
    return LabeledDataset(series, [ids[r] for r in raw_labels],
                          {i: name for name, i in ids.items()}, path.stem)


def _is_float(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def save_dataset(D: LabeledDataset, path, delimiter: str = ",") -> None:
    """Write a univariate dataset in the format ``load_dataset`` reads."""
    if D.dim != 1:
        raise DtwLvqError("delimited files hold univariate series only; use save_json_dataset")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for x, y in zip(D.series, D.labels):
            label = D.label_names.get(int(y), str(int(y)))
            fh.write(delimiter.join([label, *(repr(float(v)) for v in x[:, 0])]) + "\n")


def load_json_dataset(path, normalize: bool = False) -> LabeledDataset:
    """Read ``{"examples": [{"label": int, "values": [[...], ...]}, ...]}``
    where ``values`` holds d rows of m feature values each."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
        examples = doc["examples"]
        raw_labels = [_parse_label(str(e["label"]), n) for n, e in enumerate(examples, start=1)]
        series = [np.asarray(e["values"], dtype=np.float64).T for e in examples]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if normalize:
        series = [znormalize(x) for x in series]
    names = sorted(set(raw_labels), key=int)
    if len(names) < 2:
        raise ParseError(f"{path}: fewer than two classes")
    ids = {name: i for i, name in enumerate(names, start=1)}
    return LabeledDataset(series, [ids[r] for r in raw_labels],
                          {i: name for name, i in ids.items()}, path.stem)


def save_json_dataset(D: LabeledDataset, path) -> None:
    doc = {"examples": [
        {"label": int(D.label_names.get(int(y), int(y))), "values": x.T.tolist()}
        for x, y in zip(D.series, D.labels)
    ]}
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def read_any(path, normalize: bool = False, strict: bool = True) -> LabeledDataset:
    if str(path).endswith(".json"):
        return load_json_dataset(path, normalize=normalize)
    return load_dataset(path, strict=strict, normalize=normalize)


@dataclass
class ExperimentConfig:
    datasets: list[str]
    methods: list[str] = field(default_factory=lambda: ["1-nn", "kmeans", "slvq", "alvq", "glvq"])
    folds: int = 10
    seed: int = 0
    sigma_grid: list[float] = field(default_factory=lambda: list(SIGMA_GRID))
    eta_grid: list[float] = field(default_factory=lambda: list(ETA_GRID))
    k: list[int] = field(default_factory=lambda: [1])
    max_epochs: int = 1000
    dba_max_iter: int = 50
    kmeans_max_iter: int = 50
    output_dir: str = "results"
    workers: int | None = None
    normalize: bool = False
    strict: bool = True

    @classmethod
    def from_dict(cls, doc: dict, base_dir=None) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ConfigError(f"unknown config keys {unknown}")
        if "datasets" not in doc:
            raise ConfigError("config needs a 'datasets' list")
        doc = dict(doc)
        if isinstance(doc.get("k"), int):
            doc["k"] = [doc["k"]]
        config = cls(**doc)
        if base_dir is not None:
            base = Path(base_dir)
            config.datasets = [str(base / p) if not Path(p).is_absolute() else p for p in config.datasets]
            if not Path(config.output_dir).is_absolute():
                config.output_dir = str(base / config.output_dir)
        return config

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(doc, base_dir=path.parent)

    def validate(self) -> None:
        if not self.datasets:
            raise ConfigError("no datasets configured")
        missing = [p for p in self.datasets if not Path(p).is_file()]
        if missing:
            raise ConfigError(f"dataset files not found: {missing}")
        stems = [Path(p).stem for p in self.datasets]
        if len(set(stems)) != len(stems):
            raise ConfigError("dataset file names must be unique")
        if not self.methods:
            raise ConfigError("no methods configured")
        for m in self.methods:
            canonical_method(m)
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("duplicate methods")
        if self.folds < 2:
            raise ConfigError("need at least 2 folds")
        if not self.k or min(self.k) < 1:
            raise ConfigError("k must be a nonempty list of positive integers")
        for name in ("max_epochs", "dba_max_iter", "kmeans_max_iter"):
            if getattr(self, name) < (0 if name == "max_epochs" else 1):
                raise ConfigError(f"{name} out of range")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be >= 1")
        HyperGrid(self.sigma_grid, self.eta_grid)

    def to_dict(self) -> dict:
        return asdict(self)


def column_name(method: str, k: int, ks: list[int]) -> str:
    return method if len(ks) == 1 and k == 1 else f"{method}[k={k}]"


def _run_cell(D: LabeledDataset, method: str, k: int, fold: int, config: ExperimentConfig):
    plan = make_folds(D, config.folds, config.seed)
    return select_and_test(
        D, plan, fold, method, HyperGrid(config.sigma_grid, config.eta_grid), k=k,
        max_epochs=config.max_epochs, seed=config.seed, dba_max_iter=config.dba_max_iter,
        kmeans_max_iter=config.kmeans_max_iter,
    )


def resolve_workers(requested: int | None) -> int:
    if requested is not None:
        return requested
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV}={env!r} is not an integer") from None
    return 1


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def run_experiment(config: ExperimentConfig) -> int:
    """Cross-validate every dataset x method (x k) cell and write the reports.

    Returns 0 when every cell succeeded, 1 otherwise. Failed cells are listed
    in ``report.json`` and left empty in ``table.csv``.
    """
    config.validate()
    out = Path(config.output_dir)
    datasets = [read_any(p, normalize=config.normalize, strict=config.strict) for p in config.datasets]
    columns = [(m, k, column_name(m, k, config.k)) for m in config.methods for k in config.k]

    cells = {}
    failures = {}
    for D in datasets:
        try:
            make_folds(D, config.folds, config.seed)
        except DtwLvqError as exc:
            for _, _, col in columns:
                failures[(D.name, col)] = str(exc)
            continue
        for method, k, col in columns:
            for fold in range(config.folds):
                cells[(D.name, col, fold)] = (D, method, k, fold)

    results = {}
    workers = resolve_workers(config.workers)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            futures = {key: pool.submit(_run_cell, *args, config) for key, args in cells.items()}
            for key, fut in futures.items():
                try:
                    results[key] = fut.result()
                except DtwLvqError as exc:
                    failures.setdefault(key[:2], str(exc))
    else:
        for key, args in cells.items():
            log.info("dataset=%s column=%s fold=%d", *key)
            try:
                results[key] = _run_cell(*args, config)
            except DtwLvqError as exc:
                failures.setdefault(key[:2], str(exc))

    out.mkdir(parents=True, exist_ok=True)
    acc = np.full((len(datasets), len(columns)), np.nan)
    for r, D in enumerate(datasets):
        for c, (method, k, col) in enumerate(columns):
            if (D.name, col) in failures:
                continue
            folds = [results[(D.name, col, f)] for f in range(config.folds)]
            acc[r, c] = 100.0 * float(np.mean([f.accuracy for f in folds]))
            cell_dir = out / D.name / col
            cell_dir.mkdir(parents=True, exist_ok=True)
            for f in folds:
                doc = {"dataset": D.name, "method": canonical_method(method), "k": k,
                       "seed": config.seed, **f.to_dict()}
                (cell_dir / f"fold{f.fold + 1}.json").write_text(_dump(doc), encoding="utf-8")

    names = [D.name for D in datasets]
    cols = [col for _, _, col in columns]
    buf = [",".join(_csv_field(x) for x in ["dataset", *cols])]
    for name, row in zip(names, acc):
        buf.append(",".join([_csv_field(name), *("" if np.isnan(v) else repr(float(v)) for v in row)]))
    (out / "table.csv").write_text("\n".join(buf) + "\n", encoding="utf-8", newline="\n")

    report = {"config": config.to_dict(),
              "failures": [{"dataset": d, "column": c, "error": e} for (d, c), e in sorted(failures.items())]}
    if not failures:
        report.update(comparison_report(ResultsTable(names, cols, acc)))
    (out / "report.json").write_text(_dump(report), encoding="utf-8")
    return 1 if failures else 0


def _csv_field(text: str) -> str:
    if any(c in text for c in ',"\n\r'):
        return '"' + text.replace('"', '""') + '"'
    return text


def _matrix_csv(names: list[str], matrix) -> str:
    rows = [",".join(_csv_field(x) for x in ["", *names])]
    for name, row in zip(names, np.asarray(matrix)):
        rows.append(",".join([_csv_field(name), *(repr(float(v)) for v in row)]))
    return "\n".join(rows) + "\n"


def compare(csv_paths, output_dir=None) -> dict:
    """Merge result tables and compute ranks, winning percentages and mean
    percentage differences. Writes CSV and JSON files when ``output_dir`` is
    given."""
    table = merge_tables([ResultsTable.read(p) for p in csv_paths])
    report = comparison_report(table)
    if output_dir is not None:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "ranks.csv", "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["dataset", *table.classifiers])
            for name, row in zip(table.datasets, report["ranks"]):
                writer.writerow([name, *row])
            writer.writerow(["avg", *(repr(v) for v in report["avg_rank"])])
            writer.writerow(["std", *(repr(v) for v in report["std_rank"])])
        (out / "winning.csv").write_text(_matrix_csv(table.classifiers, report["winning"]), encoding="utf-8")
        (out / "mean_pct_diff.csv").write_text(_matrix_csv(table.classifiers, report["mean_pct_diff"]),
                                               encoding="utf-8")
        (out / "report.json").write_text(_dump(report), encoding="utf-8")
    return report
