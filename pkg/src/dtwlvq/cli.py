"""Command line interface: ``dtwlvq run|compare|dist|avg|train|classify``."""

from __future__ import annotations

import logging
import sys

import click
import numpy as np

from .averaging import asymmetric_weighted_average, dba_mean, symmetric_weighted_average
from .classifiers import accuracy, kmeans_per_class, predict
from .dtw import as_series, dtw
from .errors import DtwLvqError, ParseError
from .evaluation import canonical_method
from .harness import ExperimentConfig, compare, read_any, run_experiment
from .lvq import METHODS, Codebook, TrainConfig, train


def _read_series(path, labeled: bool) -> list[np.ndarray]:
    if labeled:
        return read_any(path, strict=False).series
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                values = [float(v) for v in line.replace(",", " ").replace("\t", " ").split()]
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
            rows.append(as_series(values))
    if not rows:
        raise ParseError(f"{path}: no series")
    return rows


def _print_series(x: np.ndarray) -> None:
    for row in x:
        click.echo(",".join(repr(float(v)) for v in row))


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int)
@click.option("--folds", type=int)
@click.option("--max-epochs", type=int)
@click.option("--workers", type=int)
@click.option("--k", "k", type=int, multiple=True, help="Prototypes per class; repeat for a sweep.")
@click.option("--output", "output_dir", type=click.Path(file_okay=False))
def run(config_path, seed, folds, max_epochs, workers, k, output_dir):
    """Cross-validate the configured methods on the configured datasets."""
    config = ExperimentConfig.load(config_path)
    if seed is not None:
        config.seed = seed
    if folds is not None:
        config.folds = folds
    if max_epochs is not None:
        config.max_epochs = max_epochs
    if k:
        config.k = list(k)
    if output_dir is not None:
        config.output_dir = output_dir
    if workers is not None:
        config.workers = workers
    sys.exit(run_experiment(config))


@main.command("compare")
@click.argument("csvs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "output_dir", type=click.Path(file_okay=False))
def compare_cmd(csvs, output_dir):
    """Rank tables, winning percentages and mean percentage differences."""
    report = compare(csvs, output_dir)
    names = report["classifiers"]
    width = max(len(n) for n in names)
    click.echo(f"{'classifier':<{width}}  " + " ".join(f"r{r:<3d}" for r in range(1, len(names) + 1))
               + "    avg    std")
    for name, counts, avg, std in zip(names, report["rank_counts"], report["avg_rank"], report["std_rank"]):
        click.echo(f"{name:<{width}}  " + " ".join(f"{c:<4d}" for c in counts) + f"  {avg:5.2f}  {std:5.2f}")


@main.command()
@click.argument("file_a", type=click.Path(exists=True, dir_okay=False))
@click.argument("file_b", type=click.Path(exists=True, dir_okay=False))
@click.option("--labeled", is_flag=True, help="Files carry a class label in the first field.")
def dist(file_a, file_b, labeled):
    """Pairwise DTW distances between the series of two files (CSV matrix)."""
    A, B = _read_series(file_a, labeled), _read_series(file_b, labeled)
    for x in A:
        click.echo(",".join(repr(dtw(x, y).distance) for y in B))


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice(["dba", "asym", "sym"]), default="dba", show_default=True)
@click.option("--alpha", type=float, default=0.5, show_default=True,
              help="Weight of the second series (asym/sym).")
@click.option("--max-iter", type=int, default=50, show_default=True)
@click.option("--labeled", is_flag=True)
def avg(file, method, alpha, max_iter, labeled):
    """Average series: DBA over all rows, or a weighted average of two rows."""
    S = _read_series(file, labeled)
    if method == "dba":
        _print_series(dba_mean(S, max_iter=max_iter))
        return
    if len(S) != 2:
        raise click.UsageError(f"--method {method} needs exactly two series, got {len(S)}")
    p, x = S
    path = dtw(p, x).path
    fn = asymmetric_weighted_average if method == "asym" else symmetric_weighted_average
    _print_series(fn(p, x, alpha, path))


@main.command("train")
@click.argument("data", type=click.Path(exists=True, dir_okay=False))
@click.option("--method", default="glvq", show_default=True,
              type=click.Choice(list(METHODS) + ["alvq", "slvq", "glvq"]))
@click.option("--eta", type=float, default=0.1, show_default=True)
@click.option("--sigma", type=float, default=1.0, show_default=True)
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--max-epochs", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "output", type=click.Path(dir_okay=False), required=True)
def train_cmd(data, method, eta, sigma, k, max_epochs, seed, output):
    """Train a codebook from k-means initialization and save it as JSON."""
    D = read_any(data)
    init = kmeans_per_class(D, k=k, seed=seed)
    config = TrainConfig(method=canonical_method(method), eta0=eta, sigma0=sigma,
                         max_epochs=max_epochs, seed=seed)
    cb, report = train(D, init, config)
    with open(output, "w", encoding="utf-8") as fh:
        fh.write(cb.to_json() + "\n")
    click.echo(f"epochs={report.epochs} training_accuracy={accuracy(cb, D):.4f}")


@main.command("classify")
@click.argument("codebook", type=click.Path(exists=True, dir_okay=False))
@click.argument("data", type=click.Path(exists=True, dir_okay=False))
def classify_cmd(codebook, data):
    """Label every series of DATA with a saved codebook; prints accuracy last."""
    with open(codebook, encoding="utf-8") as fh:
        cb = Codebook.from_json(fh.read())
    D = read_any(data)
    pred = predict(cb, D)
    for y in pred:
        click.echo(D.label_names.get(int(y), str(int(y))))
    click.echo(f"accuracy={float(np.mean(pred == D.labels)):.4f}", err=True)


def entrypoint():
    try:
        main(standalone_mode=True)
    except DtwLvqError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    entrypoint()
