"""Nearest-prototype time-series classification in DTW spaces with
asymmetric learning vector quantization."""

from .averaging import (
    asymmetric_weighted_average,
    dba_mean,
    frechet_variation,
    medoid,
    resample,
    symmetric_weighted_average,
)
from .classifiers import accuracy, classify, kmeans_per_class, one_nn, predict
from .dataset import LabeledDataset
from .dtw import (
    Alignment,
    DtwResult,
    alignment_cost,
    alignment_of,
    dtw,
    enumerate_warping_paths,
    optimal_path,
    squared_dtw,
    subgradient,
)
from .errors import (
    ConfigError,
    DtwLvqError,
    InputError,
    ModelError,
    ParseError,
    PathError,
    SizeError,
)
from .evaluation import (
    FoldPlan,
    HyperGrid,
    ResultsTable,
    make_folds,
    mean_percentage_difference,
    rank_table,
    select_and_test,
    winning_percentage,
)
from .lvq import (
    Codebook,
    LabeledPrototype,
    TrainConfig,
    TrainReport,
    apply_asymmetric_update,
    apply_symmetric_update,
    glvq_cost,
    glvq_force,
    lvq1_force,
    nearest_prototype,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "Alignment",
    "Codebook",
    "ConfigError",
    "DtwLvqError",
    "DtwResult",
    "FoldPlan",
    "HyperGrid",
    "InputError",
    "LabeledDataset",
    "LabeledPrototype",
    "ModelError",
    "ParseError",
    "PathError",
    "ResultsTable",
    "SizeError",
    "TrainConfig",
    "TrainReport",
    "__version__",
    "accuracy",
    "alignment_cost",
    "alignment_of",
    "apply_asymmetric_update",
    "apply_symmetric_update",
    "asymmetric_weighted_average",
    "classify",
    "dba_mean",
    "dtw",
    "enumerate_warping_paths",
    "frechet_variation",
    "glvq_cost",
    "glvq_force",
    "kmeans_per_class",
    "lvq1_force",
    "make_folds",
    "mean_percentage_difference",
    "medoid",
    "nearest_prototype",
    "one_nn",
    "optimal_path",
    "predict",
    "rank_table",
    "resample",
    "select_and_test",
    "squared_dtw",
    "subgradient",
    "symmetric_weighted_average",
    "train",
    "winning_percentage",
]
