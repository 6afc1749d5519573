from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dtw import as_series
from .errors import InputError


@dataclass
class LabeledDataset:
    """Labeled time series; lengths may differ, feature dimension may not.

    ``label_names`` maps the integer class ids back to the labels found in
    the source file, when the dataset was loaded from one.
    """

    series: list[np.ndarray]
    labels: np.ndarray
    label_names: dict[int, str] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        self.series = [as_series(x) for x in self.series]
        self.labels = np.asarray(self.labels, dtype=np.int64).ravel()
        if not self.series:
            raise InputError("dataset is empty")
        if len(self.series) != len(self.labels):
            raise InputError(f"{len(self.series)} series but {len(self.labels)} labels")
        dims = {x.shape[1] for x in self.series}
        if len(dims) != 1:
            raise InputError(f"mixed feature dimensions {sorted(dims)}")

    def __len__(self):
        return len(self.series)

    def __getitem__(self, idx):
        if isinstance(idx, (int, np.integer)):
            return self.series[idx], int(self.labels[idx])
        idx = np.asarray(idx)
        if idx.dtype == bool:
            idx = np.flatnonzero(idx)
        return LabeledDataset([self.series[i] for i in idx], self.labels[idx],
                              dict(self.label_names), self.name)

    @property
    def classes(self) -> np.ndarray:
        return np.unique(self.labels)

    @property
    def dim(self) -> int:
        return self.series[0].shape[1]

    def of_class(self, label: int) -> list[np.ndarray]:
        return [x for x, y in zip(self.series, self.labels) if y == label]
