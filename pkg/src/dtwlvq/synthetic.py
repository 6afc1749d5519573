"""Seeded synthetic classification problems."""

from __future__ import annotations

import numpy as np

from .dataset import LabeledDataset


def cylinder_bell_funnel(n_per_class: int = 20, length: int = 32, seed: int = 0) -> LabeledDataset:
    """Cylinder (1), bell (2) and funnel (3) series after Saito (1994).

    Each series is a plateau, ramp up or ramp down of height 6 + N(0, 1)
    between a random onset a and offset b, plus N(0, 1) noise. The onset and
    width ranges of the classic length-128 generator, [16, 32] and [32, 96],
    are scaled to ``length``.
    """
    rng = np.random.default_rng(seed)
    scale = length / 128.0
    t = np.arange(length, dtype=np.float64)
    series, labels = [], []
    for label in (1, 2, 3):
        for _ in range(n_per_class):
            a = rng.uniform(16, 32) * scale
            b = a + rng.uniform(32, 96) * scale
            height = 6.0 + rng.standard_normal()
            inside = (t >= a) & (t <= b)
            if label == 1:
                shape = np.ones(length)
            elif label == 2:
                shape = (t - a) / (b - a)
            else:
                shape = (b - t) / (b - a)
            series.append(height * inside * shape + rng.standard_normal(length))
            labels.append(label)
    return LabeledDataset(series, labels, name=f"cbf-{seed}")
