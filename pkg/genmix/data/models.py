from dataclasses import dataclass
from typing import Optional

import numpy as np

from genmix.exceptions import ConfigurationError


@dataclass
class Dataset:
    """
    Обучающие данные.

    Attributes:
        points: Матрица N x d
        labels: Истинные номера компонент (если известны)
        name: Имя набора
    """

    points: np.ndarray
    labels: Optional[np.ndarray] = None
    name: str = "dataset"

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 2 or len(self.points) < 1:
            raise ConfigurationError(f"dataset needs an N x d matrix with N >= 1, got shape {self.points.shape}")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (len(self.points),):
                raise ConfigurationError(f"labels length {len(self.labels)} != N {len(self.points)}")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def subset(self, indices: np.ndarray, name: Optional[str] = None) -> "Dataset":
        return Dataset(
            points=self.points[indices],
            labels=None if self.labels is None else self.labels[indices],
            name=name or self.name,
        )
