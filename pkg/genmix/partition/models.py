from dataclasses import dataclass
from enum import Enum

import numpy as np

from genmix.exceptions import ConfigurationError

COLUMN_TOLERANCE: float = 1e-9


class TableKind(str, Enum):
    COLUMN = "column"
    ROW = "row"


@dataclass
class LikelihoodTable:
    """
    Нормированные оценки правдоподобия P_{g_j}(x_i).

    Attributes:
        values: Матрица N x K
        normalizers: Константы Z_j по столбцам
        kind: column - столбцы суммируются в 1 (оценка дискриминаторами),
            row - строки суммируются в 1 (softmax по ближайшему центроиду)
    """

    values: np.ndarray
    normalizers: np.ndarray
    kind: TableKind = TableKind.COLUMN

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        self.normalizers = np.asarray(self.normalizers, dtype=np.float64)
        if self.values.ndim != 2:
            raise ConfigurationError(f"likelihood table must be N x K, got {self.values.shape}")
        if self.normalizers.shape != (self.values.shape[1],):
            raise ConfigurationError("one normalizer per column expected")
        if np.any(self.values < 0) or np.any(self.normalizers <= 0):
            raise ConfigurationError("likelihoods must be >= 0 and normalizers > 0")
        axis: int = 0 if self.kind is TableKind.COLUMN else 1
        if not np.allclose(self.values.sum(axis=axis), 1.0, rtol=0.0, atol=COLUMN_TOLERANCE):
            raise ConfigurationError(f"likelihood table is not {self.kind.value}-stochastic")

    @classmethod
    def from_ratios(cls, ratios: np.ndarray) -> "LikelihoodTable":
        """
        Нормирует сырые отношения плотностей по столбцам: values = ratio / Z_j, Z_j = sum_i ratio_ij.

        Args:
            ratios: Матрица N x K положительных отношений

        Returns:
            LikelihoodTable: Столбцово-стохастическая таблица
        """
        ratios = np.asarray(ratios, dtype=np.float64)
        z: np.ndarray = ratios.sum(axis=0)
        return cls(values=ratios / z, normalizers=z, kind=TableKind.COLUMN)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]


@dataclass
class Assignment:
    """
    Жесткое разбиение: c_j(x_i) = 1 тогда и только тогда, когда owner[i] == j.

    Attributes:
        owner: Номер компоненты для каждой точки
        generation: Номер итерации t, на которой получено разбиение
    """

    owner: np.ndarray
    generation: int = 0

    def __post_init__(self) -> None:
        self.owner = np.asarray(self.owner, dtype=np.int64)
        if self.owner.ndim != 1:
            raise ConfigurationError("owner must be a vector")

    @property
    def n(self) -> int:
        return self.owner.shape[0]

    def validate(self, k: int) -> None:
        if np.any(self.owner < 0) or np.any(self.owner >= k):
            raise ConfigurationError(f"owner entries must lie in [0, {k})")

    def one_hot(self, k: int) -> np.ndarray:
        """Матрица N x K значений c_j(x_i)."""
        self.validate(k)
        out: np.ndarray = np.zeros((self.n, k), dtype=np.int64)
        out[np.arange(self.n), self.owner] = 1
        return out

    def members(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.owner == j)


@dataclass
class MixingWeights:
    """
    Веса смеси alpha_j.

    Attributes:
        alpha: Вектор длины K, неотрицательный, сумма 1
    """

    alpha: np.ndarray

    def __post_init__(self) -> None:
        self.alpha = np.asarray(self.alpha, dtype=np.float64)
        if np.any(self.alpha < 0) or not np.isclose(self.alpha.sum(), 1.0, rtol=0.0, atol=1e-12):
            raise ConfigurationError(f"mixing weights must be >= 0 and sum to 1, got {self.alpha}")

    @property
    def k(self) -> int:
        return self.alpha.shape[0]
