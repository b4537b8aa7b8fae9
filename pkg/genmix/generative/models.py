from abc import ABC, abstractmethod

import numpy as np

from genmix.exceptions import ConfigurationError
from genmix.generative.schemas import ModelKind


class GenerativeModel(ABC):
    """
    Генеративная модель-компонента смеси P_{g_j}.

    Экземпляр предназначен для одного писателя: train_epoch/restore нельзя
    вызывать параллельно, sample только читает параметры.
    """

    kind: ModelKind

    @property
    @abstractmethod
    def dim(self) -> int:
        """Размерность пространства данных."""

    @abstractmethod
    def train_epoch(self, subset: np.ndarray, rng: np.random.Generator) -> float:
        """
        Одна эпоха обучения на подмножестве.

        Args:
            subset: Матрица n x d обучающих точек компоненты
            rng: Генератор случайных чисел компоненты

        Returns:
            float: Средняя функция потерь за эпоху
        """

    @abstractmethod
    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Возвращает матрицу n x d сэмплов."""

    @abstractmethod
    def checkpoint(self) -> bytes:
        """Сериализует параметры в контейнер чекпоинта."""

    @abstractmethod
    def restore(self, blob: bytes) -> None:
        """Восстанавливает параметры из контейнера чекпоинта."""


def sample(model: GenerativeModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Сэмплирует n точек из модели.

    Args:
        model: Генеративная модель
        n: Число точек (n >= 1)
        rng: Генератор случайных чисел

    Returns:
        np.ndarray: Матрица n x d
    """
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n}")
    out: np.ndarray = model.sample(n, rng)
    if out.shape != (n, model.dim):
        raise ConfigurationError(f"model returned shape {out.shape}, expected {(n, model.dim)}")
    return out
