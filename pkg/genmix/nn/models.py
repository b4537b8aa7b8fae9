from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from genmix.nn.schemas import AdamConfig


@dataclass
class MlpParams:
    """
    Веса и смещения сети.

    Attributes:
        weights: Матрицы весов формы (fan_in, fan_out) по слоям
        biases: Векторы смещений формы (fan_out,) по слоям
        version: Счетчик изменений, по нему forward-лента проверяет актуальность
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    version: int = 0

    def copy(self) -> "MlpParams":
        return MlpParams(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            version=self.version,
        )

    def arrays(self) -> list[np.ndarray]:
        """Все массивы в порядке W0, b0, W1, b1, ..."""
        out: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def touch(self) -> None:
        self.version += 1

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())

    def equals(self, other: "MlpParams") -> bool:
        mine: list[np.ndarray] = self.arrays()
        theirs: list[np.ndarray] = other.arrays()
        return len(mine) == len(theirs) and all(np.array_equal(a, b) for a, b in zip(mine, theirs))


@dataclass
class Gradients:
    """
    Градиенты по параметрам (той же формы, что MlpParams) и по входу сети.

    Attributes:
        weights: dL/dW по слоям
        biases: dL/db по слоям
        inputs: dL/dx для батча
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    inputs: Optional[np.ndarray] = None

    def arrays(self) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    @classmethod
    def zeros_like(cls, params: MlpParams) -> "Gradients":
        return cls(
            weights=[np.zeros_like(w) for w in params.weights],
            biases=[np.zeros_like(b) for b in params.biases],
        )


@dataclass
class Tape:
    """
    Кэш активаций прямого прохода.

    Attributes:
        inputs: Вход каждого слоя (a_0 = батч)
        preactivations: z = a @ W + b каждого слоя
        outputs: Выход сети после выходной активации
        params_id: id() параметров, на которых выполнен проход
        params_version: Версия параметров на момент прохода
    """

    inputs: list[np.ndarray]
    preactivations: list[np.ndarray]
    outputs: np.ndarray
    params_id: int
    params_version: int


@dataclass
class AdamState:
    """
    Состояние оптимизатора Adam.

    Attributes:
        m: Первые моменты в порядке MlpParams.arrays()
        v: Вторые моменты в том же порядке
        t: Число выполненных шагов
        config: Гиперпараметры
    """

    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0
    config: AdamConfig = field(default_factory=AdamConfig)

    @classmethod
    def zeros_like(cls, params: MlpParams, config: AdamConfig) -> "AdamState":
        return cls(
            m=[np.zeros_like(a) for a in params.arrays()],
            v=[np.zeros_like(a) for a in params.arrays()],
            t=0,
            config=config,
        )

    def copy(self) -> "AdamState":
        return AdamState(m=[a.copy() for a in self.m], v=[a.copy() for a in self.v], t=self.t, config=self.config)
