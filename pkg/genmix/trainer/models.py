import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from genmix.discriminators.ensemble import DiscriminatorEnsemble
from genmix.generative.models import GenerativeModel
from genmix.partition.models import Assignment, LikelihoodTable, MixingWeights


@dataclass
class MixtureState:
    """
    Текущее состояние смеси.

    Attributes:
        models: K генеративных моделей
        weights: Веса смеси, согласованные с assignment
        assignment: Текущее жесткое разбиение
        ensemble: Дискриминаторы (None для бэкенда ближайшего центроида)
        t: Номер завершенной внешней итерации
        table: Последняя таблица правдоподобий (None до первого назначения)
    """

    models: list[GenerativeModel]
    weights: MixingWeights
    assignment: Assignment
    ensemble: Optional[DiscriminatorEnsemble] = None
    t: int = 0
    table: Optional[LikelihoodTable] = None

    @property
    def k(self) -> int:
        return len(self.models)

    @property
    def dim(self) -> int:
        return self.models[0].dim


@dataclass
class RoundRecord:
    """
    Итоги одной внешней итерации.

    Attributes:
        round: Номер итерации
        subset_sizes: Размеры обучающих подмножеств после балансировки
        alpha: Веса смеси после назначения
        mean_loss: Средняя функция потерь каждой модели за итерацию
        wall_time: Время итерации в секундах
        diverged: Компоненты, откатившиеся к чекпоинту
        metrics: Дополнительные метрики (заполняются вызывающим кодом)
    """

    round: int
    subset_sizes: list[int]
    alpha: list[float]
    mean_loss: list[float]
    wall_time: float
    diverged: list[int] = field(default_factory=list)
    metrics: dict[str, float] = field(default_factory=dict)


@dataclass
class History:
    records: list[RoundRecord] = field(default_factory=list)

    def append(self, record: RoundRecord) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def write_csv(self, path: Union[str, Path]) -> Path:
        """Детерминированные колонки: round,component,subset_size,alpha,mean_loss,diverged."""
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["round", "component", "subset_size", "alpha", "mean_loss", "diverged"])
            for r in self.records:
                for j, (size, alpha, loss) in enumerate(zip(r.subset_sizes, r.alpha, r.mean_loss)):
                    writer.writerow(
                        [r.round, j, size, format(alpha, ".17g"), format(loss, ".17g"), int(j in r.diverged)]
                    )
        return path

    def write_timings_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["round", "wall_time"])
            for r in self.records:
                writer.writerow([r.round, f"{r.wall_time:.6f}"])
        return path

    def alphas(self) -> np.ndarray:
        return np.array([r.alpha for r in self.records])
