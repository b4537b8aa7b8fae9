from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveInt

MAX_SAMPLE_POINTS: int = 100_000


class RunSummary(BaseModel):
    """
    Строка сравнения запусков.

    Attributes:
        run_id: Идентификатор запуска
        baseline: Бейзлайн
        n_modes: Число истинных мод
        kde_loglik: Финальное KDE-правдоподобие
        best: Лучший среди запусков с тем же числом мод
    """

    model_config = ConfigDict(from_attributes=True)

    run_id: str
    baseline: Optional[str] = None
    n_modes: Optional[int] = None
    kde_loglik: float
    best: bool


class MetricResponse(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    run_id: str
    round: int
    metric: str
    value: float


class HistoryRow(BaseModel):
    """
    Итоги итерации для одной компоненты (строка history.csv).

    Attributes:
        round: Номер итерации
        component: Номер компоненты
        subset_size: Размер обучающего подмножества
        alpha: Вес компоненты после назначения
        mean_loss: Средняя потеря (None, если модель откатилась)
        diverged: Откатывалась ли модель к чекпоинту
    """

    round: int
    component: int
    subset_size: int
    alpha: float
    mean_loss: Optional[float] = None
    diverged: bool


class SampleRequest(BaseModel):
    """
    Запрос сэмплов смеси.

    Attributes:
        n: Число точек
        seed: Зерно генератора
        round: Итерация чекпоинта (None - последняя)
    """

    n: PositiveInt = Field(le=MAX_SAMPLE_POINTS)
    seed: NonNegativeInt = 0
    round: Optional[NonNegativeInt] = None


class SampleResponse(BaseModel):
    run_id: str
    round: int
    points: list[list[float]]
