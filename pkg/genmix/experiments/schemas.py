from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveInt, model_validator

from genmix.data.schemas import GmmSpec
from genmix.trainer.schemas import LikelihoodBackend, SplitMode, TrainConfig

SINGLE_LARGE_WIDTH: int = 150


class Baseline(str, Enum):
    KVAE = "kvae"
    BAG = "bag"
    SINGLE_LARGE = "single_large"


class EvalConfig(BaseModel):
    """
    Параметры оценки.

    Attributes:
        held_out_fraction: Доля отложенных истинных точек для KDE
        kde_samples: Число сэмплов смеси, по которым строится KDE
        plot_every: Период SVG-графиков в итерациях (0 - только финальный)
        plot_samples: Число сэмплов на графике
    """

    model_config = ConfigDict(frozen=True)

    held_out_fraction: float = Field(default=0.2, gt=0, lt=1)
    kde_samples: PositiveInt = 2000
    plot_every: NonNegativeInt = 0
    plot_samples: PositiveInt = 1000


class ExperimentConfig(BaseModel):
    """
    Описание эксперимента: обучение, данные, оценка и бейзлайн.

    Attributes:
        run_id: Идентификатор запуска (имя каталога по умолчанию)
        train: Гиперпараметры обучения
        data: Истинная смесь гауссиан (взаимоисключающе с dataset_path)
        dataset_path: CSV с готовым набором данных
        n_points: Число синтетических точек
        eval: Параметры оценки
        baseline: kvae, bag или single_large
        output_dir: Каталог запуска (None - GENMIX_RUNS_DIR/run_id)
    """

    model_config = ConfigDict(frozen=True)

    run_id: str = Field(min_length=1, pattern=r"^[A-Za-z0-9_.-]+$")
    train: TrainConfig = Field(default_factory=TrainConfig)
    data: Optional[GmmSpec] = None
    dataset_path: Optional[str] = None
    n_points: PositiveInt = 8000
    eval: EvalConfig = Field(default_factory=EvalConfig)
    baseline: Baseline = Baseline.KVAE
    output_dir: Optional[str] = None

    @model_validator(mode="after")
    def check_data_source(self) -> "ExperimentConfig":
        if (self.data is None) == (self.dataset_path is None):
            raise ValueError("exactly one of data and dataset_path must be set")
        if self.baseline is Baseline.SINGLE_LARGE and self.train.likelihood_backend is LikelihoodBackend.NEAREST_CENTROID:
            raise ValueError("single_large baseline needs the gaussian_vae model")
        return self

    @property
    def n_modes(self) -> Optional[int]:
        return self.data.n_modes if self.data is not None else None

    def resolved(self) -> "ExperimentConfig":
        """
        Конфигурация с ограничениями бейзлайна.

        bag: равные случайные куски N/K, разбиение заморожено, без соревнования.
        single_large: K = 1, скрытые слои по 150 нейронов.
        """
        if self.baseline is Baseline.BAG:
            train: TrainConfig = self.train.model_copy(
                update={"split": SplitMode.BALANCED, "freeze_assignment": True, "min_points": 1}
            )
        elif self.baseline is Baseline.SINGLE_LARGE:
            vae = self.train.vae.model_copy(
                update={"hidden_widths": [SINGLE_LARGE_WIDTH] * len(self.train.vae.hidden_widths)}
            )
            train = self.train.model_copy(update={"k": 1, "vae": vae, "freeze_assignment": True, "min_points": None})
        else:
            return self
        return self.model_copy(update={"train": TrainConfig.model_validate(train.model_dump())})
