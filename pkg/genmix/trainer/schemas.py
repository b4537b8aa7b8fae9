import hashlib
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveInt, model_validator

from genmix.discriminators.schemas import DiscriminatorConfig
from genmix.generative.schemas import ModelKind, VaeConfig
from genmix.nn.schemas import AdamConfig


class LikelihoodBackend(str, Enum):
    DISCRIMINATOR = "discriminator"
    NEAREST_CENTROID = "nearest_centroid"


class SplitMode(str, Enum):
    IID = "iid"
    BALANCED = "balanced"


class TrainConfig(BaseModel):
    """
    Гиперпараметры обучения смеси.

    Attributes:
        k: Число компонент K
        rounds: Число внешних итераций T
        pretrain_epochs: Эпохи предобучения на начальном случайном разбиении
        gen_epochs_per_round: Эпохи обучения каждой модели за итерацию
        disc_epochs_per_round: Эпохи обучения каждого дискриминатора за итерацию
        batch_size: Размер минибатча
        generator_optimizer: Adam для генеративных моделей
        discriminator_optimizer: Adam для дискриминаторов
        min_points: Порог балансировки (None - max(1, ceil(N / 4K)))
        seed: Зерно всех случайных потоков
        likelihood_backend: Оценка правдоподобий (дискриминаторы или ближайший центроид)
        model_kind: Вид компонент
        vae: Архитектура VAE
        discriminator: Архитектура и политика дискриминаторов
        split: Начальное разбиение (iid или равные куски)
        freeze_assignment: Не пересчитывать разбиение (bag-бейзлайн)
        n_threads: Число потоков (None - из настроек GENMIX_THREADS)
    """

    model_config = ConfigDict(frozen=True)

    k: PositiveInt = 3
    rounds: PositiveInt = 10
    pretrain_epochs: NonNegativeInt = 10
    gen_epochs_per_round: PositiveInt = 10
    disc_epochs_per_round: PositiveInt = 2
    batch_size: PositiveInt = 32
    generator_optimizer: AdamConfig = Field(default_factory=AdamConfig)
    discriminator_optimizer: AdamConfig = Field(default_factory=AdamConfig)
    min_points: Optional[PositiveInt] = None
    seed: NonNegativeInt = 0
    likelihood_backend: LikelihoodBackend = LikelihoodBackend.DISCRIMINATOR
    model_kind: ModelKind = ModelKind.GAUSSIAN_VAE
    vae: VaeConfig = Field(default_factory=VaeConfig)
    discriminator: DiscriminatorConfig = Field(default_factory=DiscriminatorConfig)
    split: SplitMode = SplitMode.IID
    freeze_assignment: bool = False
    n_threads: Optional[PositiveInt] = None

    @model_validator(mode="after")
    def check_backend(self) -> "TrainConfig":
        if self.likelihood_backend is LikelihoodBackend.NEAREST_CENTROID and self.model_kind is not ModelKind.DEGENERATE:
            raise ValueError("nearest_centroid backend requires degenerate models")
        return self

    def config_hash(self) -> str:
        return hashlib.sha256(self.model_dump_json().encode("utf-8")).hexdigest()
