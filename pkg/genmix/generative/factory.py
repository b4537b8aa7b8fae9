import numpy as np

from genmix.generative.checkpoint import read_kind
from genmix.generative.degenerate import DegenerateVae
from genmix.generative.models import GenerativeModel
from genmix.generative.schemas import ModelKind, VaeConfig
from genmix.generative.vae import GaussianVae
from genmix.nn.schemas import AdamConfig


def build_model(
    kind: ModelKind,
    d: int,
    config: VaeConfig,
    rng: np.random.Generator,
    optimizer: AdamConfig,
    batch_size: int,
) -> GenerativeModel:
    """
    Создает компоненту смеси заданного вида.

    Args:
        kind: Вид модели
        d: Размерность данных
        config: Архитектура VAE (для вырожденной модели не используется)
        rng: Генератор для инициализации весов
        optimizer: Гиперпараметры Adam
        batch_size: Размер минибатча

    Returns:
        GenerativeModel: Новая модель
    """
    if kind is ModelKind.DEGENERATE:
        return DegenerateVae.create(d)
    return GaussianVae.create(d, config, rng, optimizer=optimizer, batch_size=batch_size)


def encode_model(model: GenerativeModel) -> bytes:
    return model.checkpoint()


def decode_model(blob: bytes, optimizer: AdamConfig = AdamConfig(), batch_size: int = 32) -> GenerativeModel:
    """Восстанавливает модель из контейнера по его тегу."""
    if read_kind(blob) is ModelKind.DEGENERATE:
        return DegenerateVae.from_checkpoint(blob)
    return GaussianVae.from_checkpoint(blob, optimizer=optimizer, batch_size=batch_size)
