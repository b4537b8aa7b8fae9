import numpy as np

from genmix.exceptions import BalancingError, ConfigurationError
from genmix.generative.checkpoint import decode_container, encode_container
from genmix.generative.models import GenerativeModel
from genmix.generative.schemas import ModelKind
from genmix.nn.codec import decode_params, encode_params
from genmix.nn.models import MlpParams
from genmix.nn.schemas import MlpSpec


class DegenerateVae(GenerativeModel):
    """
    Вырожденный VAE x = mu + eps: постоянный энкодер и тождественный декодер.

    Обучение сводится к оценке центроида mu, поэтому смесь таких моделей
    с выбором ближайшего центроида совпадает с k-means.
    """

    kind = ModelKind.DEGENERATE

    def __init__(self, mu: np.ndarray) -> None:
        mu = np.asarray(mu, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(mu)):
            raise ConfigurationError("centroid must be finite")
        self.mu = mu

    @classmethod
    def create(cls, d: int) -> "DegenerateVae":
        return cls(np.zeros(d))

    @property
    def dim(self) -> int:
        return self.mu.shape[0]

    def train_epoch(self, subset: np.ndarray, rng: np.random.Generator) -> float:
        degenerate_train_epoch(self, subset)
        diff: np.ndarray = subset - self.mu
        return float(0.5 * np.mean(np.sum(diff * diff, axis=1)))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return np.tile(self.mu, (n, 1))

    def _decoder(self) -> tuple[MlpSpec, MlpParams]:
        # a zero-weight linear layer whose bias is the centroid
        spec: MlpSpec = MlpSpec(layer_widths=[1, self.dim])
        return spec, MlpParams(weights=[np.zeros((1, self.dim))], biases=[self.mu.copy()])

    def checkpoint(self) -> bytes:
        return encode_container(self.kind.value, {"decoder": encode_params(*self._decoder())})

    def restore(self, blob: bytes) -> None:
        kind, entries = decode_container(blob)
        if kind != self.kind.value:
            raise ConfigurationError(f"cannot restore {kind!r} checkpoint into {self.kind.value!r}")
        _, params = decode_params(entries["decoder"])
        self.mu = params.biases[0].copy()

    @classmethod
    def from_checkpoint(cls, blob: bytes) -> "DegenerateVae":
        model: DegenerateVae = cls(np.zeros(1))
        model.restore(blob)
        return model


def degenerate_train_epoch(model: DegenerateVae, subset: np.ndarray) -> np.ndarray:
    """
    Точный минимизатор 1/2 ||x - mu||^2 по подмножеству: среднее строк.

    Args:
        model: Вырожденная модель
        subset: Непустая матрица n x d

    Returns:
        np.ndarray: Новый центроид

    Raises:
        BalancingError: Если подмножество пусто
    """
    subset = np.asarray(subset, dtype=np.float64)
    if len(subset) == 0:
        raise BalancingError("degenerate model received an empty subset")
    model.mu = subset.mean(axis=0)
    return model.mu
