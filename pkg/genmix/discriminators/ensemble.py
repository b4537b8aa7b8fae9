import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from genmix.discriminators.schemas import DiscriminatorConfig, ReinitPolicy
from genmix.exceptions import ConfigurationError
from genmix.nn.codec import decode_params, encode_params
from genmix.nn.models import AdamState, Gradients, MlpParams
from genmix.nn.network import backward, forward, init_params
from genmix.nn.optim import adam_step
from genmix.nn.schemas import AdamConfig, MlpSpec, OutputActivation
from genmix.partition.models import LikelihoodTable

logger = logging.getLogger(__name__)

EPS_D: float = 1e-6


@dataclass
class DiscriminatorEnsemble:
    """
    K независимых бинарных классификаторов D_{g_j}: данные (метка 1) против сэмплов модели j (метка 0).

    Attributes:
        spec: Общая архитектура (сигмоидный скалярный выход)
        params: Параметры по компонентам
        states: Состояния Adam по компонентам
        optimizer: Гиперпараметры Adam
        reinit_policy: Политика переинициализации между итерациями
        batch_size: Число реальных (и столько же фальшивых) точек в минибатче
    """

    spec: MlpSpec
    params: list[MlpParams]
    states: list[AdamState]
    optimizer: AdamConfig
    reinit_policy: ReinitPolicy = ReinitPolicy.FRESH_EACH_ROUND
    batch_size: int = 32

    @classmethod
    def create(
        cls,
        k: int,
        d: int,
        config: DiscriminatorConfig,
        optimizer: AdamConfig,
        rngs: list[np.random.Generator],
        batch_size: int = 32,
    ) -> "DiscriminatorEnsemble":
        """
        Создает ансамбль из K классификаторов.

        Args:
            k: Число компонент
            d: Размерность данных
            config: Архитектура и политика
            optimizer: Гиперпараметры Adam
            rngs: По одному генератору на классификатор
            batch_size: Размер минибатча на класс

        Returns:
            DiscriminatorEnsemble: Новый ансамбль
        """
        if k < 1 or len(rngs) != k:
            raise ConfigurationError(f"need K >= 1 and one rng per classifier, got K={k}, {len(rngs)} rngs")
        spec: MlpSpec = MlpSpec.build(
            d, list(config.hidden_widths), 1, config.activation, OutputActivation.SIGMOID
        )
        params: list[MlpParams] = [init_params(spec, rng) for rng in rngs]
        return cls(
            spec=spec,
            params=params,
            states=[AdamState.zeros_like(p, optimizer) for p in params],
            optimizer=optimizer,
            reinit_policy=config.reinit_policy,
            batch_size=batch_size,
        )

    @property
    def k(self) -> int:
        return len(self.params)

    def reset(self, j: int, rng: np.random.Generator) -> None:
        """Новая инициализация классификатора j (политика fresh_each_round)."""
        self.params[j] = init_params(self.spec, rng)
        self.states[j] = AdamState.zeros_like(self.params[j], self.optimizer)

    def prepare_round(self, j: int, rng: np.random.Generator) -> None:
        if self.reinit_policy is ReinitPolicy.FRESH_EACH_ROUND:
            self.reset(j, rng)

    def logits(self, j: int, x: np.ndarray) -> np.ndarray:
        _, tape = forward(self.spec, self.params[j], x)
        return tape.preactivations[-1][:, 0]

    def predict(self, j: int, x: np.ndarray) -> np.ndarray:
        """Сырой выход D_j(x) в (0, 1)."""
        return expit(self.logits(j, x))

    def checkpoint(self, j: int) -> bytes:
        return encode_params(self.spec, self.params[j])

    def restore(self, j: int, blob: bytes) -> None:
        spec, params = decode_params(blob)
        if spec != self.spec:
            raise ConfigurationError("discriminator checkpoint does not match the ensemble architecture")
        self.params[j] = params
        self.states[j] = AdamState.zeros_like(params, self.optimizer)


def bce_loss(spec: MlpSpec, params: MlpParams, x: np.ndarray, y: np.ndarray) -> tuple[float, Gradients]:
    """
    Бинарная кросс-энтропия по логитам и ее градиент.

    Args:
        spec: Архитектура с сигмоидным выходом
        params: Параметры
        x: Батч B x d
        y: Метки 0/1 длины B

    Returns:
        tuple[float, Gradients]: Средний BCE и градиенты
    """
    _, tape = forward(spec, params, x)
    z: np.ndarray = tape.preactivations[-1][:, 0]
    loss: float = float(np.mean(y * np.logaddexp(0.0, -z) + (1.0 - y) * np.logaddexp(0.0, z)))
    grad_z: np.ndarray = ((expit(z) - y) / len(y))[:, None]
    return loss, backward(spec, params, tape, grad_z, wrt_logits=True)


def train_discriminator(
    ensemble: DiscriminatorEnsemble,
    j: int,
    real: np.ndarray,
    fake: np.ndarray,
    epochs: int,
    rng: np.random.Generator,
) -> float:
    """
    Обучает классификатор j отличать данные (1) от сэмплов модели j (0).

    За эпоху каждая из двух выборок перемешивается и циклически дополняется до
    размера большей; минибатч содержит batch_size реальных и batch_size фальшивых точек.

    Args:
        ensemble: Ансамбль
        j: Номер классификатора
        real: Обучающие данные
        fake: Сэмплы модели j
        epochs: Число проходов
        rng: Генератор случайных чисел компоненты

    Returns:
        float: Средний BCE последней эпохи
    """
    real = np.asarray(real, dtype=np.float64)
    fake = np.asarray(fake, dtype=np.float64)
    if len(real) == 0 or len(fake) == 0:
        raise ConfigurationError("discriminator needs nonempty real and fake samples")
    if np.ptp(np.vstack([real, fake]), axis=0).max() == 0.0:
        logger.warning("discriminator %d: real and fake inputs are all identical, density ratio is uninformative", j)

    spec: MlpSpec = ensemble.spec
    params: MlpParams = ensemble.params[j]
    state: AdamState = ensemble.states[j]
    per_class: int = ensemble.batch_size
    length: int = max(len(real), len(fake))
    labels: np.ndarray = np.concatenate([np.ones(per_class), np.zeros(per_class)])
    last: float = 0.0
    for _ in range(epochs):
        real_idx: np.ndarray = _cycled_permutation(len(real), length, rng)
        fake_idx: np.ndarray = _cycled_permutation(len(fake), length, rng)
        total: float = 0.0
        for start in range(0, length, per_class):
            r: np.ndarray = real[real_idx[start:start + per_class]]
            f: np.ndarray = fake[fake_idx[start:start + per_class]]
            y: np.ndarray = labels if len(r) == per_class else np.concatenate([np.ones(len(r)), np.zeros(len(f))])
            loss, grads = bce_loss(spec, params, np.vstack([r, f]), y)
            adam_step(params, grads, state)
            total += loss * len(r)
        last = total / length
    return last


def _cycled_permutation(n: int, length: int, rng: np.random.Generator) -> np.ndarray:
    reps: int = -(-length // n)
    return np.concatenate([rng.permutation(n) for _ in range(reps)])[:length]


def ratio_from_output(d: np.ndarray) -> np.ndarray:
    """(1 - D) / D с D, зажатым в [EPS_D, 1 - EPS_D]."""
    clamped: np.ndarray = np.clip(np.asarray(d, dtype=np.float64), EPS_D, 1.0 - EPS_D)
    return (1.0 - clamped) / clamped


def density_ratio(ensemble: DiscriminatorEnsemble, j: int, x: np.ndarray) -> np.ndarray:
    """
    Оценка dP_{g_j}/dP_X в точках x.

    Args:
        ensemble: Обученный ансамбль
        j: Номер компоненты
        x: Матрица n x d

    Returns:
        np.ndarray: Вектор отношений длины n
    """
    return ratio_from_output(ensemble.predict(j, x))


def likelihood_table(ensemble: DiscriminatorEnsemble, points: np.ndarray) -> LikelihoodTable:
    """
    P_{g_j}(x_i) ~ ratio_j(x_i) / Z_j, Z_j = sum_i ratio_j(x_i) по обучающему набору.

    Args:
        ensemble: Ансамбль, обученный на текущей итерации
        points: Обучающие точки N x d

    Returns:
        LikelihoodTable: Столбцово-стохастическая таблица
    """
    ratios: np.ndarray = np.column_stack([density_ratio(ensemble, j, points) for j in range(ensemble.k)])
    return LikelihoodTable.from_ratios(ratios)
