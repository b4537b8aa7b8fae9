import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Callable, Optional, TypeVar, Union

import numpy as np

from genmix.config import settings
from genmix.data.models import Dataset
from genmix.discriminators.ensemble import DiscriminatorEnsemble, likelihood_table, train_discriminator
from genmix.exceptions import ConfigurationError, GenmixError, NumericError, StateCorruptionError, TrainingError
from genmix.generative.degenerate import DegenerateVae
from genmix.generative.factory import build_model
from genmix.generative.models import GenerativeModel
from genmix.partition.assignment import (
    assign,
    balanced_split,
    default_min_points,
    load_balance,
    mixing_weights,
    nearest_centroid_table,
    uniform_init_split,
)
from genmix.partition.models import Assignment, LikelihoodTable
from genmix.trainer.checkpoint import save_checkpoint
from genmix.trainer.models import History, MixtureState, RoundRecord
from genmix.trainer.schemas import LikelihoodBackend, SplitMode, TrainConfig

logger = logging.getLogger(__name__)

T = TypeVar("T")
RoundCallback = Callable[[MixtureState, RoundRecord], None]


class Stream(IntEnum):
    SPLIT = 0
    MODEL_INIT = 1
    PRETRAIN = 2
    TOP_UP = 3
    GENERATOR = 4
    DISC_INIT = 5
    FAKE = 6
    DISCRIMINATOR = 7
    DATA = 8
    EVAL = 9
    PLOT = 10


def stream(seed: int, kind: Stream, component: int = 0, round: int = 0) -> np.random.Generator:
    """Независимый поток случайных чисел для (seed, фаза, компонента, итерация)."""
    return np.random.default_rng(np.random.SeedSequence([seed, int(kind), component, round]))


@dataclass
class InnerStep:
    model: GenerativeModel
    loss: float
    diverged: bool = False


def inner_train_step(model: GenerativeModel, subset: np.ndarray, epochs: int, rng: np.random.Generator) -> InnerStep:
    """
    Обучает одну модель только на ее подмножестве.

    При численном расхождении модель откатывается к состоянию до шага.

    Args:
        model: Модель компоненты
        subset: Непустая матрица обучающих точек
        epochs: Число эпох
        rng: Поток случайных чисел компоненты

    Returns:
        InnerStep: Модель, средняя потеря последней эпохи и признак отката
    """
    if len(subset) == 0:
        raise ConfigurationError("inner_train_step needs a nonempty subset")
    snapshot: bytes = model.checkpoint()
    loss: float = float("nan")
    try:
        for _ in range(epochs):
            loss = model.train_epoch(subset, rng)
    except NumericError as e:
        logger.warning("numeric divergence (%s), restoring the model checkpoint", e)
        model.restore(snapshot)
        return InnerStep(model=model, loss=float("nan"), diverged=True)
    return InnerStep(model=model, loss=loss)


def sample_components(state: MixtureState, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """
    Сэмплы смеси sum_j alpha_j P_{g_j}: компонента ~ Categorical(alpha), затем сэмпл модели.

    Args:
        state: Состояние смеси
        n: Число точек
        rng: Генератор случайных чисел

    Returns:
        tuple[np.ndarray, np.ndarray]: Матрица n x d и номер компоненты каждой точки

    Raises:
        StateCorruptionError: Если веса не образуют распределение
    """
    alpha: np.ndarray = state.weights.alpha
    if alpha.shape != (state.k,) or np.any(alpha < 0) or alpha.sum() <= 0:
        raise StateCorruptionError(f"invalid mixing weights {alpha}")
    alive: np.ndarray = np.flatnonzero(alpha > 0)
    if len(alive) == 1:
        return state.models[alive[0]].sample(n, rng), np.full(n, alive[0], dtype=np.int64)

    components: np.ndarray = rng.choice(state.k, size=n, p=alpha / alpha.sum())
    out: np.ndarray = np.empty((n, state.dim))
    for j in alive:
        rows: np.ndarray = np.flatnonzero(components == j)
        if len(rows):
            out[rows] = state.models[j].sample(len(rows), rng)
    return out, components


def sample_mixture(state: MixtureState, n: int, rng: np.random.Generator) -> np.ndarray:
    """Только точки из sample_components."""
    return sample_components(state, n, rng)[0]


def init_state(config: TrainConfig, data: Dataset) -> MixtureState:
    """
    Начальное состояние: модели, дискриминаторы и случайное разбиение поколения 0.
    При замороженном разбиении дискриминаторы не создаются.

    Raises:
        ConfigurationError: Если N < K
    """
    if data.n < config.k:
        raise ConfigurationError(f"need at least K={config.k} points, got {data.n}")
    models: list[GenerativeModel] = [
        build_model(
            config.model_kind,
            data.d,
            config.vae,
            stream(config.seed, Stream.MODEL_INIT, j),
            config.generator_optimizer,
            config.batch_size,
        )
        for j in range(config.k)
    ]
    ensemble: Optional[DiscriminatorEnsemble] = None
    if config.likelihood_backend is LikelihoodBackend.DISCRIMINATOR and not config.freeze_assignment:
        ensemble = DiscriminatorEnsemble.create(
            config.k,
            data.d,
            config.discriminator,
            config.discriminator_optimizer,
            [stream(config.seed, Stream.DISC_INIT, j) for j in range(config.k)],
            batch_size=config.batch_size,
        )
    split_rng: np.random.Generator = stream(config.seed, Stream.SPLIT)
    if config.split is SplitMode.BALANCED:
        assignment: Assignment = balanced_split(data.n, config.k, split_rng)
    else:
        assignment = uniform_init_split(data.n, config.k, split_rng)
    return MixtureState(
        models=models,
        weights=mixing_weights(assignment, config.k),
        assignment=assignment,
        ensemble=ensemble,
    )


def split_subsets(assignment: Assignment, k: int, min_points: int, rng: np.random.Generator) -> list[np.ndarray]:
    """
    Подмножества начального разбиения; компонента с числом точек меньше min_points
    дополняется случайными чужими точками (таблицы правдоподобий еще нет).
    """
    subsets: list[np.ndarray] = []
    for j in range(k):
        won: np.ndarray = assignment.members(j)
        missing: int = min_points - len(won)
        if missing > 0:
            others: np.ndarray = np.flatnonzero(assignment.owner != j)
            won = np.concatenate([won, rng.choice(others, size=min(missing, len(others)), replace=False)])
        subsets.append(won)
    return subsets


def _for_each_component(
    fn: Callable[[int], T],
    k: int,
    workers: Optional[int],
    round: int,
    history: History,
) -> list[T]:
    def guarded(j: int) -> T:
        try:
            return fn(j)
        except TrainingError:
            raise
        except (GenmixError, ArithmeticError, ValueError) as e:
            raise TrainingError(str(e), round=round, component=j, history=history) from e

    if workers == 1 or k == 1:
        return [guarded(j) for j in range(k)]
    with ThreadPoolExecutor(max_workers=workers or k) as pool:
        return list(pool.map(guarded, range(k)))


def estimate_likelihoods(
    state: MixtureState,
    data: Dataset,
    subsets: list[np.ndarray],
    config: TrainConfig,
    t: int,
    workers: Optional[int],
    history: History,
) -> LikelihoodTable:
    """
    Таблица правдоподобий для назначения: ближайший центроид или обученные дискриминаторы.
    """
    if config.likelihood_backend is LikelihoodBackend.NEAREST_CENTROID:
        if not all(isinstance(m, DegenerateVae) for m in state.models):
            raise ConfigurationError("nearest_centroid backend requires degenerate models")
        centroids: np.ndarray = np.vstack([m.mu for m in state.models])
        return nearest_centroid_table(centroids, data.points)

    ensemble: Optional[DiscriminatorEnsemble] = state.ensemble
    if ensemble is None:
        raise StateCorruptionError("discriminator backend without a discriminator ensemble")

    def train_one(j: int) -> float:
        ensemble.prepare_round(j, stream(config.seed, Stream.DISC_INIT, j, t))
        fake: np.ndarray = state.models[j].sample(len(subsets[j]), stream(config.seed, Stream.FAKE, j, t))
        return train_discriminator(
            ensemble,
            j,
            data.points,
            fake,
            config.disc_epochs_per_round,
            stream(config.seed, Stream.DISCRIMINATOR, j, t),
        )

    _for_each_component(train_one, state.k, workers, t, history)
    return likelihood_table(ensemble, data.points)


def run(
    config: TrainConfig,
    data: Dataset,
    state: Optional[MixtureState] = None,
    on_round: Optional[RoundCallback] = None,
    checkpoint_dir: Optional[Union[str, Path]] = None,
) -> tuple[MixtureState, History]:
    """
    Соревновательное обучение смеси.

    Без начального состояния: случайное разбиение и предобучение на нем, затем
    config.rounds итераций: (a) каждая модель учится на своем подмножестве
    с балансировкой, (b) оценка правдоподобий, (c) назначение и веса смеси.

    Args:
        config: Гиперпараметры
        data: Обучающие данные
        state: Состояние для продолжения (предобучение пропускается)
        on_round: Вызывается после каждой итерации
        checkpoint_dir: Каталог чекпоинтов round_<t>/

    Returns:
        tuple[MixtureState, History]: Итоговое состояние и история итераций

    Raises:
        TrainingError: Ошибка компоненты (с номером итерации и частичной историей)
    """
    min_points: int = config.min_points or default_min_points(data.n, config.k)
    workers: Optional[int] = config.n_threads or settings.max_workers
    history: History = History()

    if state is None:
        state = init_state(config, data)
        if config.pretrain_epochs > 0:
            pretrain_sets: list[np.ndarray] = split_subsets(
                state.assignment, config.k, min_points, stream(config.seed, Stream.TOP_UP)
            )
            logger.info("pretraining %d models for %d epochs", config.k, config.pretrain_epochs)
            _for_each_component(
                lambda j: inner_train_step(
                    state.models[j],
                    data.points[pretrain_sets[j]],
                    config.pretrain_epochs,
                    stream(config.seed, Stream.PRETRAIN, j),
                ),
                config.k,
                workers,
                0,
                history,
            )
    elif state.k != config.k or state.dim != data.d or state.assignment.n != data.n:
        raise ConfigurationError("starting state does not match config.k, data dimension or data size")

    start_round: int = state.t + 1
    for t in range(start_round, start_round + config.rounds):
        started: float = time.perf_counter()
        if state.table is None:
            subsets: list[np.ndarray] = split_subsets(
                state.assignment, config.k, min_points, stream(config.seed, Stream.TOP_UP)
            )
        else:
            subsets = load_balance(state.assignment, state.table, min_points)

        steps: list[InnerStep] = _for_each_component(
            lambda j: inner_train_step(
                state.models[j],
                data.points[subsets[j]],
                config.gen_epochs_per_round,
                stream(config.seed, Stream.GENERATOR, j, t),
            ),
            config.k,
            workers,
            t,
            history,
        )

        if not config.freeze_assignment:
            try:
                table: LikelihoodTable = estimate_likelihoods(state, data, subsets, config, t, workers, history)
            except TrainingError:
                raise
            except GenmixError as e:
                raise TrainingError(str(e), round=t, component=None, history=history) from e
            state.table = table
            state.assignment = assign(table, generation=t)
            state.weights = mixing_weights(state.assignment, config.k)
        state.t = t

        record: RoundRecord = RoundRecord(
            round=t,
            subset_sizes=[len(s) for s in subsets],
            alpha=[float(a) for a in state.weights.alpha],
            mean_loss=[s.loss for s in steps],
            wall_time=time.perf_counter() - started,
            diverged=[j for j, s in enumerate(steps) if s.diverged],
        )
        history.append(record)
        logger.info(
            "round %d: alpha=%s, loss=%s",
            t,
            np.array2string(state.weights.alpha, precision=3),
            np.array2string(np.array(record.mean_loss), precision=3),
        )
        if checkpoint_dir is not None:
            save_checkpoint(state, config, checkpoint_dir)
        if on_round is not None:
            on_round(state, record)

    return state, history
