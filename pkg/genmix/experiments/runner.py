import csv
import hashlib
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
from pydantic import ValidationError

from genmix.config import settings
from genmix.data.io import load_csv
from genmix.data.models import Dataset
from genmix.data.synthetic import generate_synthetic, train_test_split
from genmix.eval.kde import kde_log_likelihood, scott_bandwidth
from genmix.eval.metrics import MetricRow, cluster_metrics, composition, write_metrics_csv
from genmix.exceptions import ConfigurationError, GenmixError, TrainingError
from genmix.experiments.plots import write_scatter_svg
from genmix.experiments.schemas import ExperimentConfig
from genmix.trainer.loop import Stream, run, sample_components, sample_mixture, stream
from genmix.trainer.models import History, MixtureState, RoundRecord

logger = logging.getLogger(__name__)

EXIT_OK: int = 0
EXIT_RUN_FAILED: int = 1
EXIT_INVALID_CONFIG: int = 2


def format_validation_error(error: ValidationError) -> str:
    """Сообщения pydantic в виде 'поле.поле: текст' через '; '."""
    return "; ".join(f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in error.errors())


def load_config(path: Union[str, Path], seed: Optional[int] = None) -> ExperimentConfig:
    """
    Читает JSON-конфигурацию эксперимента и применяет ограничения бейзлайна.

    Args:
        path: Путь к JSON
        seed: Переопределение train.seed

    Returns:
        ExperimentConfig: Итоговая конфигурация

    Raises:
        ConfigurationError: Файл не читается или не проходит валидацию
    """
    path = Path(path)
    try:
        text: str = path.read_text()
    except OSError as e:
        raise ConfigurationError(f"cannot read {path}: {e}") from e
    try:
        config: ExperimentConfig = ExperimentConfig.model_validate_json(text)
        if seed is not None:
            config = ExperimentConfig.model_validate(
                {**config.model_dump(), "train": {**config.train.model_dump(), "seed": seed}}
            )
        return config.resolved()
    except ValidationError as e:
        raise ConfigurationError(format_validation_error(e)) from e


def load_dataset(config: ExperimentConfig) -> Dataset:
    if config.dataset_path is not None:
        return load_csv(config.dataset_path, name=config.run_id)
    return generate_synthetic(config.data, config.n_points, stream(config.train.seed, Stream.DATA), name=config.run_id)


def inputs_digest(config_text: str, data: Dataset) -> str:
    """Строки '<sha256>  <имя>' для конфигурации и данных, как у sha256sum."""
    data_hash = hashlib.sha256(np.ascontiguousarray(data.points, dtype="<f8").tobytes())
    if data.labels is not None:
        data_hash.update(np.ascontiguousarray(data.labels, dtype="<i8").tobytes())
    config_hash: str = hashlib.sha256(config_text.encode("utf-8")).hexdigest()
    return f"{config_hash}  config.json\n{data_hash.hexdigest()}  dataset\n"


def write_composition_csv(counts: np.ndarray, path: Union[str, Path]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["component", *[f"label_{m}" for m in range(counts.shape[1])]])
        for j, row in enumerate(counts):
            writer.writerow([j, *[int(c) for c in row]])
    return path


class ExperimentRun:
    """
    Один запуск эксперимента: обучение, метрики по итерациям, графики и артефакты.

    Attributes:
        config: Итоговая конфигурация
        out: Каталог запуска
        train: Обучающая часть данных
        held_out: Отложенная часть для KDE
    """

    def __init__(self, config: ExperimentConfig, out: Path, train: Dataset, held_out: Dataset) -> None:
        self.config = config
        self.out = out
        self.train = train
        self.held_out = held_out
        self.rows: list[MetricRow] = []
        self.history: History = History()

    def plot(self, state: MixtureState, t: int) -> Path:
        samples, components = sample_components(
            state, self.config.eval.plot_samples, stream(self.config.train.seed, Stream.PLOT, 0, t)
        )
        return write_scatter_svg(
            self.out / f"samples_round_{t}.svg",
            self.train.points,
            samples,
            components,
            title=f"{self.config.run_id}, round {t}",
        )

    def on_round(self, state: MixtureState, record: RoundRecord) -> None:
        self.history.append(record)
        if self.train.labels is not None:
            purity, ari = cluster_metrics(state.assignment.owner, self.train.labels)
            record.metrics.update(purity=purity, ari=ari)
        for name, value in record.metrics.items():
            self.rows.append(MetricRow(run_id=self.config.run_id, round=record.round, metric=name, value=value))
        every: int = self.config.eval.plot_every
        if every and record.round % every == 0:
            self.plot(state, record.round)

    def evaluate(self, state: MixtureState) -> float:
        """Финальное KDE-правдоподобие отложенных точек под сэмплами смеси."""
        samples: np.ndarray = sample_mixture(
            state, self.config.eval.kde_samples, stream(self.config.train.seed, Stream.EVAL)
        )
        bandwidth: float = scott_bandwidth(samples)
        loglik: float = kde_log_likelihood(samples, self.held_out.points, bandwidth, max_workers=settings.max_workers)
        for name, value in (("kde_loglik", loglik), ("kde_bandwidth", bandwidth)):
            self.rows.append(MetricRow(run_id=self.config.run_id, round=state.t, metric=name, value=value))
        if self.train.labels is not None:
            write_composition_csv(
                composition(state.assignment.owner, self.train.labels, state.k), self.out / "composition.csv"
            )
        return loglik

    def flush(self) -> None:
        write_metrics_csv(self.rows, self.out / "metrics.csv")
        self.history.write_csv(self.out / "history.csv")
        self.history.write_timings_csv(self.out / "timings.csv")


def run_experiment(
    config_path: Union[str, Path],
    seed: Optional[int] = None,
    out: Optional[Union[str, Path]] = None,
    dry_run: bool = False,
) -> int:
    """
    Запускает эксперимент из JSON-конфигурации.

    Пишет config.json, inputs.sha256, metrics.csv, history.csv, timings.csv,
    composition.csv, checkpoints/ и samples_round_<t>.svg.

    Args:
        config_path: Путь к конфигурации
        seed: Переопределение зерна
        out: Каталог запуска (по умолчанию из конфигурации или GENMIX_RUNS_DIR/run_id)
        dry_run: Только проверить конфигурацию и данные, ничего не записывая

    Returns:
        int: 0 - успех, 1 - ошибка во время обучения, 2 - некорректная конфигурация
    """
    try:
        config: ExperimentConfig = load_config(config_path, seed)
        data: Dataset = load_dataset(config)
        train, held_out = train_test_split(
            data, config.eval.held_out_fraction, stream(config.train.seed, Stream.DATA, 1)
        )
    except GenmixError as e:
        logger.error("invalid experiment config %s: %s", config_path, e)
        return EXIT_INVALID_CONFIG

    if dry_run:
        logger.info("config %s is valid (%d points, baseline %s)", config_path, data.n, config.baseline.value)
        return EXIT_OK

    run_dir: Path = Path(out or config.output_dir or Path(settings.GENMIX_RUNS_DIR) / config.run_id)
    run_dir.mkdir(parents=True, exist_ok=True)
    config_text: str = config.model_dump_json(indent=2)
    (run_dir / "config.json").write_text(config_text + "\n")
    (run_dir / "inputs.sha256").write_text(inputs_digest(config_text, data))
    logger.info("run %s (%s) -> %s", config.run_id, config.baseline.value, run_dir)

    experiment: ExperimentRun = ExperimentRun(config, run_dir, train, held_out)
    try:
        state, _ = run(config.train, train, on_round=experiment.on_round, checkpoint_dir=run_dir / "checkpoints")
        loglik: float = experiment.evaluate(state)
        experiment.plot(state, state.t)
    except TrainingError as e:
        logger.error("run %s failed: %s", config.run_id, e)
        experiment.flush()
        return EXIT_RUN_FAILED
    except GenmixError as e:
        logger.error("run %s failed during evaluation: %s", config.run_id, e)
        experiment.flush()
        return EXIT_RUN_FAILED

    experiment.flush()
    logger.info("run %s finished: kde_loglik=%.4f", config.run_id, loglik)
    return EXIT_OK
