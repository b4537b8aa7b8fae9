import csv
import math
from pathlib import Path
from typing import Optional

import numpy as np

from genmix.api.schemas import HistoryRow
from genmix.exceptions import CsvParseError, UsageError
from genmix.experiments.compare import ComparisonRow, compare
from genmix.trainer.checkpoint import LoadedCheckpoint, load_checkpoint, round_dir
from genmix.trainer.loop import sample_mixture


def list_run_dirs(root: Path) -> list[Path]:
    """Подкаталоги root, содержащие metrics.csv."""
    if not root.is_dir():
        return []
    return sorted(p for p in root.iterdir() if (p / "metrics.csv").exists())


def get_run_dir(root: Path, run_id: str) -> Optional[Path]:
    """
    Каталог запуска по идентификатору.

    Args:
        root: Корень запусков
        run_id: Имя каталога

    Returns:
        Path | None: Каталог или None, если запуска нет
    """
    if run_id in (".", ".."):
        return None
    candidate: Path = root / run_id
    if candidate.name != run_id or not candidate.is_dir():
        return None
    return candidate


def summarize_runs(root: Path) -> list[ComparisonRow]:
    return compare(list_run_dirs(root))


def read_history(run_dir: Path) -> list[HistoryRow]:
    """
    Читает history.csv запуска.

    Raises:
        CsvParseError: Некорректная строка
    """
    path: Path = run_dir / "history.csv"
    if not path.exists():
        return []
    rows: list[HistoryRow] = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        for record in reader:
            try:
                loss: float = float(record["mean_loss"])
                rows.append(
                    HistoryRow(
                        round=int(record["round"]),
                        component=int(record["component"]),
                        subset_size=int(record["subset_size"]),
                        alpha=float(record["alpha"]),
                        mean_loss=None if math.isnan(loss) else loss,
                        diverged=record["diverged"] == "1",
                    )
                )
            except (KeyError, TypeError, ValueError) as e:
                raise CsvParseError(str(e), line=reader.line_num) from e
    return rows


def sample_run(run_dir: Path, n: int, seed: int, round: Optional[int] = None) -> tuple[int, np.ndarray]:
    """
    Сэмплы смеси из чекпоинта запуска.

    Args:
        run_dir: Каталог запуска
        n: Число точек
        seed: Зерно генератора
        round: Итерация (None - последняя сохраненная)

    Returns:
        tuple[int, np.ndarray]: Номер итерации и матрица n x d

    Raises:
        UsageError: Чекпоинта нет
    """
    root: Path = run_dir / "checkpoints"
    path: Path = root if round is None else round_dir(root, round)
    if not path.is_dir():
        raise UsageError(f"no checkpoint for round {round} in {run_dir.name}")
    loaded: LoadedCheckpoint = load_checkpoint(path)
    return loaded.t, sample_mixture(loaded.to_state(), n, np.random.default_rng(seed))
