import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

from pydantic import ValidationError

from genmix.eval.metrics import MetricRow, read_metrics_csv
from genmix.exceptions import CsvParseError
from genmix.experiments.schemas import ExperimentConfig

logger = logging.getLogger(__name__)

COMPARE_METRIC: str = "kde_loglik"
COMPARISON_HEADER: list[str] = ["run_id", "baseline", "n_modes", "kde_loglik", "best"]


@dataclass
class ComparisonRow:
    """
    Строка сравнительной таблицы.

    Attributes:
        run_id: Идентификатор запуска
        baseline: Бейзлайн из config.json (если он есть)
        n_modes: Число истинных мод (None для наборов из CSV)
        kde_loglik: Финальное KDE-правдоподобие
        best: Лучший запуск среди запусков с тем же числом мод
    """

    run_id: str
    baseline: Optional[str]
    n_modes: Optional[int]
    kde_loglik: float
    best: bool = False


def final_metric(rows: Iterable[MetricRow], metric: str) -> Optional[float]:
    """Значение метрики на последней итерации или None."""
    matching: list[MetricRow] = [r for r in rows if r.metric == metric]
    if not matching:
        return None
    return max(matching, key=lambda r: r.round).value


def _read_run(run_dir: Path) -> Optional[ComparisonRow]:
    metrics_path: Path = run_dir / "metrics.csv"
    if not metrics_path.exists():
        logger.warning("%s: no metrics.csv, skipped", run_dir)
        return None
    try:
        rows: list[MetricRow] = read_metrics_csv(metrics_path)
    except CsvParseError as e:
        logger.warning("%s: unreadable metrics.csv (%s), skipped", run_dir, e)
        return None
    value: Optional[float] = final_metric(rows, COMPARE_METRIC)
    if value is None:
        logger.warning("%s: no %s in metrics.csv, skipped", run_dir, COMPARE_METRIC)
        return None

    baseline: Optional[str] = None
    n_modes: Optional[int] = None
    config_path: Path = run_dir / "config.json"
    if config_path.exists():
        try:
            config: ExperimentConfig = ExperimentConfig.model_validate_json(config_path.read_text())
            baseline, n_modes = config.baseline.value, config.n_modes
        except ValidationError:
            logger.warning("%s: config.json does not validate, mode count unknown", run_dir)
    return ComparisonRow(run_id=rows[0].run_id, baseline=baseline, n_modes=n_modes, kde_loglik=value)


def compare(run_dirs: Iterable[Union[str, Path]]) -> list[ComparisonRow]:
    """
    Сравнивает финальное KDE-правдоподобие запусков.

    Строки упорядочены по числу мод, затем по убыванию правдоподобия;
    в каждой группе с одинаковым числом мод отмечается лучший запуск.

    Args:
        run_dirs: Каталоги запусков

    Returns:
        list[ComparisonRow]: По строке на каждый запуск с метриками
    """
    table: list[ComparisonRow] = [row for d in run_dirs if (row := _read_run(Path(d))) is not None]
    table.sort(key=lambda r: (r.n_modes is None, r.n_modes or 0, -r.kde_loglik, r.run_id))
    best: dict[Optional[int], ComparisonRow] = {}
    for row in table:
        best.setdefault(row.n_modes, row)
    for row in best.values():
        row.best = True
    return table


def write_comparison_csv(table: list[ComparisonRow], path: Union[str, Path]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COMPARISON_HEADER)
        for r in table:
            writer.writerow(
                [r.run_id, r.baseline or "", "" if r.n_modes is None else r.n_modes, format(r.kde_loglik, ".17g"), int(r.best)]
            )
    return path


def format_table(table: list[ComparisonRow]) -> str:
    """Выровненная текстовая таблица для консоли, лучшие строки отмечены '*'."""
    cells: list[list[str]] = [["run_id", "baseline", "modes", "kde_loglik", ""]]
    for r in table:
        cells.append(
            [r.run_id, r.baseline or "-", "-" if r.n_modes is None else str(r.n_modes), f"{r.kde_loglik:.4f}", "*" if r.best else ""]
        )
    widths: list[int] = [max(len(row[c]) for row in cells) for c in range(len(cells[0]))]
    return "\n".join("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells)
