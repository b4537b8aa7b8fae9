import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

import numpy as np
from sklearn.metrics import adjusted_rand_score
from sklearn.metrics.cluster import contingency_matrix

from genmix.exceptions import ConfigurationError, CsvParseError

METRICS_HEADER: list[str] = ["run_id", "round", "metric", "value"]


@dataclass(frozen=True)
class MetricRow:
    run_id: str
    round: int
    metric: str
    value: float


def cluster_metrics(owner: np.ndarray, true_labels: np.ndarray) -> tuple[float, float]:
    """
    Чистота и скорректированный индекс Рэнда разбиения относительно истинных меток.

    Args:
        owner: Назначение точек компонентам
        true_labels: Истинные метки

    Returns:
        tuple[float, float]: (purity, adjusted_rand_index)
    """
    owner = np.asarray(owner)
    true_labels = np.asarray(true_labels)
    if owner.shape != true_labels.shape:
        raise ConfigurationError(f"assignment length {owner.shape} != labels length {true_labels.shape}")
    table: np.ndarray = contingency_matrix(true_labels, owner)
    purity: float = float(table.max(axis=0).sum() / owner.size)
    return purity, float(adjusted_rand_score(true_labels, owner))


def composition(owner: np.ndarray, true_labels: np.ndarray, k: int) -> np.ndarray:
    """
    Сколько точек каждой истинной моды выиграла каждая компонента.

    Returns:
        np.ndarray: Матрица K x M счетчиков
    """
    n_labels: int = int(np.max(true_labels)) + 1
    counts: np.ndarray = np.zeros((k, n_labels), dtype=np.int64)
    np.add.at(counts, (np.asarray(owner), np.asarray(true_labels)), 1)
    return counts


def write_metrics_csv(rows: Iterable[MetricRow], path: Union[str, Path]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRICS_HEADER)
        for row in rows:
            writer.writerow([row.run_id, row.round, row.metric, format(row.value, ".17g")])
    return path


def read_metrics_csv(path: Union[str, Path]) -> list[MetricRow]:
    """
    Читает metrics.csv.

    Raises:
        CsvParseError: Некорректный заголовок или строка
    """
    path = Path(path)
    rows: list[MetricRow] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        if next(reader, None) != METRICS_HEADER:
            raise CsvParseError(f"expected header {','.join(METRICS_HEADER)}", line=1)
        for record in reader:
            try:
                run_id, round_, metric, value = record
                rows.append(MetricRow(run_id=run_id, round=int(round_), metric=metric, value=float(value)))
            except ValueError as e:
                raise CsvParseError(str(e), line=reader.line_num) from e
    return rows
