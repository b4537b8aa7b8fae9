import csv
import math
from pathlib import Path
from typing import Union

import numpy as np
from scipy.special import softmax

from genmix.exceptions import ConfigurationError, CsvParseError
from genmix.partition.models import Assignment, LikelihoodTable, MixingWeights, TableKind


def assign(table: LikelihoodTable, generation: int = 0) -> Assignment:
    """
    Назначает каждую точку модели максимального правдоподобия (при равенстве - с меньшим индексом).

    Args:
        table: Таблица правдоподобий
        generation: Номер итерации для нового разбиения

    Returns:
        Assignment: Новое разбиение
    """
    # np.argmax returns the first maximum
    return Assignment(owner=np.argmax(table.values, axis=1), generation=generation)


def mixing_weights(a: Assignment, k: int) -> MixingWeights:
    """
    Веса смеси как доли выигранных точек.

    Args:
        a: Разбиение
        k: Число компонент

    Returns:
        MixingWeights: alpha_j = |{i: owner_i = j}| / N
    """
    if a.n < 1:
        raise ConfigurationError("mixing weights need at least one point")
    a.validate(k)
    return MixingWeights(alpha=np.bincount(a.owner, minlength=k) / a.n)


def uniform_init_split(n: int, k: int, rng: np.random.Generator) -> Assignment:
    """
    Случайное равномерное разбиение: каждая точка независимо получает компоненту из [0, K).

    Raises:
        ConfigurationError: Если N < K
    """
    if k < 1 or n < k:
        raise ConfigurationError(f"need N >= K >= 1, got N={n}, K={k}")
    return Assignment(owner=rng.integers(0, k, size=n), generation=0)


def balanced_split(n: int, k: int, rng: np.random.Generator) -> Assignment:
    """
    Случайная перестановка, разрезанная на K кусков размера floor(N/K) или ceil(N/K).

    Raises:
        ConfigurationError: Если N < K
    """
    if k < 1 or n < k:
        raise ConfigurationError(f"need N >= K >= 1, got N={n}, K={k}")
    owner: np.ndarray = np.empty(n, dtype=np.int64)
    for j, chunk in enumerate(np.array_split(rng.permutation(n), k)):
        owner[chunk] = j
    return Assignment(owner=owner, generation=0)


def default_min_points(n: int, k: int) -> int:
    return max(1, math.ceil(n / (4 * k)))


def load_balance(a: Assignment, table: LikelihoodTable, min_points: int) -> list[np.ndarray]:
    """
    Обучающие индексы компонент с балансировкой нагрузки.

    Компонента получает все выигранные точки; если их меньше min_points,
    список дополняется лучшими по столбцу j точками среди невыигранных.
    Веса смеси при этом не меняются.

    Args:
        a: Текущее разбиение
        table: Таблица правдоподобий
        min_points: Минимальный размер обучающего подмножества

    Returns:
        list[np.ndarray]: Для каждой компоненты индексы ее обучающих точек
    """
    if min_points < 1:
        raise ConfigurationError(f"min_points must be >= 1, got {min_points}")
    if table.n != a.n:
        raise ConfigurationError(f"table has {table.n} rows, assignment {a.n} points")
    subsets: list[np.ndarray] = []
    for j in range(table.k):
        won: np.ndarray = a.members(j)
        missing: int = min_points - len(won)
        if missing > 0:
            candidates: np.ndarray = np.flatnonzero(a.owner != j)
            order: np.ndarray = np.argsort(-table.values[candidates, j], kind="stable")
            won = np.concatenate([won, candidates[order[:missing]]])
        subsets.append(won)
    return subsets


def squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Матрица N x K квадратов евклидовых расстояний."""
    diff: np.ndarray = points[:, None, :] - centroids[None, :, :]
    return np.sum(diff * diff, axis=2)


def nearest_centroid_table(centroids: np.ndarray, points: np.ndarray) -> LikelihoodTable:
    """
    Таблица softmax_j(-1/2 ||x_i - mu_j||^2): максимум по строке - ближайший центроид.

    Args:
        centroids: Матрица K x d
        points: Матрица N x d

    Returns:
        LikelihoodTable: Строчно-стохастическая таблица
    """
    centroids = np.asarray(centroids, dtype=np.float64)
    if not np.all(np.isfinite(centroids)):
        raise ConfigurationError("centroids must be finite")
    values: np.ndarray = softmax(-0.5 * squared_distances(points, centroids), axis=1)
    return LikelihoodTable(values=values, normalizers=np.ones(len(centroids)), kind=TableKind.ROW)


def save_assignment_csv(a: Assignment, path: Union[str, Path]) -> Path:
    """Записывает разбиение в CSV point_index,owner,generation."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["point_index", "owner", "generation"])
        for i, owner in enumerate(a.owner):
            writer.writerow([i, int(owner), a.generation])
    return path


def load_assignment_csv(path: Union[str, Path]) -> Assignment:
    path = Path(path)
    owners: list[int] = []
    generation: int = 0
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        if next(reader, None) != ["point_index", "owner", "generation"]:
            raise CsvParseError("expected header point_index,owner,generation", line=1)
        for row in reader:
            try:
                index, owner, generation = (int(v) for v in row)
            except ValueError as e:
                raise CsvParseError(str(e), line=reader.line_num) from e
            if index != len(owners):
                raise CsvParseError(f"expected point_index {len(owners)}, got {index}", line=reader.line_num)
            owners.append(owner)
    return Assignment(owner=np.array(owners, dtype=np.int64), generation=generation)
