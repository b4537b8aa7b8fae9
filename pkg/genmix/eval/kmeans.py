import logging
from dataclasses import dataclass, field

import numpy as np

from genmix.exceptions import PreconditionError
from genmix.partition.assignment import squared_distances

logger = logging.getLogger(__name__)


@dataclass
class LloydStep:
    """
    Одна итерация Lloyd.

    Attributes:
        centroids: Центроиды, по которым выполнено назначение
        owner: Полученное назначение
        objective: Сумма квадратов расстояний до своих центроидов
        empty: Номера кластеров, оставшихся пустыми
    """

    centroids: np.ndarray
    owner: np.ndarray
    objective: float
    empty: list[int] = field(default_factory=list)


@dataclass
class LloydResult:
    centroids: np.ndarray
    owner: np.ndarray
    iters_run: int
    trajectory: list[LloydStep]

    @property
    def had_empty_cluster(self) -> bool:
        return any(step.empty for step in self.trajectory)


def lloyd(points: np.ndarray, k: int, init_centroids: np.ndarray, max_iters: int) -> LloydResult:
    """
    Алгоритм Lloyd: назначение ближайшему центроиду (при равенстве - меньший индекс),
    затем пересчет центроидов как средних. Пустой кластер сохраняет прежний центроид.

    Args:
        points: Данные N x d
        k: Число кластеров
        init_centroids: Различные начальные центроиды K x d
        max_iters: Максимальное число итераций

    Returns:
        LloydResult: Итоговые центроиды (средние последнего назначения), назначение,
            число итераций и траектория

    Raises:
        PreconditionError: Если начальные центроиды не различны или их не K
    """
    points = np.asarray(points, dtype=np.float64)
    centroids: np.ndarray = np.array(init_centroids, dtype=np.float64, copy=True)
    if centroids.shape != (k, points.shape[1]):
        raise PreconditionError(f"expected {k} centroids of dim {points.shape[1]}, got {centroids.shape}")
    if len(np.unique(centroids, axis=0)) != k:
        raise PreconditionError("initial centroids must be distinct")

    trajectory: list[LloydStep] = []
    owner: np.ndarray = np.zeros(len(points), dtype=np.int64)
    previous: float = np.inf
    for _ in range(max_iters):
        distances: np.ndarray = squared_distances(points, centroids)
        owner = np.argmin(distances, axis=1)
        objective: float = float(distances[np.arange(len(points)), owner].sum())
        if objective > previous * (1.0 + 1e-12):
            logger.warning("Lloyd objective increased from %.12g to %.12g", previous, objective)
        previous = objective

        updated: np.ndarray = centroids.copy()
        empty: list[int] = []
        for j in range(k):
            members: np.ndarray = owner == j
            if members.any():
                updated[j] = points[members].mean(axis=0)
            else:
                empty.append(j)
        trajectory.append(LloydStep(centroids=centroids, owner=owner, objective=objective, empty=empty))
        if np.array_equal(updated, centroids):
            break
        centroids = updated
    return LloydResult(centroids=centroids, owner=owner, iters_run=len(trajectory), trajectory=trajectory)
