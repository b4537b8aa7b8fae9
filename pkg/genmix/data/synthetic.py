import numpy as np

from genmix.data.models import Dataset
from genmix.data.schemas import GmmSpec
from genmix.exceptions import ConfigurationError

SKEW_COEF: float = 0.04
SKEW_SHIFT: float = 100.0 * SKEW_COEF


def skew(points: np.ndarray) -> np.ndarray:
    """x2 <- x2 + 0.04 * x1^2 - 4, x1 без изменений."""
    out: np.ndarray = np.array(points, dtype=np.float64, copy=True)
    out[:, 1] = out[:, 1] + SKEW_COEF * out[:, 0] ** 2 - SKEW_SHIFT
    return out


def unskew(points: np.ndarray) -> np.ndarray:
    """Обратное к skew преобразование."""
    out: np.ndarray = np.array(points, dtype=np.float64, copy=True)
    out[:, 1] = out[:, 1] - SKEW_COEF * out[:, 0] ** 2 + SKEW_SHIFT
    return out


def generate_synthetic(spec: GmmSpec, n: int, rng: np.random.Generator, name: str = "synthetic") -> Dataset:
    """
    Сэмплирует n точек из смеси гауссиан (с искривлением, если spec.skew).

    Args:
        spec: Спецификация смеси
        n: Число точек
        rng: Генератор случайных чисел
        name: Имя набора

    Returns:
        Dataset: Точки и истинные метки мод
    """
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n}")
    means: np.ndarray = np.asarray(spec.means, dtype=np.float64)
    labels: np.ndarray = rng.choice(spec.n_modes, size=n, p=spec.mode_weights())
    points: np.ndarray = means[labels] + np.sqrt(spec.variance) * rng.standard_normal((n, 2))
    if spec.skew:
        points = skew(points)
    return Dataset(points=points, labels=labels, name=name)


def train_test_split(ds: Dataset, held_out_fraction: float, rng: np.random.Generator) -> tuple[Dataset, Dataset]:
    """
    Случайное разбиение на обучающую и отложенную части.

    Args:
        ds: Исходный набор
        held_out_fraction: Доля отложенных точек, 0 < f < 1
        rng: Генератор случайных чисел

    Returns:
        tuple[Dataset, Dataset]: (train, held_out)
    """
    if not 0.0 < held_out_fraction < 1.0:
        raise ConfigurationError(f"held_out_fraction must be in (0, 1), got {held_out_fraction}")
    n_held: int = int(round(ds.n * held_out_fraction))
    if n_held < 1 or n_held >= ds.n:
        raise ConfigurationError(f"dataset of {ds.n} points is too small for a {held_out_fraction} split")
    order: np.ndarray = rng.permutation(ds.n)
    held: np.ndarray = np.sort(order[:n_held])
    train: np.ndarray = np.sort(order[n_held:])
    return ds.subset(train, f"{ds.name}-train"), ds.subset(held, f"{ds.name}-held-out")
