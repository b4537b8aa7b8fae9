from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from genmix.exceptions import ConfigurationError, NumericError

CHUNK_SIZE: int = 256


def scott_bandwidth(samples: np.ndarray) -> float:
    """
    Правило Скотта h = m^(-1/(d+4)) * sigma, sigma - среднеквадратичное
    по координатам стандартное отклонение сэмплов.
    """
    samples = np.asarray(samples, dtype=np.float64)
    m, d = samples.shape
    if m < 2:
        raise ConfigurationError("Scott's rule needs at least two samples")
    sigma: float = float(np.sqrt(np.mean(np.var(samples, axis=0, ddof=1))))
    if sigma <= 0:
        raise ConfigurationError("samples have zero spread, bandwidth undefined")
    return m ** (-1.0 / (d + 4)) * sigma


def _chunk_loglik(samples: np.ndarray, points: np.ndarray, bandwidth: float) -> np.ndarray:
    diff: np.ndarray = points[:, None, :] - samples[None, :, :]
    exponent: np.ndarray = -0.5 * np.sum(diff * diff, axis=2) / bandwidth ** 2
    return logsumexp(exponent, axis=1)


def kde_log_likelihood(
    model_samples: np.ndarray,
    eval_points: np.ndarray,
    bandwidth: float,
    max_workers: Optional[int] = None,
) -> float:
    """
    Средний логарифм гауссовской KDE, построенной по сэмплам модели, в точках данных.

    log p(x) = logsumexp_k(-||x - s_k||^2 / (2 h^2)) - log m - d/2 log(2 pi h^2)

    Args:
        model_samples: Сэмплы модели m x d
        eval_points: Точки оценки n x d
        bandwidth: Ширина ядра h > 0
        max_workers: Число потоков для обработки блоков точек

    Returns:
        float: Среднее логарифмическое правдоподобие

    Raises:
        NumericError: Нечисловой результат
    """
    samples: np.ndarray = np.asarray(model_samples, dtype=np.float64)
    points: np.ndarray = np.asarray(eval_points, dtype=np.float64)
    if len(samples) < 1 or len(points) < 1:
        raise ConfigurationError("KDE needs at least one sample and one evaluation point")
    if samples.shape[1] != points.shape[1]:
        raise ConfigurationError(f"dimension mismatch: samples {samples.shape[1]}, points {points.shape[1]}")
    if bandwidth <= 0:
        raise ConfigurationError(f"bandwidth must be > 0, got {bandwidth}")

    m, d = samples.shape
    chunks: list[np.ndarray] = [points[i:i + CHUNK_SIZE] for i in range(0, len(points), CHUNK_SIZE)]
    if max_workers == 1 or len(chunks) == 1:
        parts: list[np.ndarray] = [_chunk_loglik(samples, c, bandwidth) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            parts = list(pool.map(lambda c: _chunk_loglik(samples, c, bandwidth), chunks))

    log_norm: float = np.log(m) + 0.5 * d * np.log(2.0 * np.pi * bandwidth ** 2)
    value: float = float(np.mean(np.concatenate(parts)) - log_norm)
    if not np.isfinite(value):
        raise NumericError("non-finite KDE log-likelihood")
    return value
