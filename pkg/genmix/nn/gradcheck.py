from typing import Callable

import numpy as np

from genmix.nn.models import MlpParams
from genmix.nn.network import backward, forward
from genmix.nn.schemas import MlpSpec

LossFn = Callable[[np.ndarray], tuple[float, np.ndarray]]


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """max |a - n| / max(|a|, |n|, 1e-8) по всем элементам."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    if analytic.size == 0:
        return 0.0
    scale: np.ndarray = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-8)
    return float(np.max(np.abs(analytic - numeric) / scale))


def numeric_gradient(fn: Callable[[], float], arrays: list[np.ndarray], h: float = 1e-5) -> list[np.ndarray]:
    """
    Центральные конечные разности по каждому элементу массивов.

    Массивы возмущаются на месте и восстанавливаются.

    Args:
        fn: Функция без аргументов, читающая текущие значения массивов
        arrays: Массивы параметров
        h: Шаг

    Returns:
        list[np.ndarray]: Численные градиенты той же формы
    """
    grads: list[np.ndarray] = []
    for a in arrays:
        g: np.ndarray = np.zeros_like(a)
        flat: np.ndarray = a.reshape(-1)
        gflat: np.ndarray = g.reshape(-1)
        for idx in range(flat.size):
            original: float = flat[idx]
            flat[idx] = original + h
            plus: float = fn()
            flat[idx] = original - h
            minus: float = fn()
            flat[idx] = original
            gflat[idx] = (plus - minus) / (2.0 * h)
        grads.append(g)
    return grads


def grad_check(spec: MlpSpec, params: MlpParams, loss_fn: LossFn, probe_batch: np.ndarray, h: float = 1e-5) -> float:
    """
    Сравнивает градиент backward с центральными разностями.

    Args:
        spec: Спецификация сети
        params: Параметры (не изменяются)
        loss_fn: outputs -> (loss, dL/doutputs)
        probe_batch: Входной батч
        h: Шаг конечных разностей

    Returns:
        float: Максимальная относительная ошибка по всем параметрам
    """
    probe: MlpParams = params.copy()
    outputs, tape = forward(spec, probe, probe_batch)
    _, output_grad = loss_fn(outputs)
    analytic: list[np.ndarray] = backward(spec, probe, tape, output_grad).arrays()

    def loss_at_current() -> float:
        out, _ = forward(spec, probe, probe_batch)
        return float(loss_fn(out)[0])

    numeric: list[np.ndarray] = numeric_gradient(loss_at_current, probe.arrays(), h)
    return max(relative_error(a, n) for a, n in zip(analytic, numeric))
