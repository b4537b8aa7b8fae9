import numpy as np

from genmix.exceptions import ConfigurationError, NumericError
from genmix.nn.models import AdamState, Gradients, MlpParams


def adam_step(params: MlpParams, grads: Gradients, state: AdamState) -> tuple[MlpParams, AdamState]:
    """
    Один шаг Adam с коррекцией смещения моментов (обновляет params и state на месте).

    Моменты затухают всегда. Если все градиенты нулевые, параметры не меняются;
    иначе обычный шаг Adam по всем элементам. Градиенты проверяются до любых изменений.

    Args:
        params: Параметры сети
        grads: Градиенты той же формы
        state: Состояние оптимизатора, state.t - число выполненных шагов

    Returns:
        tuple[MlpParams, AdamState]: Обновленные параметры и состояние

    Raises:
        NumericError: Если градиент содержит NaN/inf (с индексом слоя)
    """
    arrays: list[np.ndarray] = params.arrays()
    grad_arrays: list[np.ndarray] = grads.arrays()
    if len(arrays) != len(grad_arrays) or len(arrays) != len(state.m):
        raise ConfigurationError("params, grads and optimizer state disagree on layer count")

    for k, g in enumerate(grad_arrays):
        if g.shape != arrays[k].shape:
            raise ConfigurationError(f"layer {k // 2}: grad shape {g.shape} != param shape {arrays[k].shape}")
        if not np.all(np.isfinite(g)):
            kind: str = "weights" if k % 2 == 0 else "biases"
            raise NumericError(f"non-finite gradient in layer {k // 2} {kind}", layer=k // 2)

    moving: bool = any(np.any(g != 0.0) for g in grad_arrays)
    cfg = state.config
    state.t += 1
    bc1: float = 1.0 - cfg.beta1 ** state.t
    bc2: float = 1.0 - cfg.beta2 ** state.t

    for k, g in enumerate(grad_arrays):
        m: np.ndarray = state.m[k]
        v: np.ndarray = state.v[k]
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * (g * g)
        if moving:
            arrays[k] -= cfg.lr * (m / bc1) / (np.sqrt(v / bc2) + cfg.eps)

    params.touch()
    if not params.is_finite():
        raise NumericError("non-finite parameters after Adam step")
    return params, state
