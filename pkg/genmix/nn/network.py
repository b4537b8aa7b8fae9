import numpy as np
from scipy.special import expit

from genmix.exceptions import ConfigurationError, NumericError, UsageError
from genmix.nn.models import Gradients, MlpParams, Tape
from genmix.nn.schemas import Activation, MlpSpec, OutputActivation


def init_params(spec: MlpSpec, rng: np.random.Generator) -> MlpParams:
    """
    Инициализирует веса равномерно в [-sqrt(6/(fan_in+fan_out)), +sqrt(...)], смещения нулями.

    Args:
        spec: Спецификация сети
        rng: Генератор случайных чисел

    Returns:
        MlpParams: Новые параметры
    """
    weights: list[np.ndarray] = []
    biases: list[np.ndarray] = []
    for fan_in, fan_out in zip(spec.layer_widths[:-1], spec.layer_widths[1:]):
        limit: float = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpParams(weights=weights, biases=biases)


def check_shapes(spec: MlpSpec, params: MlpParams) -> None:
    if len(params.weights) != spec.n_layers or len(params.biases) != spec.n_layers:
        raise ConfigurationError(f"expected {spec.n_layers} layers, params have {len(params.weights)}")
    for i, (fan_in, fan_out) in enumerate(zip(spec.layer_widths[:-1], spec.layer_widths[1:])):
        if params.weights[i].shape != (fan_in, fan_out) or params.biases[i].shape != (fan_out,):
            raise ConfigurationError(
                f"layer {i}: expected W{(fan_in, fan_out)}, b({fan_out},), "
                f"got W{params.weights[i].shape}, b{params.biases[i].shape}"
            )


def _activate(z: np.ndarray, activation: Activation) -> np.ndarray:
    if activation is Activation.RELU:
        return np.maximum(z, 0.0)
    if activation is Activation.TANH:
        return np.tanh(z)
    return z


def _activation_grad(z: np.ndarray, a: np.ndarray, activation: Activation) -> np.ndarray:
    # subgradient of relu at 0 is 0
    if activation is Activation.RELU:
        return (z > 0.0).astype(z.dtype)
    if activation is Activation.TANH:
        return 1.0 - a * a
    return np.ones_like(z)


def forward(spec: MlpSpec, params: MlpParams, batch: np.ndarray) -> tuple[np.ndarray, Tape]:
    """
    Прямой проход.

    Args:
        spec: Спецификация сети
        params: Параметры
        batch: Матрица B x d_in

    Returns:
        tuple[np.ndarray, Tape]: Выход B x d_out и лента для backward

    Raises:
        ConfigurationError: Если ширина батча не совпадает с d_in
        NumericError: Если выход содержит NaN/inf
    """
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[1] != spec.d_in:
        raise ConfigurationError(f"batch shape {batch.shape} does not match input dim {spec.d_in}")

    inputs: list[np.ndarray] = []
    preactivations: list[np.ndarray] = []
    a: np.ndarray = batch
    last: int = spec.n_layers - 1
    for i in range(spec.n_layers):
        inputs.append(a)
        z: np.ndarray = a @ params.weights[i] + params.biases[i]
        preactivations.append(z)
        if i < last:
            a = _activate(z, spec.activations[i])
        elif spec.output_activation is OutputActivation.SIGMOID:
            a = expit(z)
        else:
            a = z

    if not np.all(np.isfinite(a)):
        raise NumericError("non-finite network output", layer=last)

    tape: Tape = Tape(
        inputs=inputs,
        preactivations=preactivations,
        outputs=a,
        params_id=id(params),
        params_version=params.version,
    )
    return a, tape


def backward(
    spec: MlpSpec,
    params: MlpParams,
    tape: Tape,
    output_grad: np.ndarray,
    wrt_logits: bool = False,
) -> Gradients:
    """
    Обратный проход по ленте.

    Args:
        spec: Спецификация сети
        params: Те же параметры, что и при forward
        tape: Лента forward
        output_grad: dL/d(выход), B x d_out
        wrt_logits: output_grad уже взят по предактивации выходного слоя
            (для сигмоидного выхода с BCE это устойчивее)

    Returns:
        Gradients: Градиенты по весам, смещениям и входу

    Raises:
        UsageError: Если параметры изменились после forward
    """
    if tape.params_id != id(params) or tape.params_version != params.version:
        raise UsageError("stale tape: parameters changed since forward")

    delta: np.ndarray = np.asarray(output_grad, dtype=np.float64)
    if delta.shape != tape.outputs.shape:
        raise ConfigurationError(f"output_grad shape {delta.shape} != outputs {tape.outputs.shape}")
    if spec.output_activation is OutputActivation.SIGMOID and not wrt_logits:
        delta = delta * tape.outputs * (1.0 - tape.outputs)

    weights: list[np.ndarray] = [np.empty(0)] * spec.n_layers
    biases: list[np.ndarray] = [np.empty(0)] * spec.n_layers
    for i in range(spec.n_layers - 1, -1, -1):
        a_in: np.ndarray = tape.inputs[i]
        weights[i] = a_in.T @ delta
        biases[i] = delta.sum(axis=0)
        delta = delta @ params.weights[i].T
        if i > 0:
            delta = delta * _activation_grad(tape.preactivations[i - 1], a_in, spec.activations[i - 1])

    return Gradients(weights=weights, biases=biases, inputs=delta)
