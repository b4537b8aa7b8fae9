import struct

import numpy as np
from pydantic import ValidationError

from genmix.exceptions import UsageError
from genmix.nn.models import MlpParams
from genmix.nn.network import check_shapes
from genmix.nn.schemas import Activation, MlpSpec, OutputActivation

MAGIC: bytes = b"GMX1"
FORMAT_VERSION: int = 1

_ACTIVATION_CODES: dict[Activation, int] = {Activation.RELU: 0, Activation.TANH: 1, Activation.IDENTITY: 2}
_OUTPUT_CODES: dict[OutputActivation, int] = {OutputActivation.IDENTITY: 0, OutputActivation.SIGMOID: 1}


def encode_params(spec: MlpSpec, params: MlpParams) -> bytes:
    """
    Сериализует сеть в бинарный blob.

    Формат (little-endian): "GMX1", u16 версия, u16 число ширин, u32 ширины,
    u8 коды скрытых активаций, u8 код выходной активации, затем W0, b0, W1, b1, ... как f64.

    Args:
        spec: Спецификация сети
        params: Параметры

    Returns:
        bytes: Blob
    """
    check_shapes(spec, params)
    widths: list[int] = list(spec.layer_widths)
    header: bytes = MAGIC + struct.pack("<HH", FORMAT_VERSION, len(widths))
    header += struct.pack(f"<{len(widths)}I", *widths)
    header += bytes(_ACTIVATION_CODES[a] for a in spec.activations)
    header += bytes([_OUTPUT_CODES[spec.output_activation]])
    body: bytes = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in params.arrays())
    return header + body


def decode_params(blob: bytes) -> tuple[MlpSpec, MlpParams]:
    """
    Восстанавливает сеть из blob.

    Args:
        blob: Результат encode_params

    Returns:
        tuple[MlpSpec, MlpParams]: Спецификация и параметры

    Raises:
        UsageError: Неверная сигнатура, версия или длина
    """
    if blob[:4] != MAGIC:
        raise UsageError("not a GMX1 blob")
    try:
        version, n_widths = struct.unpack_from("<HH", blob, 4)
        if version != FORMAT_VERSION:
            raise UsageError(f"unsupported GMX1 format version {version}")
        offset: int = 8
        widths: tuple[int, ...] = struct.unpack_from(f"<{n_widths}I", blob, offset)
        offset += 4 * n_widths
        n_hidden: int = n_widths - 2
        by_code: dict[int, Activation] = {v: k for k, v in _ACTIVATION_CODES.items()}
        out_by_code: dict[int, OutputActivation] = {v: k for k, v in _OUTPUT_CODES.items()}
        activations: list[Activation] = [by_code[c] for c in blob[offset:offset + n_hidden]]
        offset += n_hidden
        output_activation: OutputActivation = out_by_code[blob[offset]]
        offset += 1
    except (struct.error, KeyError, IndexError) as e:
        raise UsageError(f"corrupt GMX1 header: {e}") from e

    try:
        spec: MlpSpec = MlpSpec(
            layer_widths=list(widths), activations=activations, output_activation=output_activation
        )
    except ValidationError as e:
        raise UsageError(f"invalid network header in GMX1 blob: {e}") from e
    weights: list[np.ndarray] = []
    biases: list[np.ndarray] = []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        for shape, target in (((fan_in, fan_out), weights), ((fan_out,), biases)):
            count: int = int(np.prod(shape))
            end: int = offset + 8 * count
            if end > len(blob):
                raise UsageError("truncated GMX1 blob")
            target.append(np.frombuffer(blob, dtype="<f8", count=count, offset=offset).astype(np.float64).reshape(shape))
            offset = end
    if offset != len(blob):
        raise UsageError(f"trailing {len(blob) - offset} bytes in GMX1 blob")
    return spec, MlpParams(weights=weights, biases=biases)
