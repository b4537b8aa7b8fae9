import struct

from genmix.exceptions import UsageError
from genmix.generative.schemas import ModelKind

CONTAINER_MAGIC: bytes = b"GMXC"
CONTAINER_VERSION: int = 1


def encode_container(kind: str, entries: dict[str, bytes]) -> bytes:
    """
    Упаковывает именованные blob'ы подсетей в индексированный контейнер.

    Формат (little-endian): "GMXC", u16 версия, u8 длина тега + тег, u16 число записей,
    затем для каждой записи u8 длина имени + имя, u64 длина + данные.

    Args:
        kind: Тег вида модели
        entries: Имя -> blob (GMX1 или служебные данные)

    Returns:
        bytes: Контейнер
    """
    tag: bytes = kind.encode("ascii")
    out: bytearray = bytearray(CONTAINER_MAGIC)
    out += struct.pack("<HB", CONTAINER_VERSION, len(tag)) + tag
    out += struct.pack("<H", len(entries))
    for name, blob in entries.items():
        raw: bytes = name.encode("ascii")
        out += struct.pack("<B", len(raw)) + raw
        out += struct.pack("<Q", len(blob)) + blob
    return bytes(out)


def decode_container(blob: bytes) -> tuple[str, dict[str, bytes]]:
    """
    Распаковывает контейнер.

    Args:
        blob: Результат encode_container

    Returns:
        tuple[str, dict[str, bytes]]: Тег вида и записи

    Raises:
        UsageError: Поврежденный контейнер
    """
    if blob[:4] != CONTAINER_MAGIC:
        raise UsageError("not a GMXC checkpoint container")
    try:
        version, tag_len = struct.unpack_from("<HB", blob, 4)
        if version != CONTAINER_VERSION:
            raise UsageError(f"unsupported container version {version}")
        offset: int = 7
        kind: str = blob[offset:offset + tag_len].decode("ascii")
        offset += tag_len
        (count,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        entries: dict[str, bytes] = {}
        for _ in range(count):
            (name_len,) = struct.unpack_from("<B", blob, offset)
            offset += 1
            name: str = blob[offset:offset + name_len].decode("ascii")
            offset += name_len
            (size,) = struct.unpack_from("<Q", blob, offset)
            offset += 8
            if offset + size > len(blob):
                raise UsageError(f"truncated entry {name!r}")
            entries[name] = blob[offset:offset + size]
            offset += size
    except (struct.error, UnicodeDecodeError) as e:
        raise UsageError(f"corrupt checkpoint container: {e}") from e
    return kind, entries


def read_kind(blob: bytes) -> ModelKind:
    kind, _ = decode_container(blob)
    try:
        return ModelKind(kind)
    except ValueError as e:
        raise UsageError(f"unknown model kind {kind!r}") from e
