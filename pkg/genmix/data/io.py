import csv
import io
from pathlib import Path
from typing import Optional, Union

import numpy as np

from genmix.data.models import Dataset
from genmix.exceptions import ConfigurationError, CsvParseError

LABEL_COLUMN: str = "label"


def save_csv(ds: Dataset, path: Union[str, Path]) -> Path:
    """
    Сохраняет набор в CSV с заголовком x0,...,x{d-1}[,label] и 17 значащими цифрами.

    Args:
        ds: Набор данных
        path: Путь к файлу

    Returns:
        Path: Путь к записанному файлу
    """
    path = Path(path)
    header: list[str] = [f"x{k}" for k in range(ds.d)]
    if ds.labels is not None:
        header.append(LABEL_COLUMN)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(ds.n):
            row: list[str] = [format(v, ".17g") for v in ds.points[i]]
            if ds.labels is not None:
                row.append(str(int(ds.labels[i])))
            writer.writerow(row)
    return path


def load_csv(path: Union[str, Path], name: Optional[str] = None) -> Dataset:
    """
    Загружает набор из CSV.

    Args:
        path: Путь к файлу
        name: Имя набора (по умолчанию имя файла)

    Returns:
        Dataset: Загруженный набор

    Raises:
        ConfigurationError: Файл не читается
        CsvParseError: Некорректный заголовок или строка (с номером строки)
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            text: str = fh.read()
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigurationError(f"cannot read {path}: {e}") from e

    reader = csv.reader(io.StringIO(text, newline=""))
    header: Optional[list[str]] = next(reader, None)
    if not header:
        raise CsvParseError("missing header", line=1)
    has_labels: bool = header[-1] == LABEL_COLUMN
    d: int = len(header) - int(has_labels)
    expected: list[str] = [f"x{k}" for k in range(d)]
    if d < 1 or header[:d] != expected:
        raise CsvParseError(f"expected header {','.join(expected)}[,label], got {','.join(header)}", line=1)

    rows: list[list[float]] = []
    labels: list[int] = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(header):
            raise CsvParseError(f"expected {len(header)} fields, got {len(row)}", line=reader.line_num)
        try:
            rows.append([float(v) for v in row[:d]])
            if has_labels:
                labels.append(int(row[d]))
        except ValueError as e:
            raise CsvParseError(str(e), line=reader.line_num) from e

    if not rows:
        raise CsvParseError("no data rows", line=2)
    return Dataset(
        points=np.array(rows, dtype=np.float64),
        labels=np.array(labels, dtype=np.int64) if has_labels else None,
        name=name or path.stem,
    )
