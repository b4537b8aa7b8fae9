import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from genmix.exceptions import UsageError
from genmix.generative.factory import decode_model, encode_model
from genmix.generative.models import GenerativeModel
from genmix.partition.assignment import load_assignment_csv, save_assignment_csv
from genmix.partition.models import Assignment, MixingWeights
from genmix.trainer.models import MixtureState
from genmix.trainer.schemas import TrainConfig

ROUND_PATTERN = re.compile(r"^round_(\d+)$")


@dataclass
class LoadedCheckpoint:
    """
    Содержимое каталога round_<t>/.

    Attributes:
        t: Номер итерации
        models: Восстановленные модели
        weights: Веса смеси
        assignment: Разбиение (если сохранено)
        config_hash: Хэш конфигурации, с которой шло обучение
    """

    t: int
    models: list[GenerativeModel]
    weights: MixingWeights
    assignment: Optional[Assignment]
    config_hash: str

    def to_state(self) -> MixtureState:
        assignment: Assignment = self.assignment or Assignment(owner=np.zeros(0, dtype=np.int64), generation=self.t)
        return MixtureState(models=self.models, weights=self.weights, assignment=assignment, t=self.t)


def round_dir(root: Union[str, Path], t: int) -> Path:
    return Path(root) / f"round_{t}"


def save_checkpoint(state: MixtureState, config: TrainConfig, root: Union[str, Path]) -> Path:
    """
    Пишет round_<t>/model_<j>.bin, disc_<j>.bin (если есть дискриминаторы), assignment.csv и state.json.

    Args:
        state: Состояние смеси
        config: Конфигурация обучения (для хэша)
        root: Корневой каталог чекпоинтов

    Returns:
        Path: Каталог итерации
    """
    target: Path = round_dir(root, state.t)
    target.mkdir(parents=True, exist_ok=True)
    for j, model in enumerate(state.models):
        (target / f"model_{j}.bin").write_bytes(encode_model(model))
    if state.ensemble is not None:
        for j in range(state.ensemble.k):
            (target / f"disc_{j}.bin").write_bytes(state.ensemble.checkpoint(j))
    save_assignment_csv(state.assignment, target / "assignment.csv")
    payload: dict = {
        "t": state.t,
        "alpha": [float(a) for a in state.weights.alpha],
        "config_hash": config.config_hash(),
    }
    (target / "state.json").write_text(json.dumps(payload, indent=2))
    return target


def latest_round(root: Union[str, Path]) -> Optional[Path]:
    """Каталог с наибольшим t или None."""
    root = Path(root)
    if not root.is_dir():
        return None
    rounds: list[tuple[int, Path]] = [
        (int(m.group(1)), p) for p in root.iterdir() if p.is_dir() and (m := ROUND_PATTERN.match(p.name))
    ]
    return max(rounds)[1] if rounds else None


def load_checkpoint(path: Union[str, Path]) -> LoadedCheckpoint:
    """
    Читает каталог round_<t>/ (или корень чекпоинтов - тогда последнюю итерацию).

    Raises:
        UsageError: Каталог не содержит чекпоинта
    """
    path = Path(path)
    if not (path / "state.json").exists():
        latest: Optional[Path] = latest_round(path)
        if latest is None:
            raise UsageError(f"no checkpoint found in {path}")
        path = latest
    payload: dict = json.loads((path / "state.json").read_text())
    alpha: list[float] = payload["alpha"]
    models: list[GenerativeModel] = []
    for j in range(len(alpha)):
        blob_path: Path = path / f"model_{j}.bin"
        if not blob_path.exists():
            raise UsageError(f"missing {blob_path.name} in {path}")
        models.append(decode_model(blob_path.read_bytes()))
    assignment_path: Path = path / "assignment.csv"
    return LoadedCheckpoint(
        t=int(payload["t"]),
        models=models,
        weights=MixingWeights(alpha=np.array(alpha)),
        assignment=load_assignment_csv(assignment_path) if assignment_path.exists() else None,
        config_hash=payload["config_hash"],
    )
