import asyncio
import copy
import json
import sys
from pathlib import Path
from typing import Any, AsyncGenerator, Generator

import numpy as np
import pytest
import pytest_asyncio
from httpx import ASGITransport, AsyncClient

root_dir = Path(__file__).parent.parent
sys.path.insert(0, str(root_dir))

from genmix.data.models import Dataset
from genmix.data.schemas import GmmSpec
from genmix.data.synthetic import generate_synthetic
from genmix.generative.schemas import ModelKind, VaeConfig
from genmix.trainer.schemas import LikelihoodBackend, TrainConfig


TINY_CONFIG: dict[str, Any] = {
    "run_id": "tiny",
    "baseline": "kvae",
    "n_points": 300,
    "data": {"means": [[0.0, 10.0], [-8.66, -5.0], [8.66, -5.0]], "variance": 0.25, "skew": False},
    "train": {
        "k": 3,
        "rounds": 2,
        "pretrain_epochs": 1,
        "gen_epochs_per_round": 1,
        "disc_epochs_per_round": 1,
        "batch_size": 32,
        "seed": 0,
        "vae": {"latent_dim": 2, "hidden_widths": [8]},
        "discriminator": {"hidden_widths": [8]},
    },
    "eval": {"held_out_fraction": 0.2, "kde_samples": 200, "plot_every": 1, "plot_samples": 50},
}


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption("--runslow", action="store_true", default=False, help="run slow experiment reproductions")


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def event_loop() -> Generator:
    """
    Создает event loop для всех тестов.

    Yields:
        asyncio.AbstractEventLoop: Event loop
    """
    loop = asyncio.get_event_loop_policy().new_event_loop()
    yield loop
    loop.close()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def three_blobs() -> Dataset:
    """
    Три хорошо разделенные моды без искривления, 300 точек.

    Returns:
        Dataset: Набор с истинными метками
    """
    spec: GmmSpec = GmmSpec(means=[(0.0, 10.0), (-8.66, -5.0), (8.66, -5.0)], variance=0.25, skew=False)
    return generate_synthetic(spec, 300, np.random.default_rng(7), name="three-blobs")


@pytest.fixture
def small_vae_config() -> TrainConfig:
    """Маленькая конфигурация для быстрых прогонов тренера."""
    return TrainConfig(
        k=3,
        rounds=2,
        pretrain_epochs=1,
        gen_epochs_per_round=1,
        disc_epochs_per_round=1,
        batch_size=32,
        seed=3,
        vae=VaeConfig(latent_dim=2, hidden_widths=[8]),
        discriminator={"hidden_widths": [8]},
    )


@pytest.fixture
def kmeans_config() -> TrainConfig:
    """Вырожденные модели с назначением по ближайшему центроиду."""
    return TrainConfig(
        k=3,
        rounds=5,
        pretrain_epochs=1,
        gen_epochs_per_round=1,
        min_points=1,
        seed=0,
        model_kind=ModelKind.DEGENERATE,
        likelihood_backend=LikelihoodBackend.NEAREST_CENTROID,
        split="balanced",
    )


@pytest.fixture
def runs_dir(tmp_path: Path) -> Path:
    path: Path = tmp_path / "runs"
    path.mkdir()
    return path


@pytest_asyncio.fixture(scope="function")
async def client(runs_dir: Path) -> AsyncGenerator[AsyncClient, None]:
    """
    Создает HTTP клиент для тестирования API.

    Args:
        runs_dir: Каталог запусков

    Yields:
        AsyncClient: HTTP клиент для запросов к API
    """
    from genmix.api.router import get_runs_dir
    from genmix.main import app

    def get_test_runs_dir() -> Path:
        return runs_dir

    app.dependency_overrides[get_runs_dir] = get_test_runs_dir

    async with AsyncClient(
        transport=ASGITransport(app=app),
        base_url="http://test"
    ) as ac:
        yield ac

    app.dependency_overrides.clear()


@pytest.fixture
def tiny_config() -> dict[str, Any]:
    """Конфигурация эксперимента на 300 точках и двух итерациях."""
    return copy.deepcopy(TINY_CONFIG)


@pytest.fixture
def write_config(tmp_path: Path):
    def write(config: dict[str, Any], name: str = "config.json") -> Path:
        path: Path = tmp_path / name
        path.write_text(json.dumps(config))
        return path

    return write


@pytest.fixture(scope="session")
def finished_run(tmp_path_factory: pytest.TempPathFactory) -> Path:
    """
    Один завершенный запуск TINY_CONFIG, общий для тестов CLI и API.

    Returns:
        Path: Каталог запуска с артефактами
    """
    from genmix.experiments.runner import run_experiment

    root: Path = tmp_path_factory.mktemp("finished")
    config_path: Path = root / "tiny.json"
    config_path.write_text(json.dumps(TINY_CONFIG))
    out: Path = root / "tiny"
    assert run_experiment(config_path, out=out) == 0
    return out
