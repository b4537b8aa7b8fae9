from pathlib import Path
from typing import Annotated

import numpy as np
from fastapi import APIRouter, Depends, HTTPException, status
from starlette.concurrency import run_in_threadpool

from genmix.api import runs
from genmix.api.schemas import HistoryRow, MetricResponse, RunSummary, SampleRequest, SampleResponse
from genmix.config import settings
from genmix.eval.metrics import MetricRow, read_metrics_csv
from genmix.exceptions import CsvParseError, UsageError

router = APIRouter(prefix="/api", tags=["runs"])


def get_runs_dir() -> Path:
    """Корень каталогов запусков (переопределяется в тестах)."""
    return Path(settings.GENMIX_RUNS_DIR)


RunsDir = Annotated[Path, Depends(get_runs_dir)]


def require_run(root: Path, run_id: str) -> Path:
    run_dir = runs.get_run_dir(root, run_id)
    if run_dir is None:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail="Run not found")
    return run_dir


@router.get("/runs", response_model=list[RunSummary])
async def list_runs(root: RunsDir) -> list[RunSummary]:
    """
    Сравнение всех запусков с метриками.

    Returns:
        list[RunSummary]: Строки, упорядоченные по числу мод и правдоподобию
    """
    return [RunSummary.model_validate(row) for row in await run_in_threadpool(runs.summarize_runs, root)]


@router.get("/runs/{run_id}/metrics", response_model=list[MetricResponse])
async def get_metrics(run_id: str, root: RunsDir) -> list[MetricRow]:
    """
    Метрики запуска.

    Raises:
        HTTPException 404: Если запуск не найден или у него нет metrics.csv
        HTTPException 422: Если metrics.csv поврежден
    """
    run_dir: Path = require_run(root, run_id)
    path: Path = run_dir / "metrics.csv"
    if not path.exists():
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail="Run has no metrics")
    try:
        return read_metrics_csv(path)
    except CsvParseError as e:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e))


@router.get("/runs/{run_id}/history", response_model=list[HistoryRow])
async def get_history(run_id: str, root: RunsDir) -> list[HistoryRow]:
    run_dir: Path = require_run(root, run_id)
    try:
        return runs.read_history(run_dir)
    except CsvParseError as e:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e))


@router.post("/runs/{run_id}/sample", response_model=SampleResponse)
async def sample(run_id: str, request: SampleRequest, root: RunsDir) -> SampleResponse:
    """
    Сэмплы смеси из сохраненного чекпоинта.

    Args:
        run_id: Идентификатор запуска
        request: Число точек, зерно и итерация

    Returns:
        SampleResponse: Номер итерации и точки

    Raises:
        HTTPException 404: Если запуск не найден
        HTTPException 409: Если у запуска нет такого чекпоинта
    """
    run_dir: Path = require_run(root, run_id)
    try:
        t, points = await run_in_threadpool(runs.sample_run, run_dir, request.n, request.seed, request.round)
    except UsageError as e:
        raise HTTPException(status_code=status.HTTP_409_CONFLICT, detail=str(e))
    points_list: list[list[float]] = np.asarray(points, dtype=np.float64).tolist()
    return SampleResponse(run_id=run_id, round=t, points=points_list)
