import logging
from contextlib import asynccontextmanager
from pathlib import Path
from typing import AsyncGenerator

from fastapi import FastAPI

from genmix.api.router import router as runs_router
from genmix.config import settings

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI) -> AsyncGenerator[None, None]:
    """
    Lifecycle manager для FastAPI приложения.

    Args:
        app: Экземпляр FastAPI приложения

    Yields:
        None
    """
    root: Path = Path(settings.GENMIX_RUNS_DIR)
    if not root.is_dir():
        logger.warning("runs directory %s does not exist yet", root)
    yield


app = FastAPI(title="genmix", lifespan=lifespan)

app.include_router(runs_router)
