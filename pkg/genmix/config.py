from typing import Optional

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    GENMIX_THREADS: Optional[int] = None
    GENMIX_RUNS_DIR: str = "runs"
    GENMIX_LOG_LEVEL: str = "INFO"

    DEBUG: bool = False

    @property
    def max_workers(self) -> Optional[int]:
        """Верхняя граница числа потоков для параллельных фаз (None - без ограничения)"""
        if self.GENMIX_THREADS is None or self.GENMIX_THREADS < 1:
            return None
        return self.GENMIX_THREADS

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()
