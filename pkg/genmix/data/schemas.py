from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from genmix.exceptions import ConfigurationError

CIRCLE_RADIUS: float = 10.0
GRID_SPACING: float = 8.0
PRESET_VARIANCE: float = 0.25


class GmmSpec(BaseModel):
    """
    Истинная смесь гауссиан на плоскости.

    Attributes:
        means: Центры мод, M x 2
        variance: Общая изотропная дисперсия
        weights: Веса мод (по умолчанию равномерные)
        skew: Применять ли нелинейное искривление второй координаты
    """

    model_config = ConfigDict(frozen=True)

    means: list[tuple[float, float]] = Field(min_length=1)
    variance: float = Field(default=PRESET_VARIANCE, gt=0)
    weights: Optional[list[float]] = None
    skew: bool = True

    @model_validator(mode="after")
    def check_weights(self) -> "GmmSpec":
        if self.weights is not None:
            if len(self.weights) != len(self.means):
                raise ValueError(f"{len(self.weights)} weights for {len(self.means)} modes")
            if any(w < 0 for w in self.weights) or not np.isclose(sum(self.weights), 1.0, atol=1e-12):
                raise ValueError("weights must be nonnegative and sum to 1")
        return self

    @property
    def n_modes(self) -> int:
        return len(self.means)

    def mode_weights(self) -> np.ndarray:
        if self.weights is None:
            return np.full(self.n_modes, 1.0 / self.n_modes)
        return np.asarray(self.weights, dtype=np.float64)

    @classmethod
    def preset(cls, modes: int, skew: bool = True) -> "GmmSpec":
        """
        Пресеты синтетических данных: 3 и 5 мод на окружности радиуса 10,
        9 мод на сетке 3 x 3 с шагом 8, дисперсия 0.25.

        Args:
            modes: Число мод (3, 5 или 9)
            skew: Искривление второй координаты

        Returns:
            GmmSpec: Спецификация смеси
        """
        if modes in (3, 5):
            angles: np.ndarray = np.pi / 2 + 2 * np.pi * np.arange(modes) / modes
            means = [(CIRCLE_RADIUS * float(np.cos(a)), CIRCLE_RADIUS * float(np.sin(a))) for a in angles]
        elif modes == 9:
            offsets: list[float] = [-GRID_SPACING, 0.0, GRID_SPACING]
            means = [(x, y) for y in offsets for x in offsets]
        else:
            raise ConfigurationError(f"no preset for {modes} modes (use 3, 5 or 9)")
        return cls(means=means, variance=PRESET_VARIANCE, skew=skew)
