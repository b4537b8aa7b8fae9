from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, PositiveInt

from genmix.nn.schemas import Activation


class ModelKind(str, Enum):
    GAUSSIAN_VAE = "gaussian_vae"
    DEGENERATE = "degenerate"


class VaeConfig(BaseModel):
    """
    Архитектура VAE.

    Attributes:
        latent_dim: Размерность латентного пространства
        hidden_widths: Ширины скрытых слоев энкодера и декодера
        activation: Активация скрытых слоев
        obs_variance: Дисперсия гауссовского наблюдения декодера
    """

    model_config = ConfigDict(frozen=True)

    latent_dim: PositiveInt = 5
    hidden_widths: list[PositiveInt] = Field(default_factory=lambda: [50, 50])
    activation: Activation = Activation.RELU
    obs_variance: float = Field(default=1.0, gt=0)
