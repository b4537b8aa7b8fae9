from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, PositiveInt

from genmix.nn.schemas import Activation


class ReinitPolicy(str, Enum):
    FRESH_EACH_ROUND = "fresh_each_round"
    PERSISTENT = "persistent"


class DiscriminatorConfig(BaseModel):
    """
    Архитектура и политика переинициализации дискриминаторов.

    Attributes:
        hidden_widths: Ширины скрытых слоев
        activation: Активация скрытых слоев
        reinit_policy: Обучать ли классификатор с нуля на каждой итерации
    """

    model_config = ConfigDict(frozen=True)

    hidden_widths: list[PositiveInt] = Field(default_factory=lambda: [50, 50])
    activation: Activation = Activation.RELU
    reinit_policy: ReinitPolicy = ReinitPolicy.FRESH_EACH_ROUND
