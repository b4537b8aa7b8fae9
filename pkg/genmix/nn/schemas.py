from enum import Enum
from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, model_validator


class Activation(str, Enum):
    RELU = "relu"
    TANH = "tanh"
    IDENTITY = "identity"


class OutputActivation(str, Enum):
    IDENTITY = "identity"
    SIGMOID = "sigmoid"


class MlpSpec(BaseModel):
    """
    Описание полносвязной сети.

    Attributes:
        layer_widths: Ширины слоев, первой идет размерность входа, последней - выхода
        activations: Активация для каждого скрытого слоя
        output_activation: Активация выходного слоя
    """

    model_config = ConfigDict(frozen=True)

    layer_widths: Annotated[list[PositiveInt], Field(min_length=2)]
    activations: list[Activation] = Field(default_factory=list)
    output_activation: OutputActivation = OutputActivation.IDENTITY

    @model_validator(mode="after")
    def check_activations(self) -> "MlpSpec":
        if len(self.activations) != len(self.layer_widths) - 2:
            raise ValueError(
                f"expected {len(self.layer_widths) - 2} hidden activations, got {len(self.activations)}"
            )
        return self

    @classmethod
    def build(
        cls,
        d_in: int,
        hidden: list[int],
        d_out: int,
        activation: Activation = Activation.RELU,
        output_activation: OutputActivation = OutputActivation.IDENTITY,
    ) -> "MlpSpec":
        """
        Собирает спецификацию с одинаковой активацией во всех скрытых слоях.

        Args:
            d_in: Размерность входа
            hidden: Ширины скрытых слоев
            d_out: Размерность выхода
            activation: Активация скрытых слоев
            output_activation: Активация выхода

        Returns:
            MlpSpec: Спецификация сети
        """
        return cls(
            layer_widths=[d_in, *hidden, d_out],
            activations=[activation] * len(hidden),
            output_activation=output_activation,
        )

    @property
    def d_in(self) -> int:
        return self.layer_widths[0]

    @property
    def d_out(self) -> int:
        return self.layer_widths[-1]

    @property
    def n_layers(self) -> int:
        return len(self.layer_widths) - 1


class AdamConfig(BaseModel):
    """
    Гиперпараметры Adam.

    Attributes:
        lr: Шаг обучения
        beta1: Коэффициент затухания первого момента
        beta2: Коэффициент затухания второго момента
        eps: Стабилизатор знаменателя
    """

    model_config = ConfigDict(frozen=True)

    lr: float = Field(default=0.005, gt=0)
    beta1: float = Field(default=0.5, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    eps: float = Field(default=1e-8, gt=0)
