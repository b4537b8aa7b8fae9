from typing import Any, Optional


class GenmixError(Exception):
    """Базовое исключение пакета."""


class ConfigurationError(GenmixError):
    """Несогласованные размеры, параметры или конфигурация."""


class UsageError(GenmixError):
    """Неправильный порядок вызовов (например, устаревшая лента forward)."""


class NumericError(GenmixError):
    """
    Нечисловые значения (NaN/inf) в вычислениях.

    Attributes:
        layer: Индекс слоя, где обнаружена проблема
        term: Слагаемое функции потерь (recon, kl, ...)
    """

    def __init__(self, message: str, layer: Optional[int] = None, term: Optional[str] = None) -> None:
        super().__init__(message)
        self.layer = layer
        self.term = term


class BalancingError(GenmixError):
    """Компонента осталась без обучающих точек."""


class CsvParseError(GenmixError):
    """
    Ошибка разбора CSV.

    Attributes:
        line: Номер строки файла (с единицы, считая заголовок)
    """

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class DomainError(GenmixError):
    """Значение вне области определения (например, бесконечная f-дивергенция)."""


class PreconditionError(GenmixError):
    """Нарушено предусловие операции."""


class StateCorruptionError(GenmixError):
    """Состояние смеси противоречиво."""


class TrainingError(GenmixError):
    """
    Прерывание обучения смеси.

    Attributes:
        round: Номер внешней итерации (0 - предобучение)
        component: Индекс компоненты или None
        history: Накопленная к моменту ошибки история
    """

    def __init__(self, message: str, round: int, component: Optional[int], history: Any = None) -> None:
        super().__init__(f"round {round}, component {component}: {message}")
        self.round = round
        self.component = component
        self.history = history
