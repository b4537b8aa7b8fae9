from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.special import xlogy

from genmix.exceptions import ConfigurationError, DomainError, PreconditionError

PROB_TOLERANCE: float = 1e-12


class FGenerator(str, Enum):
    """
    Выпуклые генераторы f с f(1) = 0.

    kl:              f(u) = u log u
    reverse_kl:      f(u) = -log u
    total_variation: f(u) = 1/2 |u - 1|
    jensen_shannon:  f(u) = 1/2 [u log u - (u + 1) log((u + 1) / 2)]

    Точки с p_s = 0 и q_s > 0 дают вклад q_s * lim_{u->inf} f(u)/u
    (бесконечный для kl и reverse_kl, 1/2 для total_variation,
    log(2)/2 для jensen_shannon); точки с q_s = 0 дают p_s * f(0)
    (бесконечный для reverse_kl).
    """

    KL = "kl"
    REVERSE_KL = "reverse_kl"
    TOTAL_VARIATION = "total_variation"
    JENSEN_SHANNON = "jensen_shannon"

    def __call__(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        if self is FGenerator.KL:
            return xlogy(u, u)
        if self is FGenerator.REVERSE_KL:
            with np.errstate(divide="ignore"):
                return -np.log(u)
        if self is FGenerator.TOTAL_VARIATION:
            return 0.5 * np.abs(u - 1.0)
        return 0.5 * (xlogy(u, u) - xlogy(u + 1.0, (u + 1.0) / 2.0))

    @property
    def slope_at_infinity(self) -> float:
        """lim_{u->inf} f(u) / u."""
        return {
            FGenerator.KL: np.inf,
            FGenerator.REVERSE_KL: 0.0,
            FGenerator.TOTAL_VARIATION: 0.5,
            FGenerator.JENSEN_SHANNON: 0.5 * np.log(2.0),
        }[self]


@dataclass
class Categorical:
    """
    Распределение на конечном носителе размера S.

    Attributes:
        probs: Неотрицательные вероятности с суммой 1
    """

    probs: np.ndarray

    def __post_init__(self) -> None:
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.ndim != 1 or np.any(self.probs < 0):
            raise ConfigurationError("categorical probabilities must be a nonnegative vector")
        if not np.isclose(self.probs.sum(), 1.0, rtol=0.0, atol=PROB_TOLERANCE):
            raise ConfigurationError(f"categorical probabilities sum to {self.probs.sum()}, not 1")

    @property
    def size(self) -> int:
        return self.probs.shape[0]

    @property
    def support(self) -> np.ndarray:
        return self.probs > 0


def f_divergence_categorical(q: Categorical, p: Categorical, f: FGenerator) -> float:
    """
    D_f(Q || P) = sum_s p_s f(q_s / p_s).

    Args:
        q: Распределение Q
        p: Распределение P
        f: Генератор

    Returns:
        float: Значение дивергенции

    Raises:
        DomainError: Если при данной f расхождение бесконечно
    """
    if q.size != p.size:
        raise ConfigurationError(f"support sizes differ: {q.size} vs {p.size}")
    qs, ps = q.probs, p.probs
    both: np.ndarray = (ps > 0) & (qs > 0)
    only_q: np.ndarray = (ps == 0) & (qs > 0)
    only_p: np.ndarray = (ps > 0) & (qs == 0)

    total: float = float(np.sum(ps[both] * f(qs[both] / ps[both])))
    if np.any(only_q):
        slope: float = f.slope_at_infinity
        if not np.isfinite(slope):
            raise DomainError(f"{f.value}: Q puts mass where P has none")
        total += slope * float(qs[only_q].sum())
    if np.any(only_p):
        at_zero: float = float(f(np.zeros(1))[0])
        if not np.isfinite(at_zero):
            raise DomainError(f"{f.value}: P puts mass where Q has none")
        total += at_zero * float(ps[only_p].sum())
    return total


def mixture(components: Sequence[Categorical], alphas: np.ndarray) -> Categorical:
    return Categorical(probs=np.sum([a * c.probs for a, c in zip(alphas, components)], axis=0))


def lemma1_gap(
    components: Sequence[Categorical],
    targets: Sequence[Categorical],
    alphas: np.ndarray,
    f: FGenerator,
) -> tuple[float, float]:
    """
    Обе стороны оценки D_f(sum a_j Q_j || sum a_j P_j) <= sum a_j D_f(Q_j || P_j).

    Args:
        components: Распределения моделей Q_j на общем носителе
        targets: Целевые распределения P_j с попарно непересекающимися носителями
        alphas: Веса смеси (сумма 1)
        f: Генератор

    Returns:
        tuple[float, float]: (lhs, rhs)

    Raises:
        PreconditionError: Если носители целей пересекаются или веса некорректны
    """
    alphas = np.asarray(alphas, dtype=np.float64)
    if len(components) != len(targets) or len(targets) != len(alphas):
        raise PreconditionError("components, targets and alphas must have equal length")
    if np.any(alphas < 0) or not np.isclose(alphas.sum(), 1.0, rtol=0.0, atol=PROB_TOLERANCE):
        raise PreconditionError("alphas must be nonnegative and sum to 1")
    coverage: np.ndarray = np.sum([t.support.astype(np.int64) for t in targets], axis=0)
    if np.any(coverage > 1):
        raise PreconditionError("target supports overlap")

    lhs: float = f_divergence_categorical(mixture(components, alphas), mixture(targets, alphas), f)
    rhs: float = float(sum(a * f_divergence_categorical(q, p, f) for a, q, p in zip(alphas, components, targets)))
    return lhs, rhs
