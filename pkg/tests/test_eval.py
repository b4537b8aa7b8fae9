from math import comb
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genmix.eval.divergence import Categorical, FGenerator, f_divergence_categorical, lemma1_gap, mixture
from genmix.eval.kde import kde_log_likelihood, scott_bandwidth
from genmix.eval.kmeans import lloyd
from genmix.eval.metrics import MetricRow, cluster_metrics, composition, read_metrics_csv, write_metrics_csv
from genmix.exceptions import ConfigurationError, CsvParseError, DomainError, PreconditionError


def random_categorical(rng: np.random.Generator, size: int) -> Categorical:
    return Categorical(probs=rng.dirichlet(np.ones(size)))


def embedded(rng: np.random.Generator, size: int, support: np.ndarray) -> np.ndarray:
    probs = np.zeros(size)
    probs[support] = rng.dirichlet(np.ones(len(support)))
    return probs


@pytest.mark.parametrize("f", list(FGenerator))
def test_generators_vanish_at_one(f: FGenerator) -> None:
    assert f(np.array([1.0]))[0] == pytest.approx(0.0, abs=1e-15)
    u = np.linspace(0.1, 5.0, 50)
    values = f(u)
    assert np.all(values[1:-1] <= 0.5 * (values[:-2] + values[2:]) + 1e-12)


@pytest.mark.parametrize("f", list(FGenerator))
def test_divergence_of_equal_distributions_is_zero(f: FGenerator, rng: np.random.Generator) -> None:
    p = random_categorical(rng, 6)
    assert f_divergence_categorical(p, p, f) == pytest.approx(0.0, abs=1e-15)


def test_divergence_hand_examples() -> None:
    """
    Тест: KL([1, 0] || [1/2, 1/2]) = log 2, TV двух непересекающихся точечных масс равна 1.
    """
    half = Categorical(probs=[0.5, 0.5])
    assert f_divergence_categorical(Categorical(probs=[1.0, 0.0]), half, FGenerator.KL) == pytest.approx(np.log(2.0))
    tv = f_divergence_categorical(Categorical(probs=[1.0, 0.0]), Categorical(probs=[0.0, 1.0]), FGenerator.TOTAL_VARIATION)
    assert tv == pytest.approx(1.0)
    js = f_divergence_categorical(Categorical(probs=[1.0, 0.0]), Categorical(probs=[0.0, 1.0]), FGenerator.JENSEN_SHANNON)
    assert js == pytest.approx(np.log(2.0))


def test_divergence_domain_errors() -> None:
    """
    Тест: бесконечные значения KL и обратной KL дают DomainError.
    """
    with pytest.raises(DomainError):
        f_divergence_categorical(Categorical(probs=[0.5, 0.5]), Categorical(probs=[1.0, 0.0]), FGenerator.KL)
    with pytest.raises(DomainError):
        f_divergence_categorical(Categorical(probs=[1.0, 0.0]), Categorical(probs=[0.5, 0.5]), FGenerator.REVERSE_KL)
    with pytest.raises(ConfigurationError):
        f_divergence_categorical(Categorical(probs=[1.0]), Categorical(probs=[0.5, 0.5]), FGenerator.KL)


def test_categorical_validation() -> None:
    with pytest.raises(ConfigurationError):
        Categorical(probs=[0.5, 0.6])
    with pytest.raises(ConfigurationError):
        Categorical(probs=[1.5, -0.5])


@settings(max_examples=100, deadline=None, derandomize=True)
@given(
    seed=st.integers(min_value=0, max_value=2**31 - 1),
    size=st.integers(min_value=2, max_value=10),
    f=st.sampled_from(list(FGenerator)),
)
def test_divergence_is_positive_for_distinct_distributions(seed: int, size: int, f: FGenerator) -> None:
    rng = np.random.default_rng(seed)
    q, p = random_categorical(rng, size), random_categorical(rng, size)
    assert f_divergence_categorical(q, p, f) > 0.0
    assert f_divergence_categorical(p, p, f) == pytest.approx(0.0, abs=1e-15)


def test_mixture_divergence_bound_on_random_instances() -> None:
    """
    Тест: на 200 случайных примерах для каждой f левая часть не превосходит правую.
    """
    rng = np.random.default_rng(31)
    strict_gaps = 0
    for _ in range(200):
        k = int(rng.integers(1, 5))
        size = int(rng.integers(k, 13))
        cuts = np.sort(rng.choice(np.arange(1, size), size=k - 1, replace=False)) if k > 1 else np.array([], dtype=int)
        supports = np.split(rng.permutation(size), cuts)
        targets = [Categorical(probs=embedded(rng, size, s)) for s in supports]
        alphas = rng.dirichlet(np.ones(k))
        for f in FGenerator:
            components = []
            for s in supports:
                probs = embedded(rng, size, s)
                if f is not FGenerator.KL:
                    probs = 0.7 * probs + 0.3 * rng.dirichlet(np.ones(size))
                components.append(Categorical(probs=probs))
            lhs, rhs = lemma1_gap(components, targets, alphas, f)
            assert lhs <= rhs + 1e-9
            strict_gaps += rhs - lhs > 1e-6
    assert strict_gaps > 0


def test_mixture_divergence_bound_equality_cases(rng: np.random.Generator) -> None:
    """
    Тест: при Q_j = P_j обе части нулевые, при K = 1 они совпадают.
    """
    targets = [Categorical(probs=embedded(rng, 6, np.array(s))) for s in ([0, 1], [2, 3, 4], [5])]
    lhs, rhs = lemma1_gap(targets, targets, np.array([0.2, 0.5, 0.3]), FGenerator.KL)
    assert lhs == pytest.approx(0.0, abs=1e-15)
    assert rhs == pytest.approx(0.0, abs=1e-15)

    q, p = random_categorical(rng, 5), random_categorical(rng, 5)
    for f in FGenerator:
        lhs, rhs = lemma1_gap([q], [p], np.array([1.0]), f)
        assert lhs == rhs


def test_mixture_divergence_bound_rejects_overlapping_targets() -> None:
    overlapping = [Categorical(probs=[0.5, 0.5, 0.0]), Categorical(probs=[0.0, 0.5, 0.5])]
    with pytest.raises(PreconditionError):
        lemma1_gap(overlapping, overlapping, np.array([0.5, 0.5]), FGenerator.TOTAL_VARIATION)
    disjoint = [Categorical(probs=[1.0, 0.0]), Categorical(probs=[0.0, 1.0])]
    with pytest.raises(PreconditionError):
        lemma1_gap(disjoint, disjoint, np.array([0.6, 0.6]), FGenerator.KL)
    with pytest.raises(PreconditionError):
        lemma1_gap(disjoint, disjoint, np.array([1.0]), FGenerator.KL)


def test_mixture_weights_components() -> None:
    mixed = mixture([Categorical(probs=[1.0, 0.0]), Categorical(probs=[0.0, 1.0])], np.array([0.25, 0.75]))
    assert mixed.probs.tolist() == [0.25, 0.75]


def test_kde_single_sample_at_its_center() -> None:
    """
    Тест: один сэмпл, точка оценки совпадает с ним, d = 2: log p = -log(2 pi h^2).
    """
    h = 0.7
    s = np.array([[1.0, -2.0]])
    assert kde_log_likelihood(s, s, h) == pytest.approx(-np.log(2 * np.pi * h**2), abs=1e-12)


def test_kde_two_symmetric_samples() -> None:
    a, h = 1.3, 0.5
    value = kde_log_likelihood(np.array([[a], [-a]]), np.array([[0.0]]), h)
    expected = np.log(0.5 * 2 * np.exp(-(a**2) / (2 * h**2)) / np.sqrt(2 * np.pi * h**2))
    assert value == pytest.approx(expected, abs=1e-12)


def test_kde_gaussian_entropy() -> None:
    """
    Тест: KDE по 5000 сэмплам N(0, I_2) на 5000 независимых точках дает почти -log(2 pi e).
    """
    rng = np.random.default_rng(77)
    samples = rng.standard_normal((5000, 2))
    points = rng.standard_normal((5000, 2))
    value = kde_log_likelihood(samples, points, scott_bandwidth(samples))
    assert abs(value + np.log(2 * np.pi * np.e)) < 0.1


def test_kde_is_permutation_invariant(rng: np.random.Generator) -> None:
    samples = rng.standard_normal((300, 2))
    points = rng.standard_normal((600, 2))
    base = kde_log_likelihood(samples, points, 0.4)
    permuted = kde_log_likelihood(samples[rng.permutation(300)], points[rng.permutation(600)], 0.4)
    assert permuted == pytest.approx(base, rel=1e-12)


def test_kde_threads_match_serial(rng: np.random.Generator) -> None:
    samples = rng.standard_normal((100, 3))
    points = rng.standard_normal((1000, 3))
    assert kde_log_likelihood(samples, points, 0.5, max_workers=1) == kde_log_likelihood(
        samples, points, 0.5, max_workers=4
    )


def test_kde_far_points_stay_finite() -> None:
    value = kde_log_likelihood(np.zeros((1, 2)), np.array([[30.0, 0.0]]), 0.1)
    assert np.isfinite(value)
    assert value == pytest.approx(-0.5 * 900 / 0.01 - np.log(2 * np.pi * 0.01))


def test_kde_validation() -> None:
    with pytest.raises(ConfigurationError):
        kde_log_likelihood(np.zeros((2, 2)), np.zeros((2, 2)), 0.0)
    with pytest.raises(ConfigurationError):
        kde_log_likelihood(np.zeros((2, 2)), np.zeros((2, 3)), 1.0)
    with pytest.raises(ConfigurationError):
        kde_log_likelihood(np.empty((0, 2)), np.zeros((2, 2)), 1.0)


def test_scott_bandwidth() -> None:
    """
    Тест: h = m^(-1/(d+4)) * sigma.
    """
    assert scott_bandwidth(np.array([[0.0], [2.0]])) == pytest.approx(2 ** (-1 / 5) * np.sqrt(2.0))
    samples = np.array([[0.0, 0.0], [2.0, 4.0], [4.0, 8.0]])
    sigma = np.sqrt((4.0 + 16.0) / 2)
    assert scott_bandwidth(samples) == pytest.approx(3 ** (-1 / 6) * sigma)
    with pytest.raises(ConfigurationError):
        scott_bandwidth(np.ones((5, 2)))
    with pytest.raises(ConfigurationError):
        scott_bandwidth(np.ones((1, 2)))


def test_lloyd_hand_example() -> None:
    """
    Тест: {0, 1, 10, 11}, K = 2, старт {0, 10} - центроиды {0.5, 10.5}.
    """
    result = lloyd(np.array([[0.0], [1.0], [10.0], [11.0]]), 2, np.array([[0.0], [10.0]]), 10)
    assert result.centroids.tolist() == [[0.5], [10.5]]
    assert result.owner.tolist() == [0, 0, 1, 1]
    assert result.iters_run == 2
    assert not result.had_empty_cluster


def test_lloyd_immediate_fixed_point() -> None:
    points = np.array([[1.0, 2.0], [-3.0, 0.5]])
    result = lloyd(points, 2, points, 10)
    assert result.iters_run == 1
    assert np.array_equal(result.centroids, points)
    assert result.owner.tolist() == [0, 1]


def test_lloyd_keeps_empty_cluster_centroid() -> None:
    result = lloyd(np.array([[0.0], [1.0]]), 2, np.array([[0.0], [100.0]]), 5)
    assert result.had_empty_cluster
    assert result.centroids.tolist() == [[0.5], [100.0]]


def test_lloyd_objective_never_increases(rng: np.random.Generator) -> None:
    points = rng.standard_normal((200, 2)) * 3
    result = lloyd(points, 4, points[:4], 50)
    objectives = [step.objective for step in result.trajectory]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(objectives, objectives[1:]))


def test_lloyd_validation() -> None:
    with pytest.raises(PreconditionError):
        lloyd(np.zeros((4, 2)), 2, np.zeros((2, 2)), 5)
    with pytest.raises(PreconditionError):
        lloyd(np.zeros((4, 2)), 2, np.zeros((3, 2)), 5)


def brute_force_scores(owner: np.ndarray, labels: np.ndarray) -> tuple[float, float]:
    n = len(owner)
    clusters, classes = sorted(set(owner.tolist())), sorted(set(labels.tolist()))
    table = [[sum(1 for i in range(n) if owner[i] == k and labels[i] == c) for c in classes] for k in clusters]
    purity = sum(max(row) for row in table) / n
    index = sum(comb(v, 2) for row in table for v in row)
    rows = sum(comb(sum(row), 2) for row in table)
    cols = sum(comb(sum(row[c] for row in table), 2) for c in range(len(classes)))
    expected = rows * cols / comb(n, 2)
    return purity, (index - expected) / (0.5 * (rows + cols) - expected)


def test_cluster_metrics_identity_and_constant() -> None:
    """
    Тест: совпадение с метками - purity 1 и ARI 1, константа - доля самого большого класса.
    """
    labels = np.array([0, 0, 1, 1, 1, 2])
    assert cluster_metrics(labels, labels) == (1.0, 1.0)
    purity, ari = cluster_metrics(np.zeros(6, dtype=int), labels)
    assert purity == pytest.approx(0.5)
    assert ari == pytest.approx(0.0)


def test_cluster_metrics_match_contingency_oracle(rng: np.random.Generator) -> None:
    owner = rng.integers(0, 4, size=120)
    labels = rng.integers(0, 3, size=120)
    purity, ari = cluster_metrics(owner, labels)
    expected_purity, expected_ari = brute_force_scores(owner, labels)
    assert purity == pytest.approx(expected_purity, abs=1e-12)
    assert ari == pytest.approx(expected_ari, abs=1e-12)
    assert 0.0 <= purity <= 1.0 and -1.0 <= ari <= 1.0


def test_cluster_metrics_length_mismatch() -> None:
    with pytest.raises(ConfigurationError):
        cluster_metrics(np.zeros(3, dtype=int), np.zeros(4, dtype=int))


def test_composition_counts() -> None:
    counts = composition(np.array([0, 0, 1, 1]), np.array([1, 0, 1, 1]), k=3)
    assert counts.tolist() == [[1, 1], [0, 2], [0, 0]]


def test_metrics_csv_round_trip(tmp_path: Path) -> None:
    rows = [MetricRow("run", 1, "purity", 0.1 + 0.2), MetricRow("run", 10, "kde_loglik", -2.837877066409345)]
    path = write_metrics_csv(rows, tmp_path / "metrics.csv")
    assert path.read_text().splitlines()[0] == "run_id,round,metric,value"
    assert read_metrics_csv(path) == rows


def test_metrics_csv_errors(tmp_path: Path) -> None:
    path = tmp_path / "metrics.csv"
    path.write_text("run,round,metric\n")
    with pytest.raises(CsvParseError) as exc:
        read_metrics_csv(path)
    assert exc.value.line == 1
    path.write_text("run_id,round,metric,value\nrun,1,purity,0.5\nrun,two,purity,0.5\n")
    with pytest.raises(CsvParseError) as exc:
        read_metrics_csv(path)
    assert exc.value.line == 3
