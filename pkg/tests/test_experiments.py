import csv
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Callable

import numpy as np
import pytest
from pydantic import ValidationError

from genmix.config import settings
from genmix.data.io import save_csv
from genmix.data.models import Dataset
from genmix.eval.metrics import MetricRow, read_metrics_csv, write_metrics_csv
from genmix.exceptions import ConfigurationError, TrainingError
from genmix.experiments import runner
from genmix.experiments.compare import compare, final_metric, format_table, write_comparison_csv
from genmix.experiments.plots import render_scatter_svg
from genmix.experiments.runner import (
    EXIT_INVALID_CONFIG,
    EXIT_OK,
    EXIT_RUN_FAILED,
    inputs_digest,
    load_config,
    run_experiment,
)
from genmix.experiments.schemas import Baseline, ExperimentConfig
from genmix.trainer.schemas import SplitMode

CONFIGS_DIR = Path(__file__).parent.parent / "configs"

REFERENCE_LOGLIK: dict[int, float] = {3: -4.59, 5: -2.74, 9: -2.51}
LOGLIK_TOLERANCE: float = 2.0
MIN_PURITY: dict[int, float] = {3: 0.95, 5: 0.95, 9: 0.7}
PRESET_SEEDS: range = range(5)
SEED_QUORUM: int = 4

WriteConfig = Callable[..., Path]


def test_bag_baseline_resolution(tiny_config: dict[str, Any], write_config: WriteConfig) -> None:
    """
    Тест: bag - равные куски, замороженное разбиение, без соревнования.
    """
    tiny_config["baseline"] = "bag"
    config = load_config(write_config(tiny_config))
    assert config.baseline is Baseline.BAG
    assert config.train.split is SplitMode.BALANCED
    assert config.train.freeze_assignment
    assert config.train.min_points == 1
    assert config.train.k == 3


def test_single_large_baseline_resolution(tiny_config: dict[str, Any], write_config: WriteConfig) -> None:
    """
    Тест: single_large - одна модель со скрытыми слоями по 150 нейронов.
    """
    tiny_config["baseline"] = "single_large"
    tiny_config["train"]["vae"]["hidden_widths"] = [50, 50]
    config = load_config(write_config(tiny_config))
    assert config.train.k == 1
    assert config.train.vae.hidden_widths == [150, 150]
    assert config.train.freeze_assignment


def test_seed_override(tiny_config: dict[str, Any], write_config: WriteConfig) -> None:
    assert load_config(write_config(tiny_config), seed=7).train.seed == 7


@pytest.mark.parametrize(
    "mutate",
    [
        lambda c: c.update(run_id="bad/id"),
        lambda c: c.update(dataset_path="data.csv"),
        lambda c: c.pop("data"),
        lambda c: c["train"].update(k=0),
        lambda c: c["eval"].update(held_out_fraction=1.5),
        lambda c: c["train"].update(model_kind="degenerate", likelihood_backend="nearest_centroid")
        or c.update(baseline="single_large"),
    ],
)
def test_invalid_configs_exit_with_2(
    tiny_config: dict[str, Any], write_config: WriteConfig, tmp_path: Path, mutate: Callable[[dict], Any]
) -> None:
    mutate(tiny_config)
    out = tmp_path / "out"
    assert run_experiment(write_config(tiny_config), out=out) == EXIT_INVALID_CONFIG
    assert not out.exists()


def test_unreadable_config_exit_with_2(tmp_path: Path) -> None:
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_experiment(bad) == EXIT_INVALID_CONFIG
    assert run_experiment(tmp_path / "missing.json") == EXIT_INVALID_CONFIG
    with pytest.raises(ConfigurationError) as exc:
        load_config(bad)
    assert "<root>" in str(exc.value) or "json" in str(exc.value).lower()


def test_malformed_dataset_exit_with_2(tiny_config: dict[str, Any], write_config: WriteConfig, tmp_path: Path) -> None:
    data_path = tmp_path / "data.csv"
    data_path.write_text("x0,x1\n1,2\n3\n")
    tiny_config.pop("data")
    tiny_config["dataset_path"] = str(data_path)
    assert run_experiment(write_config(tiny_config), out=tmp_path / "out") == EXIT_INVALID_CONFIG


def test_missing_dataset_exit_with_2(tiny_config: dict[str, Any], write_config: WriteConfig, tmp_path: Path) -> None:
    tiny_config.pop("data")
    tiny_config["dataset_path"] = str(tmp_path / "absent.csv")
    out = tmp_path / "out"
    assert run_experiment(write_config(tiny_config), out=out) == EXIT_INVALID_CONFIG
    assert not out.exists()


def test_dry_run_writes_nothing(tiny_config: dict[str, Any], write_config: WriteConfig, tmp_path: Path) -> None:
    out = tmp_path / "out"
    assert run_experiment(write_config(tiny_config), out=out, dry_run=True) == EXIT_OK
    assert not out.exists()


def test_run_writes_all_artifacts(finished_run: Path) -> None:
    """
    Тест: завершенный запуск содержит конфигурацию, хэши, метрики, историю,
    состав компонент, чекпоинты и графики.
    """
    names = {p.name for p in finished_run.iterdir()}
    assert {
        "config.json",
        "inputs.sha256",
        "metrics.csv",
        "history.csv",
        "timings.csv",
        "composition.csv",
        "checkpoints",
        "samples_round_1.svg",
        "samples_round_2.svg",
    } <= names
    assert {p.name for p in (finished_run / "checkpoints").iterdir()} == {"round_1", "round_2"}

    rows = read_metrics_csv(finished_run / "metrics.csv")
    metrics = {(r.round, r.metric) for r in rows}
    assert {(1, "purity"), (1, "ari"), (2, "purity"), (2, "ari"), (2, "kde_loglik"), (2, "kde_bandwidth")} <= metrics
    assert all(r.run_id == "tiny" for r in rows)
    assert np.isfinite(final_metric(rows, "kde_loglik"))

    config = ExperimentConfig.model_validate_json((finished_run / "config.json").read_text())
    assert config.run_id == "tiny"

    with (finished_run / "composition.csv").open(newline="") as fh:
        composition = list(csv.reader(fh))
    assert composition[0] == ["component", "label_0", "label_1", "label_2"]
    assert sum(int(v) for row in composition[1:] for v in row[1:]) == 240

    history = (finished_run / "history.csv").read_text().splitlines()
    assert len(history) == 1 + 2 * 3


def test_inputs_digest_matches_sha256(finished_run: Path) -> None:
    lines = (finished_run / "inputs.sha256").read_text().splitlines()
    assert len(lines) == 2
    config_line = lines[0].split("  ")
    assert config_line[1] == "config.json"
    text = (finished_run / "config.json").read_text()
    assert config_line[0] == hashlib.sha256(text[:-1].encode("utf-8")).hexdigest()
    assert lines[1].endswith("  dataset")


def test_inputs_digest_depends_on_labels() -> None:
    points = np.zeros((3, 2))
    a = inputs_digest("{}", Dataset(points=points))
    b = inputs_digest("{}", Dataset(points=points, labels=[0, 1, 2]))
    assert a.splitlines()[0] == b.splitlines()[0]
    assert a.splitlines()[1] != b.splitlines()[1]


def test_metrics_are_reproducible(tiny_config: dict[str, Any], write_config: WriteConfig, tmp_path: Path) -> None:
    """
    Тест: два запуска с одним seed дают побитово одинаковый metrics.csv.
    """
    path = write_config(tiny_config)
    assert run_experiment(path, out=tmp_path / "a") == EXIT_OK
    assert run_experiment(path, out=tmp_path / "b") == EXIT_OK
    assert (tmp_path / "a" / "metrics.csv").read_bytes() == (tmp_path / "b" / "metrics.csv").read_bytes()
    assert (tmp_path / "a" / "history.csv").read_bytes() == (tmp_path / "b" / "history.csv").read_bytes()


def test_run_from_csv_dataset(tiny_config: dict[str, Any], write_config: WriteConfig, tmp_path: Path) -> None:
    rng = np.random.default_rng(0)
    points = np.vstack([rng.standard_normal((60, 2)), rng.standard_normal((60, 2)) + 8])
    data_path = save_csv(Dataset(points=points), tmp_path / "data.csv")
    tiny_config.pop("data")
    tiny_config["dataset_path"] = str(data_path)
    tiny_config["train"]["k"] = 2
    out = tmp_path / "out"
    assert run_experiment(write_config(tiny_config), out=out) == EXIT_OK
    assert not (out / "composition.csv").exists()
    rows = read_metrics_csv(out / "metrics.csv")
    assert [r.metric for r in rows] == ["kde_loglik", "kde_bandwidth"]


def test_default_run_dir_comes_from_settings(
    tiny_config: dict[str, Any], write_config: WriteConfig, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    monkeypatch.setattr(settings, "GENMIX_RUNS_DIR", str(tmp_path / "runs"))
    tiny_config["train"]["rounds"] = 1
    assert run_experiment(write_config(tiny_config)) == EXIT_OK
    assert (tmp_path / "runs" / "tiny" / "metrics.csv").exists()


def test_training_failure_exits_with_1(
    tiny_config: dict[str, Any], write_config: WriteConfig, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    """
    Тест: ошибка обучения дает код 1, накопленные артефакты записываются.
    """

    def failing_run(*args: Any, **kwargs: Any) -> None:
        raise TrainingError("loss exploded", round=1, component=0)

    monkeypatch.setattr(runner, "run", failing_run)
    out = tmp_path / "out"
    assert run_experiment(write_config(tiny_config), out=out) == EXIT_RUN_FAILED
    assert (out / "metrics.csv").read_text().splitlines() == ["run_id,round,metric,value"]
    assert (out / "history.csv").exists()


def test_shipped_configs_validate() -> None:
    """
    Тест: все конфигурации из configs/ проходят валидацию.
    """
    paths = sorted(CONFIGS_DIR.glob("*.json"))
    assert len(paths) == 9
    for path in paths:
        config = load_config(path)
        assert config.run_id == path.stem
        assert config.n_modes in (3, 5, 9)
        if config.baseline is Baseline.KVAE:
            assert config.train.k == config.n_modes


def test_shipped_presets_scale_training_budget() -> None:
    """
    Тест: бейзлайны одного пресета обучаются с одинаковым бюджетом,
    а предобучение растет с числом мод (10, 100, 1000 эпох).
    """
    budgets = {}
    for path in sorted(CONFIGS_DIR.glob("*.json")):
        train = json.loads(path.read_text())["train"]
        budget = (train["pretrain_epochs"], train["rounds"], train["gen_epochs_per_round"])
        assert budgets.setdefault(path.stem.split("_")[0], budget) == budget, path.name
    assert budgets == {"3modes": (10, 100, 10), "5modes": (100, 130, 10), "9modes": (1000, 10, 10)}


def write_fake_run(root: Path, run_id: str, loglik: float, modes: int, baseline: str = "kvae") -> Path:
    run_dir = root / run_id
    run_dir.mkdir(parents=True)
    write_metrics_csv(
        [MetricRow(run_id, 1, "kde_loglik", loglik - 1.0), MetricRow(run_id, 2, "kde_loglik", loglik)],
        run_dir / "metrics.csv",
    )
    config = ExperimentConfig(
        run_id=run_id,
        baseline=baseline,
        data={"means": [(float(m), 0.0) for m in range(modes)]},
    )
    (run_dir / "config.json").write_text(config.model_dump_json())
    return run_dir


def test_compare_orders_and_marks_best(tmp_path: Path, caplog: pytest.LogCaptureFixture) -> None:
    """
    Тест: строки упорядочены по числу мод и убыванию правдоподобия, лучший отмечен в каждой группе,
    запуски без метрик пропускаются с предупреждением.
    """
    dirs = [
        write_fake_run(tmp_path, "three_bag", -3.0, 3, "bag"),
        write_fake_run(tmp_path, "five_kvae", -4.0, 5),
        write_fake_run(tmp_path, "three_kvae", -2.5, 3),
    ]
    empty = tmp_path / "empty"
    empty.mkdir()
    no_kde = tmp_path / "no_kde"
    no_kde.mkdir()
    write_metrics_csv([MetricRow("no_kde", 1, "purity", 1.0)], no_kde / "metrics.csv")

    with caplog.at_level(logging.WARNING, logger="genmix.experiments.compare"):
        table = compare([*dirs, empty, no_kde])
    assert [(r.run_id, r.best) for r in table] == [("three_kvae", True), ("three_bag", False), ("five_kvae", True)]
    assert table[0].kde_loglik == -2.5
    assert table[1].baseline == "bag"
    assert "no metrics.csv" in caplog.text
    assert "no kde_loglik" in caplog.text

    lines = write_comparison_csv(table, tmp_path / "comparison.csv").read_text().splitlines()
    assert lines[0] == "run_id,baseline,n_modes,kde_loglik,best"
    assert lines[1] == "three_kvae,kvae,3,-2.5,1"
    text = format_table(table)
    assert text.splitlines()[1].endswith("*")
    assert not text.splitlines()[2].endswith("*")


def test_compare_run_without_config(tmp_path: Path) -> None:
    run_dir = tmp_path / "bare"
    run_dir.mkdir()
    write_metrics_csv([MetricRow("bare", 3, "kde_loglik", -1.0)], run_dir / "metrics.csv")
    (row,) = compare([run_dir])
    assert (row.baseline, row.n_modes, row.best) == (None, None, True)


def test_scatter_svg_groups_components() -> None:
    """
    Тест: данные в группе data, сэмплы в группах component-j, число кружков совпадает.
    """
    true_points = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 0.5]])
    samples = np.array([[0.5, 0.5], [1.5, 1.5]])
    svg = render_scatter_svg(true_points, samples, np.array([0, 2]), title="run, round 3")
    assert svg.startswith("<svg")
    assert svg.count("<circle") == 5
    assert '<g id="data">' in svg
    assert '<g id="component-0">' in svg and '<g id="component-2">' in svg
    assert '<g id="component-1">' not in svg
    assert "run, round 3" in svg


def test_scatter_svg_single_point() -> None:
    svg = render_scatter_svg(np.zeros((1, 2)), np.zeros((1, 2)), np.array([0]))
    assert "nan" not in svg
    assert svg.count("<circle") == 2


@pytest.fixture(scope="module")
def preset_run(tmp_path_factory: pytest.TempPathFactory) -> Callable[[str, int], Path]:
    """
    Запускает пресет из configs/ с заданным зерном, каждый не более одного раза за модуль.

    Returns:
        Callable[[str, int], Path]: (имя пресета, зерно) -> каталог запуска
    """
    root = tmp_path_factory.mktemp("presets")
    finished: dict[tuple[str, int], Path] = {}

    def run_once(name: str, seed: int) -> Path:
        if (name, seed) not in finished:
            out = root / f"{name}_seed{seed}"
            assert run_experiment(CONFIGS_DIR / f"{name}.json", seed=seed, out=out) == EXIT_OK
            finished[(name, seed)] = out
        return finished[(name, seed)]

    return run_once


@pytest.mark.slow
@pytest.mark.parametrize("modes", [3, 5, 9])
def test_mixture_separates_modes(preset_run: Callable[[str, int], Path], modes: int) -> None:
    """
    Тест: компоненты разбирают моды (purity не ниже порога) хотя бы на 4 из 5 зерен.
    """
    purities = [
        final_metric(read_metrics_csv(preset_run(f"{modes}modes_kvae", seed) / "metrics.csv"), "purity")
        for seed in PRESET_SEEDS
    ]
    assert sum(p >= MIN_PURITY[modes] for p in purities) >= SEED_QUORUM, purities


@pytest.mark.slow
@pytest.mark.parametrize("modes", [3, 5, 9])
def test_mixture_beats_baselines(preset_run: Callable[[str, int], Path], modes: int) -> None:
    """
    Тест: на 4 из 5 зерен смесь с соревнованием лучше bag и single_large по KDE-правдоподобию,
    а ее значение отличается от опорного не более чем на 2 nats.
    """
    wins = within_band = 0
    for seed in PRESET_SEEDS:
        table = compare([preset_run(f"{modes}modes_{baseline.value}", seed) for baseline in Baseline])
        loglik = {row.baseline: row.kde_loglik for row in table}
        kvae = loglik[Baseline.KVAE.value]
        wins += kvae > loglik[Baseline.BAG.value] and kvae > loglik[Baseline.SINGLE_LARGE.value]
        within_band += abs(kvae - REFERENCE_LOGLIK[modes]) <= LOGLIK_TOLERANCE
    assert wins >= SEED_QUORUM
    assert within_band >= SEED_QUORUM


def test_experiment_config_rejects_unknown_baseline() -> None:
    with pytest.raises(ValidationError):
        ExperimentConfig(run_id="x", baseline="boosting", data={"means": [(0.0, 0.0)]})
