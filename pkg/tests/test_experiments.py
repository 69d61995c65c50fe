import numpy as np
import pytest

from meanop.estimators import mean_op
from meanop.experiments import (
    ExperimentRecord,
    emit,
    gaussian_pair_sample,
    load_records,
    run_figure2,
    run_figure3,
    run_table2,
    spearman_p_mu_vs_gap,
    toy_dataset,
    uci_surrogates,
)
from meanop.samples import NoiseSpec


def test_toy_dataset_construction():
    s, mu_norm = toy_dataset(0.6, neg_weight=5)
    assert s.m == 8
    negatives = s.observations[s.labels < 0]
    assert np.unique(negatives, axis=0).shape[0] == 1
    assert np.array_equal(negatives[0], np.array([0.0, 1.0]))
    positives = s.observations[s.labels > 0]
    assert positives.shape == (3, 2)
    assert np.allclose(positives, np.array([0.2, 1.0 / 3.0]))
    assert mu_norm == pytest.approx(mean_op(s).norm, abs=1e-15)


def test_toy_dataset_collapses_as_phi_vanishes():
    s, _ = toy_dataset(1e-12, neg_weight=1)
    positives = s.observations[s.labels > 0]
    assert np.allclose(positives, np.array([0.0, 1.0 / 3.0]), atol=1e-9)


def test_toy_dataset_reported_norm_single_weight():
    # with unit negative multiplicity the label contributions cancel in the
    # second coordinate and the norm is phi/4
    for phi in (0.01, 0.5, 1.0):
        _, mu_norm = toy_dataset(phi, neg_weight=1)
        assert mu_norm == pytest.approx(phi / 4.0, abs=1e-12)
    with pytest.raises(ValueError):
        toy_dataset(0.0)
    with pytest.raises(ValueError):
        toy_dataset(1.0, neg_weight=0)


def test_figure2_zero_noise_and_dominance():
    records, checks = run_figure2([1e-3, 1e-1, 1.0], [0.0, 0.2], lam=1e-6)
    assert checks["robustness_budget_dominates"]
    assert checks["zero_noise_gap_is_zero"]
    for r in records:
        if r.noise.p_plus == 0.0:
            assert abs(r.metrics["d_noisy"]) <= 1e-8
            assert abs(r.metrics["d_clean"]) <= 1e-8
            assert r.metrics["d_models"] == pytest.approx(1.0, abs=1e-9)
        assert r.metrics["d_noisy"] <= r.metrics["eps_budget"] + 1e-10


def test_figure2_gap_nondecreasing_in_phi():
    phis = np.logspace(-4, 0, 9)
    records, _ = run_figure2(phis, [0.2], lam=1e-6)
    gaps = [r.metrics["d_noisy"] for r in records]
    assert all(b >= a - 1e-12 for a, b in zip(gaps, gaps[1:]))


def test_figure2_reproducible():
    a, _ = run_figure2([0.01, 0.1], [0.1], lam=1e-6)
    b, _ = run_figure2([0.01, 0.1], [0.1], lam=1e-6)
    for ra, rb in zip(a, b):
        assert ra == rb


def test_figure3_records_and_checks():
    datasets = {
        "g1": gaussian_pair_sample(m=120, d=4, separation=1.5, offset=1.0, seed=1),
        "g2": gaussian_pair_sample(m=150, d=3, separation=0.8, offset=2.0, seed=2),
    }
    records, checks = run_figure3(datasets, p_grid=[0.0, 0.2, 0.4], trials=6, master_seed=3)
    assert len(records) == 2 * 3 * 6
    assert checks["zero_noise_gap_is_zero"]
    assert checks["spearman_p_mu_vs_d_clean"] > 0.6
    for r in records:
        assert 0.0 <= r.metrics["r01_noisy_model"] <= 1.0
        if r.noise.p_plus == 0.0:
            assert abs(r.metrics["d_clean"]) <= 1e-6


def test_figure3_noisy_mean_norm_shrinks_with_p():
    datasets = {"g": gaussian_pair_sample(m=400, d=4, separation=1.5, offset=0.5, seed=5)}
    records, _ = run_figure3(datasets, p_grid=[0.0, 0.2, 0.4], trials=10, master_seed=1)
    by_p = {}
    for r in records:
        by_p.setdefault(r.noise.p_plus, []).append(r.metrics["mu_norm_noisy"])
    means = [np.mean(by_p[p]) for p in sorted(by_p)]
    assert means[0] > means[1] > means[2]


def test_figure3_determinism():
    datasets = {"g": gaussian_pair_sample(m=80, d=3, separation=1.0, offset=1.0, seed=0)}
    a, _ = run_figure3(datasets, p_grid=[0.3], trials=3, master_seed=9)
    b, _ = run_figure3(datasets, p_grid=[0.3], trials=3, master_seed=9)
    assert a == b


def test_spearman_helper_requires_enough_records():
    with pytest.raises(ValueError):
        spearman_p_mu_vs_gap([])


def test_table2_smoke_and_determinism():
    s = gaussian_pair_sample(m=160, d=4, separation=1.4, offset=1.5, seed=4)
    kwargs = dict(
        noise_grid=[(0.0, 0.0), (0.2, 0.4)],
        trials=2,
        folds=3,
        lambda_grid=(1e-2, 1.0),
        master_seed=11,
    )
    records, summary, checks = run_table2("g", s, **kwargs)
    assert checks["test_errors_in_range"]
    assert set(summary) == {"(0,0)", "(0.2,0.4)"}
    for cell in summary.values():
        assert 0.0 <= cell["sgd"] <= 1.0 and 0.0 <= cell["mosgd"] <= 1.0
        assert cell["diff"] == pytest.approx(cell["mosgd"] - cell["sgd"], abs=1e-15)
    records2, summary2, _ = run_table2("g", s, **kwargs)
    assert records == records2 and summary == summary2
    for r in records:
        assert {"test_error_sgd", "test_error_mosgd", "lambda_sgd", "lambda_mosgd"} <= set(r.metrics)


def test_surrogates_shapes():
    surro = uci_surrogates(0)
    assert set(surro) == {"synth_a", "synth_b", "synth_c"}
    sizes = sorted(s.m for s in surro.values())
    assert sizes == [300, 500, 700]
    again = uci_surrogates(0)
    assert np.array_equal(again["synth_a"].observations, surro["synth_a"].observations)
    assert np.array_equal(again["synth_a"].labels, surro["synth_a"].labels)


def test_record_validation():
    noise = NoiseSpec(0.1, 0.1)
    with pytest.raises(ValueError):
        ExperimentRecord("id", "d", noise, "logistic", 0.1, 10, 0, {"d_models": 1.5})
    with pytest.raises(ValueError):
        ExperimentRecord("id", "d", noise, "logistic", 0.1, 10, 0, {"x": float("nan")})
    with pytest.raises(ValueError):
        ExperimentRecord("id", "d", noise, "logistic", 0.1, 10, 0, {"test_error_sgd": 1.2})


def _records():
    return [
        ExperimentRecord("a/1", "ds", NoiseSpec(0.2, 0.1), "logistic", 1e-3, 100, 7,
                         {"d_clean": 0.125, "p_mu_norm": 0.3}),
        ExperimentRecord("a/2", "ds", NoiseSpec(0.0, 0.0), "logistic", 1e-3, 100, 8,
                         {"d_clean": 0.0}),
    ]


def test_emit_round_trip_csv(tmp_path):
    path = tmp_path / "records.csv"
    records = _records()
    emit(records, "csv", path)
    header = path.read_text().splitlines()[0]
    assert header == "experiment_id,dataset,loss,lam,T,seed,p_plus,p_minus,d_clean,p_mu_norm"
    loaded = load_records(path)
    assert loaded == records


def test_emit_round_trip_json(tmp_path):
    path = tmp_path / "records.json"
    records = _records()
    emit(records, "json", path)
    assert load_records(path) == records


def test_emit_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        emit([], "csv", tmp_path / "none.csv")
    with pytest.raises(ValueError):
        emit(_records(), "xml", tmp_path / "none.xml")
