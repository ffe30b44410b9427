import io
import json
import math

import numpy as np
import pytest

from trustcoop.channel import ChannelConfig
from trustcoop.errors import ConfigError
from trustcoop.experiments import (
    CSV_COLUMNS, PRESET_NAMES, ExperimentConfig, SolverOptions, Sweep, config_from_dict, default_workers,
    emit_csv, load_config, preset, read_csv, run_many, run_sweep, with_trials, write_csv,
)


def small(variable="Q", values=(0.2, 0.6), **kw):
    return ExperimentConfig(sweep=Sweep(variable, values), trials=kw.pop("trials", 12), **kw)


def test_rows_follow_sweep_and_columns():
    res = run_sweep(small(alpha=0.7))
    assert [r.sweep_value for r in res.rows] == [0.2, 0.6]
    assert all(r.alpha == 0.7 for r in res.rows)
    assert res.per_trial.shape == (12, 2, 5)
    r = res.rows[0]
    assert math.isnan(r.mean_eta) and math.isnan(r.mean_lambda)
    assert r.mean_rate_ru2 >= r.Q


def test_means_are_trial_averages():
    res = run_sweep(small())
    for i, row in enumerate(res.rows):
        assert row.mean_rate_ru1 == pytest.approx(res.per_trial[:, i, 0].mean(), rel=1e-14)


def test_eta_and_lambda_only_where_defined():
    miso = run_sweep(small("alpha", (0.5,), channel=ChannelConfig(n1=2, n2=1), trials=3)).rows[0]
    assert 0 <= miso.mean_eta <= 1 and math.isnan(miso.mean_lambda)
    mimo = run_sweep(small("alpha", (0.5,), channel=ChannelConfig(n1=2, n2=2), trials=2,
                           solver=SolverOptions(lambda_M=5))).rows[0]
    assert 0 <= mimo.mean_lambda <= 1 and math.isnan(mimo.mean_eta)


def test_worker_count_does_not_change_results():
    cfg = small(trials=9)
    text = []
    for workers in (1, 2):
        buf = io.StringIO()
        write_csv(run_sweep(cfg, workers=workers), buf)
        text.append(buf.getvalue())
    assert text[0] == text[1]


def test_feasible_fraction_counts_every_draw():
    cfg = small(values=(0.1, 3.0), trials=20)
    res = run_sweep(cfg)
    assert res.rows[0].feasible_frac == pytest.approx(1.0) or res.resamples > 0
    assert 0 < res.rows[1].feasible_frac <= 1
    assert res.rows[1].feasible_frac == pytest.approx(20 / (20 + res.resamples))


def test_g21_sweep_rescales_relay_channel():
    res = run_sweep(small("g21_dB", (-40.0, -20.0), trials=15, Q=0.3))
    lo, hi = res.rows
    assert hi.mean_rate_ru1 >= lo.mean_rate_ru1


def test_csv_round_trip(tmp_path):
    res = run_sweep(small(trials=4))
    path = tmp_path / "out.csv"
    emit_csv(res, path)
    text = path.read_bytes()
    assert b"\r\n" not in text
    assert text.splitlines()[0].decode() == ",".join(CSV_COLUMNS)
    back = read_csv(path)
    for r0, r1 in zip(res.rows, back.rows):
        assert r0.scheme == r1.scheme and r0.trials == r1.trials
        assert r1.mean_rate_ru1 == pytest.approx(r0.mean_rate_ru1, rel=1e-8)


def test_csv_writes_nan_literal():
    buf = io.StringIO()
    write_csv(run_sweep(small(trials=2)), buf)
    assert ",nan," in buf.getvalue()


def test_config_parsing(tmp_path):
    doc = {"channel": {"n1": 2, "n2": 1}, "params": {"alpha": 0.3, "Q": 0.4},
           "sweep": {"variable": "alpha", "values": [0, 0.5, 1]}, "trials": 5, "seed": 3, "scheme": "no_sic"}
    cfg = config_from_dict(doc)
    assert cfg.channel.n1 == 2 and cfg.Q == 0.4 and cfg.sweep.values == (0.0, 0.5, 1.0)
    p = tmp_path / "c.json"
    p.write_text(json.dumps([doc, doc]))
    assert len(load_config(p)) == 2


@pytest.mark.parametrize("doc, path", [
    ({"sweep": {"variable": "alpha", "values": [0.1]}, "bogus": 1}, "bogus"),
    ({}, "sweep"),
    ({"sweep": {"variable": "rho", "values": [1]}}, "sweep.variable"),
    ({"sweep": {"variable": "alpha", "values": [2.0]}}, "sweep.values[0]"),
    ({"sweep": {"variable": "Q", "values": [1]}, "channel": {"n1": 0}}, "channel.n1"),
    ({"sweep": {"variable": "Q", "values": [1]}, "solver": {"eps": -1}}, "solver.eps"),
    ({"sweep": {"variable": "Q", "values": [1]}, "trials": 0}, "trials"),
    ({"sweep": {"variable": "Q", "values": [1]}, "scheme": "best"}, "scheme"),
])
def test_config_errors_name_the_field(doc, path):
    with pytest.raises(ConfigError) as e:
        config_from_dict(doc)
    assert e.value.path == path


def test_list_config_errors_carry_index(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps([{"sweep": {"variable": "Q", "values": [1]}}, {"trials": 1}]))
    with pytest.raises(ConfigError) as e:
        load_config(p)
    assert e.value.path == "[1].sweep"


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigError):
        load_config(bad)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_presets_build(name):
    configs = preset(name, trials=7, seed=2)
    assert configs and all(c.trials == 7 and c.seed == 2 for c in configs)
    # curves of one preset share their draws
    assert len({(c.channel.n1, c.channel.n2, c.q_needed()) for c in configs}) == 1 or name == "fig3"


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset("fig1")


def test_with_trials_and_run_many():
    configs = with_trials(preset("fig5", trials=50), trials=3, seed=9)
    assert all(c.trials == 3 and c.seed == 9 for c in configs)
    res = run_many(configs)
    assert len(res.rows) == sum(len(c.sweep.values) for c in configs)


def test_threads_env(monkeypatch):
    monkeypatch.setenv("TRUSTCOOP_THREADS", "1")
    assert default_workers() == 1
    monkeypatch.setenv("TRUSTCOOP_THREADS", "zero")
    with pytest.raises(ConfigError):
        default_workers()


def test_paired_draws_across_schemes():
    a = run_sweep(small(scheme="proposed", trials=6))
    b = run_sweep(small(scheme="no_cooperation", trials=6))
    assert np.all(a.per_trial[:, :, 0] >= b.per_trial[:, :, 0] - 1e-12)
