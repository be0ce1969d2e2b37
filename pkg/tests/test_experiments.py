import pytest

from reluriesz.experiments import COLUMNS, ConfigError, ExperimentConfig, format_value, run


def _data_rows(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return lines[0].split(","), [l.split(",") for l in lines[1:]]


def test_empty_grid_rejected():
    with pytest.raises(ConfigError, match="radii"):
        ExperimentConfig.from_dict({"kind": "gram_check", "dims": [1], "radii": []})
    with pytest.raises(ConfigError, match="kind"):
        ExperimentConfig.from_dict({"kind": "nope"})
    with pytest.raises(ConfigError, match="s:"):
        ExperimentConfig.from_dict({"kind": "rates_sobolev", "dims": [2], "s": [1.5], "radii": [2], "seeds": [0]})


def test_single_cell_sobolev():
    cfg = {"kind": "rates_sobolev", "dims": [2], "s": [0.5], "radii": [4], "seeds": [0], "r_max": 16}
    text = run(cfg)
    header, rows = _data_rows(text)
    assert header == COLUMNS["rates_sobolev"] and len(rows) == 1
    row = dict(zip(header, rows[0]))
    assert row["error"] == "" and float(row["error_l2"]) <= float(row["certified_bound"])


def test_byte_identical_reruns():
    cfg = {"kind": "rates_barron", "dims": [2], "s": [0.5], "eps": [0.2, 0.1], "seeds": [1, 0]}
    assert run(cfg) == run(cfg)


def test_parallel_matches_serial():
    cfg = {"kind": "lattice_bounds", "dims": [3, 1, 2], "t": [2, 0.5, 1]}
    assert run(cfg, workers=2) == run(cfg)


def test_rows_sorted_and_provenance():
    text = run({"kind": "gram_check", "dims": [3, 1], "radii": [3]})
    assert text.startswith("# config_sha256: ")
    assert "# generator: numpy.Philox" in text and "# tool: reluriesz" in text
    _, rows = _data_rows(text)
    assert [r[0] for r in rows] == ["1", "3"]
    assert all(r[5] == "true" for r in rows)


def test_failing_cell_recorded():
    cfg = {"kind": "rates_sobolev", "dims": [1], "s": [0.5], "radii": [2], "seeds": [0], "r_max": 0.5}
    header, rows = _data_rows(run(cfg))
    row = dict(zip(header, rows[0]))
    assert row["error"].startswith("ValueError") and row["dim"] == "1" and row["width"] == ""


def test_recovery_sweep_auto_delta():
    cfg = {"kind": "recovery_sweep", "methods": ["bp", "ls"], "dims": [1], "s": [0.5], "radii": [2],
           "n_samples": [30], "seeds": [0]}
    header, rows = _data_rows(run(cfg))
    assert [r[0] for r in rows] == ["bp", "ls"]
    assert all(dict(zip(header, r))["error"] == "" for r in rows)


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(True) == "true" and format_value(3) == "3"
