"""Sweep harness tests: spec validation, determinism, emission formats."""

import csv
import json
import math

import numpy as np
import pytest

from ramanjump.experiments import (
    ExperimentResult,
    SweepSpec,
    emit,
    run_bandwidth_scan,
    run_diagnostics_trace,
    run_fidelity_map,
    run_robustness_scan,
    run_sweep,
    run_time_trace,
)

# small axes keep every scan in this file under a few seconds
RATIOS = (0.02, 0.04)


def _scan_spec(**overrides):
    base = dict(kind="bandwidth_scan", protocol="jump",
                tiers=("rwa3",), axes={"bandwidth_ratio": RATIOS},
                fixed={"n_pairs": 1})
    base.update(overrides)
    return SweepSpec(**base)


def test_spec_rejects_unknown_kind():
    with pytest.raises(ValueError, match="kind"):
        SweepSpec(kind="bogus", protocol="jump")


def test_spec_rejects_unknown_protocol():
    with pytest.raises(ValueError, match="protocol"):
        SweepSpec(kind="time_trace", protocol="adiabatic")


def test_spec_rejects_unknown_tier():
    with pytest.raises(ValueError, match="tier"):
        SweepSpec(kind="time_trace", protocol="jump", tiers=("rwa5",))


def test_spec_rejects_empty_axis():
    with pytest.raises(ValueError, match="empty"):
        _scan_spec(axes={"bandwidth_ratio": []})


def test_spec_rejects_non_monotone_axis():
    with pytest.raises(ValueError, match="monotone"):
        _scan_spec(axes={"bandwidth_ratio": [0.1, 0.3, 0.2]})


def test_spec_json_round_trip():
    spec = _scan_spec(tiers=("rwa3", "rwa4"),
                      fixed={"n_pairs": 2, "area_error": 0.1})
    again = SweepSpec.from_json(spec.to_json())
    assert again == spec


def test_spec_axes_normalized_to_float_tuples():
    spec = _scan_spec(axes={"bandwidth_ratio": np.array([1, 2])})
    assert spec.axes["bandwidth_ratio"] == (1.0, 2.0)


def test_bandwidth_scan_shape_and_norm():
    res = run_bandwidth_scan(_scan_spec(tiers=("rwa3", "rwa4")), workers=1)
    assert res.columns[:2] == ("bandwidth_ratio", "tier")
    assert len(res.rows) == len(RATIOS) * 2
    for row in res.rows:
        assert row[-1] == ""  # no error flag
        pops = [p for p in row[2:6] if p != ""]
        assert sum(pops) == pytest.approx(1.0, abs=1e-9)


def test_scan_is_deterministic():
    spec = _scan_spec()
    a = run_bandwidth_scan(spec, workers=1)
    b = run_bandwidth_scan(spec, workers=1)
    assert a.rows == b.rows


def test_parallel_matches_serial():
    spec = _scan_spec(tiers=("rwa3", "detuned3"))
    serial = run_bandwidth_scan(spec, workers=1)
    parallel = run_bandwidth_scan(spec, workers=2)
    assert serial.rows == parallel.rows


def test_failed_point_is_flagged_not_fatal():
    # rwa3 rejects a two-photon detuning, so every task raises; the scan
    # must still return one row per point with the error column set
    spec = _scan_spec(fixed={"n_pairs": 1, "detuning2_mhz": 5.0})
    res = run_bandwidth_scan(spec, workers=1)
    assert len(res.rows) == len(RATIOS)
    for row in res.rows:
        assert "ValueError" in row[-1]
        assert row[2] == ""  # populations blanked


def test_robustness_scan_keys():
    spec = SweepSpec(kind="robustness_scan", protocol="jump",
                     axes={"area_error": (0.0,), "n_pairs": (1.0, 2.0)},
                     fixed={"bandwidth_ratio": 0.03})
    res = run_robustness_scan(spec, workers=1)
    assert [(r[0], r[1]) for r in res.rows] == [(1, 0.0), (2, 0.0)]
    for row in res.rows:
        assert row[4] > 0.9  # ideal-area transfer


def test_fidelity_map_smoke():
    spec = SweepSpec(kind="fidelity_map", protocol="jump",
                     axes={"area_error": (0.0, 0.1),
                           "detuning2_mhz": (-1.0, 1.0)},
                     fixed={"n_pairs": 1, "bandwidth_ratio": 0.03},
                     tiers=("detuned3",))
    res = run_fidelity_map(spec, workers=1)
    assert len(res.rows) == 4
    assert res.columns[:3] == ("area_error", "detuning2_mhz", "tier")


def test_time_trace_starts_in_ground_state():
    spec = SweepSpec(kind="time_trace", protocol="jump",
                     fixed={"n_pairs": 1, "bandwidth_ratio": 0.03})
    res = run_time_trace(spec, workers=1, n_samples=50)
    first = res.rows[0]
    assert first[0] == "rwa3"
    assert first[2] == pytest.approx(1.0, abs=1e-12)
    assert first[3] == pytest.approx(0.0, abs=1e-12)


def test_diagnostics_trace_requires_rwa3():
    spec = SweepSpec(kind="diagnostics_trace", protocol="jump",
                     tiers=("rwa4",), fixed={"n_pairs": 1})
    with pytest.raises(ValueError, match="rwa3"):
        run_diagnostics_trace(spec, workers=1)


def test_run_sweep_dispatch():
    spec = SweepSpec(kind="diagnostics_trace", protocol="jump",
                     fixed={"n_pairs": 1, "bandwidth_ratio": 0.03})
    res = run_sweep(spec, workers=1)
    assert res.columns[0] == "t_ns"
    assert res.metadata["rows"] == len(res.rows)


def test_emit_csv_round_trip(tmp_path):
    res = run_bandwidth_scan(_scan_spec(), workers=1)
    path = tmp_path / "scan.csv"
    emit(res, "csv", str(path))
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == list(res.columns)
    assert len(rows) == len(res.rows) + 1
    # numeric cells carry nine significant digits
    for text, value in zip(rows[1][2:6], res.rows[0][2:6]):
        if text:
            assert float(text) == pytest.approx(value, rel=1e-8)


def test_emit_empty_result_writes_header_only(tmp_path):
    res = ExperimentResult(_scan_spec(), ("a", "b"), [], {"rows": 0})
    path = tmp_path / "empty.csv"
    emit(res, "csv", str(path))
    assert path.read_text() == "a,b\n"


def test_emit_json_blank_cells_become_null(tmp_path):
    res = run_bandwidth_scan(_scan_spec(), workers=1)
    path = tmp_path / "scan.json"
    emit(res, "json", str(path))
    payload = json.loads(path.read_text())
    assert payload["columns"] == list(res.columns)
    row = payload["rows"][0]
    assert row[5] is None  # rwa3 carries three levels, so P2p is absent
    assert SweepSpec(**{k: payload["spec"][k]
                        for k in ("kind", "protocol")},
                     tiers=tuple(payload["spec"]["tiers"]),
                     axes=payload["spec"]["axes"],
                     fixed=payload["spec"]["fixed"]) == res.spec


def test_emit_rejects_unknown_format(tmp_path):
    res = ExperimentResult(_scan_spec(), ("a",), [], {})
    with pytest.raises(ValueError, match="format"):
        emit(res, "yaml", str(tmp_path / "x"))


def test_emit_unwritable_path_raises_oserror():
    res = ExperimentResult(_scan_spec(), ("a",), [], {})
    with pytest.raises(OSError, match="cannot write"):
        emit(res, "csv", "/nonexistent-dir/out.csv")
