import io

import numpy as np
import pytest

import qcapbound.bounds as bounds_mod
from qcapbound.bounds import (
    IDENTIFIERS,
    builtin_channels,
    read_sweep_csv,
    report,
    seeded_channels,
    sweep,
    sweep_csv_str,
    verify_suite,
)
from qcapbound.channels import erasure_channel, identity_channel, werner_holevo


def test_report_identity_channel():
    rep = report(identity_channel(2), ["qGamma", "qTheta"])
    assert not rep.errors
    assert abs(rep.values["qGamma"] - 1.0) <= 1e-5
    assert abs(rep.values["qTheta"] - 1.0) <= 1e-5
    assert rep.dims == (2, 2)
    assert all(c.passed for c in rep.checks)
    assert set(rep.solver_stats) == {"qGamma", "qTheta"}
    assert all(gap <= 1e-8 for _, gap in rep.solver_stats.values())


def test_report_is_deterministic():
    r1 = report(identity_channel(2), ["qGamma"])
    r2 = report(identity_channel(2), ["qGamma"])
    assert abs(r1.values["qGamma"] - r2.values["qGamma"]) <= 1e-9


def test_report_kappa_identifiers_share_one_bisection():
    rep = report(werner_holevo(3), ["kappaPPTp", "oneShotZeroErrorPPTp"])
    assert abs(rep.values["kappaPPTp"] - 5 / 3) <= 1e-3
    assert rep.values["oneShotZeroErrorPPTp"] == 1.0


def test_report_unknown_identifier():
    with pytest.raises(ValueError, match="unknown bound identifier"):
        report(identity_channel(2), ["qBogus"])


def test_report_records_errors_without_aborting(monkeypatch):
    def boom(*args, **kwargs):
        raise RuntimeError("synthetic failure")

    monkeypatch.setattr(bounds_mod, "cb_norm_pt", boom)
    rep = report(identity_channel(2), ["qTheta", "qGamma"])
    assert "qTheta" in rep.errors and "synthetic failure" in rep.errors["qTheta"]
    assert abs(rep.values["qGamma"] - 1.0) <= 1e-5


def test_report_erasure_close_to_closed_form():
    rep = report(erasure_channel(2, 0.5), ["qGamma"])
    assert abs(rep.values["qGamma"] - np.log2(1.5)) <= 1e-5


def test_report_json_shape():
    rep = report(identity_channel(2), ["qGamma"])
    data = rep.to_dict()
    assert "wall_times" not in data
    assert data["values"]["qGamma"] == rep.values["qGamma"]
    data = rep.to_dict(include_timings=True)
    assert "qGamma" in data["wall_times"]


def test_sweep_rows_and_csv_roundtrip():
    rows = sweep("nr", [0.1, 0.0], ["qGamma"])
    assert [r.parameter for r in rows] == [0.0, 0.1]
    text = sweep_csv_str(rows, ["qGamma"])
    lines = text.splitlines()
    assert lines[0] == "param,qGamma"
    assert len(lines) == 3
    parsed = read_sweep_csv(io.StringIO(text))
    again = sweep_csv_str(parsed, ["qGamma"])
    assert again == text  # bit-exact at 12 significant digits


def test_sweep_validation():
    with pytest.raises(ValueError, match="unknown sweep family"):
        sweep("bogus", [0.1], ["qGamma"])
    with pytest.raises(ValueError, match="within"):
        sweep("nr", [0.7], ["qGamma"])


def test_csv_format_digits():
    rows = sweep("nr", [0.05], ["qGamma"])
    text = sweep_csv_str(rows, ["qGamma"])
    value_cell = text.splitlines()[1].split(",")[1]
    assert len(value_cell.replace(".", "").replace("-", "").lstrip("0")) <= 12
    assert "." in value_cell


def test_read_sweep_csv_rejects_malformed():
    with pytest.raises(ValueError, match="param"):
        read_sweep_csv(io.StringIO("r,qGamma\n0,1\n"))


def test_verify_suite_unknown_name():
    with pytest.raises(ValueError, match="unknown suite"):
        verify_suite(["nope"], seed=0)


def test_verify_suite_duality_passes():
    rep = verify_suite(["duality"], seed=7)
    assert rep.passed
    lines = rep.lines()
    assert lines[0].startswith("suite duality: pass")
    assert any("[ok]" in line for line in lines)


def test_channel_pools():
    assert len(seeded_channels(3, 10)) == 10
    names = [ch.name for ch in builtin_channels()]
    assert len(names) == len(set(names))
    assert set(IDENTIFIERS) >= {"qGamma", "qTheta", "kappaPPTp"}
