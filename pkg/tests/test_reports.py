import json

import pytest

from lowertail.reports import Report, ReportFormatError, config_hash, read_report


def _sample_report():
    rep = Report(experiment="demo", config={"n": 5, "p": 0.4, "label": "x"}, seed=7)
    rep.add_section("table", ["a", "b"], [[1, 2.5], [3, -0.125]])
    rep.add_section("flags", ["name", "value"], [["ok", True], ["bad", False]])
    rep.summary = {"score": 1.25}
    return rep


def test_body_is_deterministic():
    assert _sample_report().body() == _sample_report().body()
    assert "\n# config: label=x\n" in _sample_report().body()


def test_filename_uses_config_hash():
    rep = _sample_report()
    assert rep.filename == f"demo-{config_hash(rep.config)}.report.csv"
    other = Report(experiment="demo", config={"n": 6}, seed=7)
    assert other.filename != rep.filename


def test_write_and_read_roundtrip(tmp_path):
    rep = _sample_report()
    path = rep.write(tmp_path)
    assert path.exists()
    meta = json.loads(path.with_name(path.name.replace(".report.csv", ".meta.json")).read_text())
    assert meta["summary"]["score"] == "1.25"
    back = read_report(path)
    assert back.experiment == "demo"
    assert back.seed == 7
    assert back.config["n"] == 5
    sec = back.section("table")
    assert sec.columns == ["a", "b"]
    assert sec.rows == [[1, 2.5], [3, -0.125]]
    assert back.section("flags").rows == [["ok", True], ["bad", False]]


def test_read_refuses_newer_version(tmp_path):
    rep = _sample_report()
    path = rep.write(tmp_path)
    text = path.read_text().replace("report v1", "report v99", 1)
    path.write_text(text)
    with pytest.raises(ReportFormatError):
        read_report(path)


def test_missing_column_and_section_errors():
    rep = _sample_report()
    with pytest.raises(ReportFormatError):
        rep.section("nope")
    with pytest.raises(ReportFormatError):
        rep.section("table").column("missing")
    with pytest.raises(ReportFormatError):
        rep.add_section("bad", ["a"], [[1, 2]])


def test_float_formatting_roundtrips_exactly():
    rep = Report(experiment="f", config={}, seed=0)
    vals = [0.1, 1e-17, 123456.789012345678, -0.0]
    rep.add_section("v", ["x"], [[v] for v in vals])
    lines = rep.body().splitlines()
    parsed = [float(line) for line in lines[-len(vals):]]
    assert parsed == vals
