import csv
import json

import pytest

from majorcert import cli, oracle
from majorcert.certifiers import Certificate, Method

CONFIG = """\
geometry: {height: 8, width: 8}
num_classes: 3
strategies:
  - {kind: row, size: 2}
  - {kind: column, size: 2}
  - {kind: block, size: 3}
patch_size: 2
"""


@pytest.fixture
def workspace(tmp_path):
    (tmp_path / "run.yaml").write_text(CONFIG)
    return tmp_path


def _gen(ws, scenario="margin-sweep", count=12):
    out = ws / f"{scenario}.jsonl"
    assert cli.main(["gen", "--config", str(ws / "run.yaml"), "--scenario", scenario,
                     "--seed", "3", "--count", str(count), "--out", str(out)]) == 0
    return out


def test_gen_writes_records(workspace, capsys):
    path = _gen(workspace)
    lines = path.read_text().splitlines()
    assert len(lines) == 12
    assert list(json.loads(lines[0])) == ["id", "true_label", "votes", "metadata"]
    cli.main(["gen", "--config", str(workspace / "run.yaml"), "--scenario", "margin-sweep",
              "--seed", "3", "--count", "12"])
    assert capsys.readouterr().out == path.read_text()


def test_certify_then_report(workspace):
    records = _gen(workspace)
    out = workspace / "out"
    assert cli.main(["certify", "--config", str(workspace / "run.yaml"),
                     "--input", str(records), "--out", str(out)]) == 0
    with open(out / "certificates.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 12
    assert list(rows[0])[:5] == ["id", "true_label", "predicted", "certified", "method"]
    summary = json.loads((out / "summary.json").read_text())
    assert summary["metrics"]["total"] == 12
    assert (out / "metrics.png").stat().st_size > 0

    again = workspace / "again"
    assert cli.main(["report", "--input", str(out / "certificates.csv"),
                     "--out", str(again)]) == 0
    re_summary = json.loads((again / "summary.json").read_text())
    assert re_summary["metrics"] == summary["metrics"]
    assert (again / "metrics.png").exists()


def test_cli_flags_override_config(workspace):
    records = _gen(workspace)
    out = workspace / "m1"
    assert cli.main(["certify", "--config", str(workspace / "run.yaml"), "--patch-size", "1",
                     "--input", str(records), "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["patch_size"] == 1


def test_bad_input_exits_nonzero(workspace):
    bad = workspace / "bad.jsonl"
    bad.write_text('{"id": "oops", "true_label": 0, "votes": {}}\n')
    assert cli.main(["certify", "--config", str(workspace / "run.yaml"),
                     "--input", str(bad), "--out", str(workspace / "o")]) == 2


def test_oracle_sound(workspace, capsys):
    records = _gen(workspace, "figure1-like", 2)
    assert cli.main(["oracle", "--config", str(workspace / "run.yaml"),
                     "--input", str(records)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["certified_robust"] == 2 and report["certified_attackable"] == 0


def test_oracle_flags_attackable_certificates(workspace, monkeypatch):
    records = _gen(workspace, "uniform-random", 4)

    def overclaim(ensemble, m, naive=False):
        return Certificate(0, True, Method.MAJORITY_INVARIANT, ())

    monkeypatch.setattr(oracle, "certify_sample", overclaim)
    assert cli.main(["oracle", "--config", str(workspace / "run.yaml"),
                     "--input", str(records)]) == 1
