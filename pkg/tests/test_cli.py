import csv
import io
import json
import math

import pytest

from guesswork.channels import generate_hsic, load_channel
from guesswork.cli import EXIT_BUDGET, EXIT_INVALID, EXIT_NOT_BALANCED, SOLVE_CSV_HEADER, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_json(capsys):
    code, out, _ = run(capsys, "solve", "--channel", "tetrahedron")
    assert code == 0
    rec = json.loads(out)
    assert rec["value"] == pytest.approx(5 / 2 - math.sqrt(15) / 6, abs=1e-12)
    assert sorted(rec["numbering"]) == ["v0", "v1", "v2", "v3"]
    assert len(rec["manifest"]["input_hash"]) == 64
    assert rec["manifest"]["threads"] == 1


def test_solve_csv_header_and_precision(capsys):
    code, out, _ = run(capsys, "solve", "--channel", "cube", "--format", "csv", "--threads", "2")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == SOLVE_CSV_HEADER
    row = dict(zip(rows[0], rows[1]))
    assert float(row["value"]) == pytest.approx(9 / 2 - math.sqrt(7) / 2, abs=1e-12)
    assert row["threads"] == "2"


def test_hash_is_stable(capsys):
    a = json.loads(run(capsys, "solve", "--channel", "octahedron")[1])["manifest"]["input_hash"]
    b = json.loads(run(capsys, "oracle", "--channel", "octahedron")[1])["manifest"]["input_hash"]
    assert a == b


def test_oracle_matches_solve(capsys):
    s = json.loads(run(capsys, "solve", "--channel", "cuboctahedron")[1])
    o = json.loads(run(capsys, "oracle", "--channel", "cuboctahedron")[1])
    assert s["value"] == pytest.approx(o["value"], abs=1e-12)
    assert s["numbering"] == o["numbering"]


def test_custom_cost_file(capsys, tmp_path):
    path = tmp_path / "cost.json"
    path.write_text(json.dumps([1, 1, 2, 2, 3, 3]))
    code, out, _ = run(capsys, "solve", "--channel", "octahedron", "--cost", f"file:{path}")
    assert code == 0
    path.write_text(json.dumps([1, 2, 3, 4, 5, 7]))
    code, _, err = run(capsys, "solve", "--channel", "octahedron", "--cost", f"file:{path}")
    assert code == EXIT_NOT_BALANCED and "balanced" in err


def test_invalid_inputs(capsys, tmp_path):
    assert run(capsys, "solve", "--channel", str(tmp_path / "missing.json"))[0] == EXIT_INVALID
    assert run(capsys, "solve", "--channel", "cube", "--cost", "file:/nonexistent")[0] == EXIT_INVALID
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"labels": ["a", "a"], "bloch": [[0, 0, 1], [0, 0, -1]]}))
    assert run(capsys, "solve", "--channel", str(bad))[0] == EXIT_INVALID
    assert run(capsys, "solve", "--channel", "tetrahedron", "--regime", "cs")[0] == EXIT_INVALID


def test_time_budget_exit_code(capsys):
    code, out, _ = run(capsys, "solve", "--channel", "icosidodecahedron", "--time-budget", "0.3")
    assert code == EXIT_BUDGET
    assert json.loads(out)["bound_only"] is True


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "--channel", "octahedron", "--shots", "2000", "--seed", "4")
    assert code == 0
    rec = json.loads(out)
    assert rec["manifest"]["seed"] == 4
    assert abs(rec["empirical_guesswork"] - rec["exact_guesswork"]) <= 4 * rec["standard_error"]
    assert rec["exact_guesswork"] == pytest.approx(rec["closed_form_value"], abs=1e-12)


def test_channels_list_and_export(capsys, tmp_path):
    code, out, _ = run(capsys, "channels", "list")
    assert code == 0 and "icosidodecahedron\t30" in out
    path = tmp_path / "ico.json"
    assert run(capsys, "channels", "export", "--family", "icosahedron", "--out", str(path))[0] == 0
    assert load_channel(path) == generate_hsic("icosahedron")
    with pytest.raises(SystemExit):
        main(["channels", "export"])
