import csv
import io
import json
import subprocess
import sys

import pytest

from pipedreams import cli


def run(argv, capsys):
    code = cli.run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_chain_example(capsys):
    code, out, _ = run(["chain", "--p", "0.5"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["sigma2_closed"] == 2.0
    assert abs(data["sigma2_tl"] - 2.0) <= 1e-9
    assert all(abs(v - 0.25) < 1e-12 for v in data["stationary"])


def test_exact_example(tmp_path, capsys):
    f = write_json(tmp_path / "word3.json", {"n": 3, "letters": [2, 1, 2]})
    code, out, _ = run(["exact", "--word", f, "--p", "0.5"], capsys)
    row = json.loads(out)["rows"][0]
    assert code == 0 and abs(row["value"] - 1.25) <= 1e-12 and row["dp"] == row["enumerate"]


def test_estimate_degenerate(capsys):
    code, out, _ = run(["estimate", "--shape", "staircase:5", "--p", "1", "--trials", "10", "--seed", "1"], capsys)
    row = json.loads(out)["rows"][0]
    assert code == 0 and row["mean"] == 10 and row["stderr"] == 0


def test_seed_is_echoed_when_missing(capsys):
    code, out, err = run(["estimate", "--shape", "staircase:4", "--p", "0.5", "--trials", "5"], capsys)
    assert code == 0 and err.startswith("seed: ")
    seed = int(err.split()[1])
    assert json.loads(out)["meta"]["seed"] == seed


@pytest.mark.parametrize("argv", [
    ["estimate", "--shape", "staircase:5", "--p", "2", "--seed", "1"],
    ["estimate", "--shape", "pyramid:5", "--p", "0.5", "--seed", "1"],
    ["estimate", "--shape", "staircase:5", "--p", "0.5", "--seed", "-1"],
    ["estimate", "--shape", "staircase:5", "--p", "0.5", "--trials", "0"],
    ["chain", "--p", "1"],
    ["frobnicate"],
    ["hypotheses", "--shape", "staircase:9", "--epsilon", "0.7"],
])
def test_usage_errors(argv, capsys):
    code, _, _ = run(argv, capsys)
    assert code == cli.EXIT_USAGE


def test_invalid_shape_file_leaves_no_output(tmp_path, capsys):
    bad = write_json(tmp_path / "bad.json", {"n": 4, "boxes": [[1, 0], [1, 0]]})
    out = tmp_path / "result.json"
    code, _, err = run(["estimate", "--shape", f"boxes:{bad}", "--p", "0.5", "--seed", "1", "--out", str(out)],
                       capsys)
    assert code == cli.EXIT_INPUT and "error" in err
    assert not out.exists()
    assert list(tmp_path.iterdir()) == [tmp_path / "bad.json"]


@pytest.mark.parametrize("content", ["{not json", "[1, 2]", '{"n": 3, "letters": [1, 5]}', '{"n": 3}'])
def test_invalid_word_files(tmp_path, capsys, content):
    f = tmp_path / "w.json"
    f.write_text(content)
    code, _, _ = run(["exact", "--word", str(f), "--p", "0.5"], capsys)
    assert code == cli.EXIT_INPUT


def test_non_alternating_word_shape(tmp_path, capsys):
    f = write_json(tmp_path / "w.json", {"n": 3, "letters": [1, 1]})
    code, _, _ = run(["estimate", "--shape", f"word:{f}", "--p", "0.5", "--seed", "1"], capsys)
    assert code == cli.EXIT_INPUT


def test_csv_and_json_carry_the_same_numbers(capsys):
    base = ["estimate", "--shape", "strip:12:5", "--p", "0.37", "--trials", "300", "--seed", "42"]
    _, j, _ = run(base + ["--format", "json"], capsys)
    _, c, _ = run(base + ["--format", "csv"], capsys)
    data = json.loads(j)
    lines = [ln for ln in c.splitlines() if not ln.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(lines))))
    assert len(rows) == 1
    for k, v in data["rows"][0].items():
        if isinstance(v, float):
            assert float(rows[0][k]) == v
        elif isinstance(v, int):
            assert int(rows[0][k]) == v
    assert f"# seed: 42" in c


@pytest.mark.parametrize("cmd", [
    ["estimate", "--shape", "staircase:40", "--p", "0.5", "--trials", "500"],
    ["kiss", "--ells", "2,4", "--ks", "1,8,64", "--trials", "2000"],
    ["check", "chernoff", "--ks", "10", "--trials", "3000"],
])
def test_threads_do_not_change_output(cmd, capsys, monkeypatch):
    outs = set()
    for threads in ("1", "3"):
        _, out, _ = run(cmd + ["--seed", "7", "--threads", threads], capsys)
        outs.add(out)
    monkeypatch.setenv("PIPEDREAM_THREADS", "2")
    _, out, _ = run(cmd + ["--seed", "7"], capsys)
    outs.add(out)
    assert len(outs) == 1


def test_render_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for f in (a, b):
        assert run(["render", "--shape", "staircase:6", "--p", "0.5", "--seed", "3", "--out", str(f)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("<?xml")


def test_render_from_tiles(tmp_path, capsys):
    f = write_json(tmp_path / "pd.json", {"shape": {"n": 3, "boxes": [[1, 0], [2, 0]]}, "cross": [1, 1]})
    code, out, _ = run(["render", "--tiles", f], capsys)
    assert code == 0 and out.count("<path") == 3
    bad = write_json(tmp_path / "bad.json", {"shape": {"n": 3, "boxes": [[1, 0]]}, "cross": [1, 0]})
    assert run(["render", "--tiles", bad], capsys)[0] == cli.EXIT_INPUT


def test_predict_and_hypotheses(capsys):
    code, out, _ = run(["predict", "--shape", "staircase:2", "--p", "0.5"], capsys)
    assert code == 0 and abs(json.loads(out)["rows"][0]["predicted"] - (2 / 3.141592653589793) ** 0.5) < 1e-15
    code, out, _ = run(["hypotheses", "--shape", "staircase:100"], capsys)
    row = json.loads(out)["rows"][0]
    assert code == 0 and row["max_count"] == 99


def test_permutation_command(tmp_path, capsys):
    f = write_json(tmp_path / "w.json", {"n": 3, "letters": [1, 2, 1]})
    code, out, _ = run(["permutation", "--word", f], capsys)
    data = json.loads(out)
    assert code == 0 and data["inversions"] == 3 and data["alternating"] and data["reduced"]


def test_check_suites(capsys):
    for suite in ("half", "concentration", "psi"):
        extra = ["--k", "400"] if suite == "psi" else []
        code, out, _ = run(["check", suite, "--trials", "500", "--seed", "1"] + extra, capsys)
        assert code == 0 and json.loads(out)["rows"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "pipedreams", "chain", "--p", "0.25", "--format", "csv"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "sigma2_closed" in res.stdout
