import subprocess
import sys

import pytest

from basesc.cli import main


@pytest.fixture
def blobs(tmp_path):
    assert main(["synth", "--n", "90", "--clusters", "3", "--dim", "4", "--categorical", "1", "--seed", "7",
                 "--output-dir", str(tmp_path), "--prefix", "b"]) == 0
    return tmp_path / "b.csv", tmp_path / "b_schema.ini", tmp_path / "b_truth.csv"


def run_twice(tmp_path, argv):
    outs = []
    for i in range(2):
        out = tmp_path / f"out{i}.txt"
        assert main(argv + ["--output", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    return outs[0].decode()


def test_synth_files(tmp_path, blobs):
    data, schema, truth = blobs
    assert data.exists() and schema.exists() and truth.exists()
    assert "Poor" in data.read_text() or "Good" in data.read_text()
    first = [p.read_bytes() for p in blobs]
    main(["synth", "--n", "90", "--clusters", "3", "--dim", "4", "--categorical", "1", "--seed", "7",
          "--output-dir", str(tmp_path), "--prefix", "b"])
    assert [p.read_bytes() for p in blobs] == first


@pytest.mark.parametrize("algo", ["old-sc", "base-a", "new-sc", "hc"])
def test_cluster(tmp_path, blobs, algo):
    data, schema, truth = blobs
    text = run_twice(tmp_path, ["cluster", "--input", str(data), "--schema", str(schema), "--algo", algo,
                                "--K", "10", "--k", "3", "--seed", "42"])
    rows = [line for line in text.splitlines() if not line.startswith("#")]
    assert rows[0] == "row_id,label" and len(rows) == 91
    assert f"# algorithm: {algo}" in text


def test_old_sc_equals_base_e(tmp_path, blobs):
    data, schema, _ = blobs
    common = ["cluster", "--input", str(data), "--schema", str(schema), "--k", "4", "--seed", "3"]
    a = run_twice(tmp_path, common + ["--algo", "old-sc"])
    b = run_twice(tmp_path, common + ["--algo", "base-a", "--a", "2.718281828459045"])
    body = lambda t: [line for line in t.splitlines() if not line.startswith("#")]
    assert body(a) == body(b)


def test_eigens(tmp_path, blobs):
    data, schema, _ = blobs
    text = run_twice(tmp_path, ["eigens", "--input", str(data), "--schema", str(schema), "--K", "10"])
    rows = [line for line in text.splitlines() if not line.startswith("#")]
    assert rows[0] == "index,lambda_base_e,lambda_base_a,lambda_base_a_local" and len(rows) == 31
    one = run_twice(tmp_path, ["eigens", "--input", str(data), "--schema", str(schema), "--k", "1"])
    assert len([line for line in one.splitlines() if not line.startswith("#")]) == 2


def test_compare(tmp_path, blobs):
    data, schema, _ = blobs
    text = run_twice(tmp_path, ["compare", "--input", str(data), "--schema", str(schema), "--counts", "3",
                                "--metrics", "euclidean", "--K", "10", "--format", "csv"])
    assert "euclidean" in text
    run_twice(tmp_path, ["compare", "--input", str(data), "--schema", str(schema), "--counts", "3,4",
                         "--K", "10", "--threads", "2"])


def test_verify(tmp_path):
    text = run_twice(tmp_path, ["verify", "--graphs", "10"])
    assert "all provable checks pass" in text
    same = run_twice(tmp_path, ["verify", "--graphs", "2", "--a", "2.718281828459045"])
    assert "(equality)" in same


def test_verify_on_file(tmp_path, blobs):
    data, schema, _ = blobs
    text = run_twice(tmp_path, ["verify", "--input", str(data), "--schema", str(schema), "--graphs", "3",
                                "--K", "10"])
    assert "[FAIL]" not in text


def test_exit_codes(tmp_path, blobs, capsys):
    data, schema, _ = blobs
    assert main(["cluster", "--input", str(tmp_path / "missing.csv"), "--k", "2"]) == 2
    assert "missing.csv" in capsys.readouterr().err
    assert main(["synth", "--clusters", "0", "--output-dir", str(tmp_path)]) == 1
    assert main(["eigens", "--input", str(data), "--schema", str(tmp_path / "none.ini")]) != 0
    assert main(["cluster", "--input", str(data), "--k", "1000"]) == 1
    assert main(["cluster", "--input", str(data), "--k", "0"]) == 1
    assert main(["bogus"]) == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n3,x\n4,5\n")
    assert main(["cluster", "--input", str(bad), "--k", "2"]) == 2


def test_help_and_module_entry():
    out = subprocess.run([sys.executable, "-m", "basesc", "cluster", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "--K" in out.stdout and "180" in out.stdout and "30" in out.stdout


def test_cluster_labels_match_truth(tmp_path):
    assert main(["synth", "--n", "120", "--clusters", "3", "--dim", "4", "--separation", "20", "--seed", "1",
                 "--output-dir", str(tmp_path), "--prefix", "s"]) == 0
    out = tmp_path / "lab.csv"
    assert main(["cluster", "--input", str(tmp_path / "s.csv"), "--schema", str(tmp_path / "s_schema.ini"),
                 "--algo", "new-sc", "--K", "10", "--k", "3", "--output", str(out)]) == 0
    from basesc.evaluate import adjusted_rand
    def labels(path):
        rows = [r for r in path.read_text().splitlines() if not r.startswith("#")][1:]
        return [int(r.split(",")[1]) for r in rows]
    lab, truth = labels(out), labels(tmp_path / "s_truth.csv")
    assert adjusted_rand(lab, truth) == 1.0
