import json
import subprocess

import pytest


def run(cli, *args, cwd=None):
    return subprocess.run([cli, *map(str, args)], cwd=cwd, capture_output=True, text=True)


@pytest.fixture(scope="module")
def dgp1_csv(saw_cli, tmp_path_factory):
    d = tmp_path_factory.mktemp("dgp1")
    res = run(saw_cli, "simulate", "--dgp", 1, "--n", 120, "--T", 33, "--reps", 1, "--seed", 7,
              "--export-panel", d / "panel.csv", "--out", d)
    assert res.returncode == 0, res.stderr
    return d / "panel.csv"


def jumps_of(out):
    doc = json.loads((out / "jumps.json").read_text())
    return [r["periods"] for r in doc["regressors"]]


def test_fit_recovers_the_simulated_breaks(saw_cli, dgp1_csv, tmp_path):
    res = run(saw_cli, "fit", "--input", dgp1_csv, "--out", tmp_path, "--plot")
    assert res.returncode == 0, res.stderr
    assert jumps_of(tmp_path) == [[10, 21], [8, 16, 24]]
    post = json.loads((tmp_path / "post_saw.json").read_text())
    assert len(post["segments"]) == 7 and post["variance_case"] == 4
    header = (tmp_path / "report.csv").read_text().splitlines()[0]
    assert header == "regressor,segment,start,end,coefficient,std_error,z,p_value"
    assert (tmp_path / "x1.svg").read_text().startswith("<svg")
    fit_doc = json.loads((tmp_path / "saw_fit.json").read_text())
    assert fit_doc["lambda"] > 0 and 0 < fit_doc["kappa"] < 1


def test_huge_lambda_removes_every_jump(saw_cli, dgp1_csv, tmp_path):
    res = run(saw_cli, "fit", "--input", dgp1_csv, "--lambda", "1e9", "--out", tmp_path)
    assert res.returncode == 0, res.stderr
    assert jumps_of(tmp_path) == [[], []]
    assert len(json.loads((tmp_path / "post_saw.json").read_text())["segments"]) == 2


def test_common_jumps_share_the_union(saw_cli, dgp1_csv, tmp_path):
    res = run(saw_cli, "fit", "--input", dgp1_csv, "--common-jumps", "--out", tmp_path)
    assert res.returncode == 0, res.stderr
    segments = json.loads((tmp_path / "post_saw.json").read_text())["segments"]
    per_regressor = {}
    for s in segments:
        per_regressor.setdefault(s["regressor"], []).append(s["end"])
    assert per_regressor["x1"] == per_regressor["x2"]
    assert len(per_regressor["x1"]) == 6


def test_fit_is_a_pure_function_of_its_input(saw_cli, dgp1_csv, tmp_path):
    for name in ("a", "b"):
        assert run(saw_cli, "fit", "--input", dgp1_csv, "--out", tmp_path / name).returncode == 0
    for f in ("saw_fit.json", "jumps.json", "post_saw.json", "report.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_schema_file(saw_cli, dgp1_csv, tmp_path):
    renamed = tmp_path / "renamed.csv"
    lines = dgp1_csv.read_text().splitlines()
    renamed.write_text("\n".join(["firm,period,ret,a,b"] + lines[1:]) + "\n")
    schema = tmp_path / "schema.json"
    schema.write_text(json.dumps({"unit": "firm", "time": "period", "outcome": "ret", "regressors": ["a", "b"]}))
    res = run(saw_cli, "fit", "--input", renamed, "--schema", schema, "--out", tmp_path / "o")
    assert res.returncode == 0, res.stderr
    assert jumps_of(tmp_path / "o") == [[10, 21], [8, 16, 24]]


def test_exit_codes(saw_cli, tmp_path):
    missing = run(saw_cli, "fit", "--input", tmp_path / "absent.csv", "--out", tmp_path)
    assert missing.returncode == 1
    assert missing.stderr.strip().count("\n") == 0 and missing.stderr.startswith("error: IoError")

    broken = tmp_path / "broken.csv"
    broken.write_text("unit,time,y,x1\n1,1,0,1\n1,2,0,abc\n1,3,0,1\n")
    res = run(saw_cli, "fit", "--input", broken, "--out", tmp_path)
    assert res.returncode == 1 and "NonNumericValue" in res.stderr

    assert run(saw_cli, "fit", "--input", broken, "--variance-case", 9).returncode == 2
    assert run(saw_cli, "fit", "--input", broken, "--lambda", -1).returncode == 2
    assert run(saw_cli, "simulate", "--dgp", 9).returncode == 2
    assert run(saw_cli, "bogus").returncode == 2


def test_simulate_outputs(saw_cli, tmp_path):
    res = run(saw_cli, "simulate", "--dgp", 6, "--n", 120, "--T", 33, "--reps", 20, "--seed", 1,
              "--out", tmp_path)
    assert res.returncode == 0, res.stderr
    rows = (tmp_path / "mc_table.csv").read_text().splitlines()
    assert rows[0].startswith("dgp,T,n,reps,failures,a_n_approximate,S1_mean,S1_sd")
    fields = dict(zip(rows[0].split(","), rows[1].split(",")))
    assert float(fields["S1_mean"]) <= 0.05
    assert (tmp_path / "summary.txt").read_text() == res.stdout


def test_simulate_is_byte_identical_across_threads(saw_cli, tmp_path):
    tables = []
    for threads in (1, 2, 8):
        out = tmp_path / str(threads)
        res = run(saw_cli, "simulate", "--dgp", 4, "--n", 60, "--T", 33, "--reps", 12, "--seed", 3,
                  "--threads", threads, "--out", out)
        assert res.returncode == 0, res.stderr
        tables.append((out / "mc_table.csv").read_bytes())
    assert tables[0] == tables[1] == tables[2]
