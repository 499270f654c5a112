import json

import pytest
from click.testing import CliRunner

from suslab.cli import main


@pytest.fixture
def files(tmp_path):
    (tmp_path / "p13.json").write_text(json.dumps({"type": "explicit", "p": {"1": 0.5, "3": 0.5}}))
    (tmp_path / "sub.json").write_text(json.dumps({"type": "explicit", "p": {"1": 0.8, "3": 0.2}}))
    (tmp_path / "crit.json").write_text(json.dumps({"type": "explicit", "p": {"1": 0.75, "3": 0.25}}))
    (tmp_path / "cubic.json").write_text(json.dumps({"type": "explicit", "p": {"3": 1}}))
    (tmp_path / "degs.txt").write_text("1 240\n3 60\n")
    (tmp_path / "dense.txt").write_text("5 2\n")
    return tmp_path


def run(*args, **kw):
    return CliRunner().invoke(main, [str(a) for a in args], **kw)


def test_predict(files):
    r = run("predict", "--dist", files / "p13.json")
    assert r.exit_code == 0
    d = json.loads(r.output)
    assert d["kappa"] == pytest.approx(1 / 3) and d["rho_inf"] == pytest.approx(22 / 27)
    assert d["chi_inf"] == "inf" and d["chi_hat_inf"] == pytest.approx(17 / 27)
    d = json.loads(run("predict", "--dist", files / "sub.json").output)
    assert d["chi_inf"] == pytest.approx(10.8) and d["chi_hat_inf"] == pytest.approx(10.8)
    d = json.loads(run("predict", "--dist", files / "crit.json").output)
    assert d["chi_inf"] == d["chi_hat_inf"] == "inf" and "critical" in d["flags"]


def test_sample_is_deterministic(files):
    a = run("sample", "--dist", files / "p13.json", "--n", 1000, "--seed", 7)
    b = run("sample", "--dist", files / "p13.json", "--n", 1000, "--seed", 7)
    assert a.exit_code == 0 and a.output == b.output
    lines = a.output.splitlines()
    assert "seed=7" in lines[0] and "degrees_sha256=" in lines[0]
    assert len(lines) == 1 + 1000


def test_sample_needs_seed(files):
    r = run("sample", "--dist", files / "p13.json", "--n", 10)
    assert r.exit_code == 2 and "--seed" in r.output


def test_sample_simple_exhaustion(files):
    r = run("sample", "--seq", files / "dense.txt", "--simple", "--seed", 1, "--max-attempts", 5)
    assert r.exit_code == 2
    err = json.loads(r.stderr)
    assert err["error"]["type"] == "SamplingExhausted"


def test_parity_error_envelope(files):
    (files / "odd.txt").write_text("1 3\n")
    r = run("sample", "--seq", files / "odd.txt", "--seed", 1)
    assert r.exit_code == 1 and json.loads(r.stderr)["error"]["type"] == "ParityError"


def test_measure(files):
    out = files / "g.txt"
    assert run("sample", "--seq", files / "degs.txt", "--seed", 3, "-o", out).exit_code == 0
    d = json.loads(run("measure", "--edges", out).output)
    assert d["n"] == 300 and d["chi"] >= 1 and d["chi_hat"] <= d["chi"]
    csv = run("measure", "--edges", out, "--format", "csv").output
    assert csv.splitlines()[0] == "k,N_k"


def test_bp(files):
    d = json.loads(run("bp", "--dist", files / "p13.json", "--reps", 2000, "--seed", 1).output)
    assert set(d) == {"rho", "chi_hat"}
    d = json.loads(run("bp", "--dist", files / "crit.json", "--reps", 200, "--seed", 1).output)
    assert "chi_hat" not in d


def test_convergence_spec_file(files):
    spec = {"experiment": "convergence", "dist": str(files / "sub.json"), "n_grid": [500, 2000], "reps": 4, "seed": 9}
    (files / "conv.json").write_text(json.dumps(spec))
    r = run("experiment", "convergence", "--spec", files / "conv.json", "--format", "csv")
    assert r.exit_code == 0
    header = r.output.splitlines()[0].split(",")
    assert {"delta_chi_limit", "delta_chi_prediction", "chi_mean"} <= set(header)
    assert len(r.output.splitlines()) == 3
    r = run("experiment", "convergence", "--dist", files / "sub.json", "--n", 500, "--reps", 2)
    assert r.exit_code == 2


def test_convergence_check_exit(files):
    ok = run("experiment", "convergence", "--dist", files / "sub.json", "--n", 20000, "--reps", 10,
             "--seed", 1, "--check", "--tol", 0.2)
    assert ok.exit_code == 0
    bad = run("experiment", "convergence", "--dist", files / "sub.json", "--n", 200, "--reps", 2,
              "--seed", 1, "--check", "--tol", 1e-9)
    assert bad.exit_code == 3


def test_sweep(files):
    r = run("experiment", "sweep", "--h", files / "cubic.json", "--side", "both")
    d = json.loads(r.output)
    assert d["lambda_c"] == 0.25 and set(d["fits"]) == {"sub", "super"}
    r = run("experiment", "sweep", "--h", files / "cubic.json", "--format", "csv")
    assert len(r.output.splitlines()) == 1 + 18
    r = run("experiment", "sweep", "--h", files / "cubic.json", "--check", "--expect-exponent", 1.0)
    assert r.exit_code == 0
    r = run("experiment", "sweep", "--h", files / "cubic.json", "--check", "--expect-exponent", 2.0)
    assert r.exit_code == 3


def test_duality_and_pathbound(files):
    r = run("experiment", "duality", "--dist", files / "p13.json", "--n", 5000, "--reps", 3, "--seed", 2, "--check",
            "--tol", 0.05)
    assert r.exit_code == 0, r.output
    r = run("experiment", "pathbound", "--seq", files / "degs.txt", "--reps", 20, "--seed", 2, "--check")
    assert r.exit_code == 0
    assert json.loads(r.output)["rows"][0]["bound"] == pytest.approx(420.0)


def test_counterexamples_cli(files):
    r = run("experiment", "counterexamples", "--seed", 1, "--n", 400, "--two-star-reps", 20, "--cubic-reps", 4)
    assert r.exit_code == 0
    d = json.loads(r.output)
    assert {"star", "two_star", "cubic_plus_isolated"} <= set(d)


def test_workers_env(files, monkeypatch):
    args = ("bp", "--dist", files / "p13.json", "--reps", 9000, "--seed", 5)
    one = run(*args, env={"SUSLAB_WORKERS": "1"}).output
    two = run(*args, env={"SUSLAB_WORKERS": "2"}).output
    assert one == two
