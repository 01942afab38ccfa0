import json
import subprocess
import sys

import pytest

RUN = [sys.executable, "-m", "gcdlab.cli"]


def run_cli(*args, expect=0):
    proc = subprocess.run(RUN + list(args), capture_output=True, text=True)
    assert proc.returncode == expect, proc.stdout + proc.stderr
    return proc.stdout


def test_constants_command():
    out = run_cli("constants", "--tol", "1e-10")
    row = json.loads(out)
    assert abs(row["kappa_star_gcd"] - 0.48154) < 1e-4
    assert abs(row["delta0"] - 0.16656) < 1e-4
    assert abs(row["delta"] - 0.08607) < 1e-5


def test_energy_command():
    out = run_cli("energy", "--n", "3", "--weights", "ones")
    assert json.loads(out)["energy"] == 15.0


def test_theta_command():
    out = run_cli("theta", "--p", "5", "--x", "1", "--weights", "ones")
    row = json.loads(out)
    assert row["m0_count"] == 2


def test_gcdsum_csv_format():
    out = run_cli("gcdsum", "--n", "2", "--kind", "t1", "--format", "csv")
    header, row = out.strip().split("\n")
    assert header == "N,kind,weight_desc,raw,ratio"
    cells = row.split(",")
    assert cells[0] == "2" and cells[1] == "t1"
    assert float(cells[4]) == pytest.approx(1.7071067811865475)
    assert "." in cells[4] and "," + cells[4] in "," + row  # '.' decimal only


def test_gcdsum_optimal_qp_and_dump(tmp_path):
    dump = tmp_path / "w.csv"
    out = run_cli(
        "gcdsum", "--n", "8", "--kind", "t1", "--weights", "optimal-qp",
        "--dump-weights", str(dump),
    )
    row = json.loads(out)
    assert row["weight_desc"] == "optimal-qp"
    lines = dump.read_text().strip().split("\n")
    parsed = {int(l.split(",")[0]): float(l.split(",")[1]) for l in lines}
    assert sum(parsed.values()) == pytest.approx(1.0, abs=1e-9)


def test_indicator_file_weights(tmp_path):
    path = tmp_path / "ind.csv"
    path.write_text("2,1\n3,1\n5,1\n")
    out = run_cli("energy", "--n", "6", "--weights", f"indicator-file:{path}")
    row = json.loads(out)
    assert row["energy"] == 15.0  # three primes: 9 + 6 semiprime repeats


def test_multable_scan():
    out = run_cli("multable", "--powers", "4", "--format", "csv")
    lines = out.strip().split("\n")
    assert lines[0] == "N,A(N),density"
    counts = {int(l.split(",")[0]): int(l.split(",")[1]) for l in lines[1:]}
    assert counts[4] == 9 and counts[16] == 97


def test_charsum_command():
    out = run_cli("charsum", "--p", "5", "--index", "2", "--m", "0", "--n", "3")
    row = json.loads(out)
    assert row["re"] == pytest.approx(-1.0, abs=1e-12)


def test_burgess_command():
    out = run_cli("burgess", "--p", "101", "--r", "2", "--n", "17", "--offsets", "16",
                  "--format", "csv")
    lines = out.strip().split("\n")
    assert lines[0].startswith("p,r,N,A,B,maxS,envelope,ratio,pv_ratio")
    assert lines[1].split(",")[0] == "101"


def test_moments_default_r_grid():
    out = run_cli("moments", "--p", "101", "--N", "9")
    rows = [json.loads(l) for l in out.strip().split("\n")]
    assert [row["r"] for row in rows] == [1.4, 1.5, 1.75, 1.9]
    assert all(row["slack"] >= -1e-9 for row in rows)


def test_moments_command():
    out = run_cli("moments", "--p", "101", "--n", "9", "--r", "1.5", "--format", "csv")
    lines = out.strip().split("\n")
    assert lines[0] == "p,N,r,S1,S2,Sr,M4,slack,lower_bound,lhs,rhs,lhs_closed_form"
    cells = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert float(cells["slack"]) >= -1e-9
    assert float(cells["S2"]) == pytest.approx(9 - 81 / 100)


def test_determinism_byte_identical():
    a = run_cli("theta", "--p", "31", "--x", "1", "--seed", "5")
    b = run_cli("theta", "--p", "31", "--x", "1", "--seed", "5")
    assert a == b
    a = run_cli("check", "gcd", "--seed", "3")
    b = run_cli("check", "gcd", "--seed", "3")
    assert a == b


def test_check_commands():
    for module in ("gcd", "energy", "dirichlet", "theta", "weights"):
        out = run_cli("check", module)
        assert all(json.loads(l)["check"].startswith("ok") for l in out.strip().split("\n"))


def test_usage_error_exit_2():
    proc = subprocess.run(RUN + ["gcdsum", "--kind", "bogus", "--n", "4"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    proc = subprocess.run(RUN + ["nonsense"], capture_output=True, text=True)
    assert proc.returncode == 2


def test_domain_error_exit_1_json():
    proc = subprocess.run(
        RUN + ["moments", "--p", "101", "--n", "200", "--r", "1.5"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1
    err = json.loads(proc.stdout)
    assert err["type"] == "DomainError"


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n=3\nweights=ones\n")
    out = run_cli("energy", "--config", str(cfg))
    assert json.loads(out)["n"] == 3
    # explicit flag wins over the config value
    out = run_cli("energy", "--config", str(cfg), "--n", "2")
    assert json.loads(out)["n"] == 2


def test_config_unknown_key_rejected(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("frobnicate=1\n")
    proc = subprocess.run(RUN + ["energy", "--config", str(cfg), "--n", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 2


def test_out_file(tmp_path):
    path = tmp_path / "report.json"
    run_cli("energy", "--n", "3", "--out", str(path))
    assert json.loads(path.read_text())["energy"] == 15.0


def test_timings_flag_adds_field():
    out = run_cli("energy", "--n", "3")
    assert "seconds" not in json.loads(out)
    out = run_cli("energy", "--n", "3", "--timings")
    assert "seconds" in json.loads(out)


def test_theta_scan_jobs():
    seq = run_cli("theta", "--scan", "30", "--x", "1", "--format", "csv")
    par = run_cli("theta", "--scan", "30", "--x", "1", "--format", "csv", "--jobs", "2")
    assert seq == par
    lines = seq.strip().split("\n")
    assert len(lines) == 1 + len([p for p in (5, 7, 11, 13, 17, 19, 23, 29) ])
