import csv
import io
import json
import math

import pytest

from grasscones import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("argv,needle", [
    (["certify", "grassmann", "2", "3", "R"], "m >= 2n >= 4"),
    (["certify", "grassmann", "1", "4", "R"], "m >= 2n >= 4"),
    (["certify", "projective", "1", "1", "C"], "m >= 2"),
    (["certify", "projective", "2", "5", "C"], "n = 1"),
    (["certify", "oriented", "2", "3"], "2 <= n <= m - 2"),
    (["certify", "grassmann", "2", "4", "O"], "R, C, H"),
    (["certify", "cayley", "3"], "no parameters"),
    (["certify", "spin", "3"], "unknown family"),
    (["certify", "grassmann", "x", "4", "R"], "bad integer"),
])
def test_usage_errors(capsys, argv, needle):
    code, out, err = run(capsys, *argv)
    assert code == cli.EXIT_USAGE
    assert needle in err and out == ""


def test_argparse_errors_are_usage(capsys):
    assert run(capsys, "certify")[0] == cli.EXIT_USAGE
    assert run(capsys, "table", "nope")[0] == cli.EXIT_USAGE
    assert run(capsys, "certify", "cayley", "--format", "xml")[0] == cli.EXIT_USAGE


def test_certify_csv(capsys):
    code, out, _ = run(capsys, "certify", "grassmann", "2", "4", "R", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == cli.CSV_COLUMNS
    assert rows[1] == ["G(2,4;R)", "5", "2", "26.88", "90.00", "MINIMIZING", "ORACLE_VERIFIED"]


def test_certify_json_carries_radians(capsys):
    code, out, _ = run(capsys, "certify", "projective", "3", "C", "--format", "json")
    row = json.loads(out)[0]
    assert code == 0
    assert row["radius_rad"] == pytest.approx(2 * math.pi / 3)
    assert row["theta_rad"] == pytest.approx(math.radians(row["theta_deg"]))
    assert row["radius_tag"] == "2pi/3" and row["status"] == "ORACLE_VERIFIED"


def test_projective_with_explicit_n(capsys):
    a = run(capsys, "certify", "projective", "1", "4", "H", "--format", "csv")[1]
    b = run(capsys, "certify", "projective", "4", "H", "--format", "csv")[1]
    assert a == b and "HP^3" in a


def test_exit_codes(capsys):
    assert run(capsys, "certify", "oriented", "2", "4")[0] == cli.EXIT_INCONCLUSIVE
    code, out, _ = run(capsys, "certify", "projective", "3", "R")
    assert code == cli.EXIT_INCONCLUSIVE and "EXCLUDED" in out
    code, out, _ = run(capsys, "certify", "projective", "2", "R")
    assert code == cli.EXIT_OK and "TOTALLY_GEODESIC" in out and "CLOSED_FORM" in out


def test_no_oracle_and_budget_status(capsys):
    out = run(capsys, "certify", "cayley", "--no-oracle", "--format", "csv")[1]
    assert out.strip().endswith("CLOSED_FORM")
    out = run(capsys, "certify", "grassmann", "3", "8", "H", "--format", "csv")[1]
    assert out.strip().endswith("UNVERIFIED_NUMERIC")
    out = run(capsys, "certify", "cayley", "--oracle-budget", "10", "--format", "csv")[1]
    assert out.strip().endswith("UNVERIFIED_NUMERIC")


def test_oracle_failure_exit(capsys, monkeypatch):
    monkeypatch.setitem(cli.DEFAULTS, "sup_tol", -1.0)
    code, out, _ = run(capsys, "certify", "grassmann", "2", "4", "R", "--format", "csv")
    assert code == cli.EXIT_VERIFY and "ORACLE_FAILED" in out


def test_every_verdict_has_status(capsys):
    out = run(capsys, "table", "projective")[1]
    for line in out.splitlines()[2:]:
        assert any(s in line for s in ("ORACLE_VERIFIED", "CLOSED_FORM", "UNVERIFIED_NUMERIC"))


def test_determinism(capsys):
    for fmt in ("csv", "json"):
        a = run(capsys, "table", "grassmann-small", "--format", fmt)[1]
        b = run(capsys, "table", "grassmann-small", "--format", fmt)[1]
        assert a == b


def test_table_grassmann_last_row(capsys):
    code, out, _ = run(capsys, "table", "grassmann-small", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 6
    last = rows[-1]
    assert (last["family"], last["k"], last["alpha_sq"], last["radius_deg"]) == ("G(2,4;C)", "9", "4", "90.00")
    assert float(last["theta_deg"]) == pytest.approx(11.57, abs=0.15)


def test_table_oriented(capsys):
    code, out, _ = run(capsys, "table", "oriented", "--max-m", "8", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    bad = [r["family"] for r in rows if r["verdict"] != "MINIMIZING"]
    assert bad == ["G~(2,4;R)"]
    assert len(rows) == sum(m // 2 - 1 for m in range(4, 9))


def test_table_summary(capsys):
    code, out, _ = run(capsys, "table", "summary", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 6
    assert {r["originally_from"] for r in rows} >= {"Kerckhove(94)", "Kanno(02)", "Ohno,etc(15)", "Hirohashi,etc(00)"}
    assert "RP^2" in rows[0]["computed"] and "G~(2,4;R)" in rows[-1]["computed"]


def test_verify_grassmann(capsys):
    code, out, _ = run(capsys, "verify", "grassmann", "2", "4", "R", "--format", "json")
    checks = {c["check"]: c for c in json.loads(out)}
    assert code == 0
    assert all(c["status"] == "PASS" for c in checks.values())
    assert checks["normal_radius"]["residual"] < 1e-3


def test_verify_oriented_and_cayley(capsys):
    code, out, _ = run(capsys, "verify", "oriented", "2", "4", "--format", "json")
    checks = {c["check"]: c["status"] for c in json.loads(out)}
    assert code == 0 and checks["sup_h_squared"] == checks["normal_radius"] == "PASS"
    code, out, _ = run(capsys, "verify", "cayley", "--format", "json")
    checks = {c["check"]: c for c in json.loads(out)}
    assert code == 0 and checks["second_form"]["status"] == "PASS"
    assert "chart" in checks["second_form"]["detail"]


def test_verify_skipped_budget(capsys):
    code, out, _ = run(capsys, "verify", "grassmann", "2", "8", "H", "--format", "csv")
    assert code == 0
    assert out.count("SKIPPED_BUDGET") == 5


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# overrides\noracle-budget = 5\nprofile = exp\n")
    out = run(capsys, "certify", "grassmann", "2", "4", "R", "--config", str(cfg), "--format", "json")[1]
    row = json.loads(out)[0]
    assert row["status"] == "UNVERIFIED_NUMERIC" and row["profile"] == "EXP"
    out = run(capsys, "certify", "grassmann", "2", "4", "R", "--config", str(cfg), "--oracle-budget", "64",
              "--profile", "f", "--format", "json")[1]
    row = json.loads(out)[0]
    assert row["status"] == "ORACLE_VERIFIED" and row["profile"] == "F"
    cfg.write_text("colour = red\n")
    code, _, err = run(capsys, "certify", "cayley", "--config", str(cfg))
    assert code == cli.EXIT_USAGE and "colour" in err


def test_list(capsys):
    code, out, _ = run(capsys, "list", "--format", "csv")
    assert code == 0 and "oriented N M" in out


def test_radius_tags():
    assert cli.parse_family(["grassmann", "2", "5", "R"]).radius_tag() == "arccos(1/6)"
    assert cli.parse_family(["grassmann", "3", "6", "C"]).radius_tag() == "arccos(1/3)"
    assert cli.parse_family(["projective", "3", "C"]).radius_tag() == "2pi/3"
    assert cli.parse_family(["projective", "4", "C"]).radius_tag() == "arccos(-1/3)"
