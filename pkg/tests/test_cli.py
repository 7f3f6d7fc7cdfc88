import pytest

from qgb.cli import Params, main, registry, run_suites
from qgb.freealg import parse_expression


@pytest.fixture(autouse=True)
def _clean_budget(monkeypatch):
    monkeypatch.delenv("QGB_BUDGET", raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err


@pytest.mark.parametrize("expr,expected", [
    ("e2*e1", "r^-2 e1 e2 - r^-2 E(1,2)"),
    ("e1*E(1,2) - s^2*E(1,2)*e1", "0"),
    ("1", "1"),
])
def test_nf_examples(capsys, expr, expected):
    code, out, _ = run(capsys, "nf", "--n", "2", expr)
    assert (code, out) == (0, expected)


def test_nf_output_parses_back(capsys):
    _, out, _ = run(capsys, "nf", "--n", "3", "e3*e2*e1*e3")
    code, out2, _ = run(capsys, "nf", "--n", "3", out)
    assert code == 0 and out2 == out
    assert parse_expression(out)


def test_nf_trace_and_tensor(capsys):
    code, out, _ = run(capsys, "nf", "--n", "2", "--trace", "e2*e1")
    assert code == 0 and out.splitlines()[-1] == "r^-2 e1 e2 - r^-2 E(1,2)"
    assert len(out.splitlines()) >= 2
    code, out, _ = run(capsys, "nf", "--n", "2", "e2 e1 ⊗ 1")
    assert code == 0 and "⊗" in out


def test_nf_restricted(capsys):
    code, out, _ = run(capsys, "nf", "--n", "2", "--ell", "5", "--y", "1", "--z", "4", "--restricted", "e1^5 + w1^5")
    assert (code, out) == (0, "1")


def test_parse_error_exit(capsys):
    code, _, err = run(capsys, "nf", "--n", "2", "e1 * * e2")
    assert code == 2 and "^" in err


def test_budget_exit(capsys):
    code, _, err = run(capsys, "nf", "--n", "2", "--budget", "2", "e2*e1*e2*e1*e2*e2*e1*e2*e1*e1")
    assert code == 3 and "budget" in err


def test_usage_errors(capsys):
    assert run(capsys, "certify", "9.9.9")[0] == 2
    assert run(capsys, "nf", "--n", "2", "--y", "1", "e1")[0] == 2
    assert run(capsys, "bogus")[0] == 2


def test_certify_single_tag(capsys):
    code, out, _ = run(capsys, "certify", "3.6.8", "--n", "3")
    assert code == 0 and out.endswith("PASS: 2 records")


def test_certify_records_format(capsys):
    code, out, _ = run(capsys, "certify", "3.6.8", "--n", "3", "--format", "records")
    lines = out.splitlines()[:-1]
    assert code == 0 and all(len(line.split("\t")) == 4 for line in lines)
    assert all(line.split("\t")[1] == "PASS" for line in lines)


def test_certify_failure_exit(capsys):
    code, out, _ = run(capsys, "certify", "3.10.5", "--n", "2")
    assert code == 1 and "residue" in out


def test_certify_vacuous_tag(capsys):
    code, out, _ = run(capsys, "certify", "4.12", "--n", "2")
    assert (code, out) == (0, "no instances at this rank")


def test_rou_reports(capsys):
    assert run(capsys, "rou", "ribbon")[1] == "witness a=(1, 3)"
    code, out, _ = run(capsys, "rou", "double")
    assert code == 0 and out.endswith("gcd(34,5)=1: holds")
    code, out, _ = run(capsys, "rou", "integral", "--side", "right")
    assert code == 0 and out.endswith("PASS: 7 records")
    assert run(capsys, "rou", "ribbon", "--ell", "4")[1].startswith("no witness")


def test_registry_is_complete():
    reg = registry()
    for tag in ("2.2", "3.4.3", "A.8", "3.10.1", "alpha-beta", "4.3.i", "4.8", "5.4", "5.5",
                "3.15", "4.9", "7.1", "7.5", "8.2"):
        assert tag in reg
    assert not reg["7.5"].in_all


def test_jobs_give_identical_records():
    tags = ["3.2.1", "3.6.8", "4.3.i"]
    serial = run_suites(tags, Params(3))
    parallel = run_suites(tags, Params(3), jobs=2)
    strip = lambda rs: [(r.tag, r.params, r.status) for r in rs]
    assert strip(serial) == strip(parallel)


def test_budget_flag_does_not_leak(capsys):
    run(capsys, "nf", "--n", "2", "--budget", "5", "e1")
    import os
    assert "QGB_BUDGET" not in os.environ
