import json

import pytest

from qseries.catalog import IdentityId
from qseries.cli import main, parse_complex
from qseries.replay import PipelineId


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_list_round_trip(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    ids = out.split()
    assert ids == [i.value for i in IdentityId] + [p.value for p in PipelineId]
    assert len(ids) == 15
    # every listed id is accepted by the matching subcommand
    for ident in ids[:11]:
        assert run(capsys, "verify", ident, "--trials", "1", "--seed", "3")[0] == 0
    for pid in ids[11:]:
        assert run(capsys, "replay", pid, "--trials", "1", "--window", "30,30")[0] == 0


def test_verify_summary_and_json(capsys, tmp_path):
    path = tmp_path / "v.json"
    code, out, _ = run(capsys, "verify", "qbinomial", "--trials", "5", "--seed", "1", "--json", str(path))
    assert code == 0
    assert out.startswith("qbinomial: 5/5 passed")
    doc = json.loads(path.read_text())
    assert doc["identity"] == "qbinomial" and doc["summary"]["pass_count"] == 5


def test_verify_failure_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "qgauss", "--trials", "3", "--tol", "1e-300")
    assert code == 1
    assert "trial" in out and "FAIL" in out


def test_verify_complex(capsys):
    code, out, _ = run(capsys, "verify", "BAILEY_6PSI6", "--trials", "3", "--complex")
    assert code == 0 and "3/3 passed" in out


def test_json_runs_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        run(capsys, "replay", "p3_6psi6", "--trials", "2", "--seed", "4", "--json", str(p))
    assert a.read_bytes() == b.read_bytes()


def test_replay_prints_steps(capsys):
    code, out, _ = run(capsys, "replay", "p1_1psi1", "--trials", "2")
    assert code == 0
    assert "interchange" in out and "end_to_end" in out and "2/2 passed" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "nope"],
        ["replay", "p9"],
        ["verify", "qbinomial", "--margin", "0.7"],
        ["verify", "qbinomial", "--trials", "0"],
        ["replay", "p1_1psi1", "--window", "x"],
        ["replay", "p1_1psi1", "--window", "0,5"],
        ["eval", "phi", "--num", "0.5", "--z", "0.5"],
        ["eval", "f", "--num", "0.5", "--den", "1.5", "--z", "0.5", "--q", "0.5"],
        ["eval", "phi", "--num", "zz", "--z", "0.5", "--q", "0.5"],
        ["eval", "phi", "--num", "0.5", "--z", "nan", "--q", "0.5"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_eval_phi(capsys):
    code, out, _ = run(capsys, "eval", "phi", "--num", "0.5", "--q", "0.5", "--z", "0.5")
    assert code == 0
    fields = {line[:14].strip(): line[14:].strip() for line in out.strip().splitlines()}
    # q-binomial theorem: (0.25;0.5)_inf / (0.5;0.5)_inf = 2
    assert abs(complex(fields["value"]) - 2) < 1e-14
    assert fields["status"] == "OK"


def test_eval_output_fields(capsys):
    code, out, _ = run(capsys, "eval", "psi", "--num", "3", "--den", "0.2", "--q", "0.5", "--z", "0.5")
    assert code == 0
    keys = [line[:14].strip() for line in out.strip().splitlines()]
    assert keys == ["value", "terms used", "tail estimate", "condition", "status"]
    assert "upper" in out and "lower" in out


def test_eval_negative_leading_value(capsys):
    code, out, _ = run(capsys, "eval", "f", "--num=-2,0.5", "--den", "1.5", "--z", "1")
    assert code == 0 and "OK" in out


def test_eval_divergent_exit_1(capsys):
    code, _, err = run(capsys, "eval", "f", "--num", "1,0.5", "--den", "1", "--z", "1")
    assert code == 1 and "DivergentSeries" in err


def test_parse_complex_forms():
    assert parse_complex("0.3+0.4i") == 0.3 + 0.4j
    assert parse_complex(" -2 ") == -2
    assert parse_complex("1.5J") == 1.5j
