import json

import pytest

from paraspace.cli import main
from paraspace.generators import gen_instance
from paraspace.oracles import eval_bf
from paraspace.textio import parse, serialize


def _file(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(serialize(obj) if not isinstance(obj, str) else obj, encoding="utf-8")
    return str(p)


@pytest.mark.parametrize("seed", range(4))
def test_solve_bf(tmp_path, capsys, seed):
    x = gen_instance("bf", None, seed)
    answer = eval_bf(x.formula, x.assignment)
    assert main(["solve", "bf", _file(tmp_path, "x.txt", x)]) == (0 if answer else 1)
    assert capsys.readouterr().out.strip() == ("yes" if answer else "no")


def test_gen_then_parse(tmp_path):
    out = tmp_path / "g.txt"
    assert main(["gen", "lcs", "--seed", "5", "--set", "strings=3", "-o", str(out)]) == 0
    assert parse(out.read_text(encoding="utf-8")) == gen_instance("lcs", {"strings": 3}, 5)


def test_reduce_writes_the_image(tmp_path, capsys):
    src = _file(tmp_path, "g.txt", gen_instance("graph", {"property": "layered-reach"}, 1))
    dst = tmp_path / "out.txt"
    assert main(["reduce", "layeredreach_to_lcs_injective", src, str(dst)]) == 0
    assert dst.read_text(encoding="utf-8").startswith("lcs ")
    assert "-> 4" in capsys.readouterr().err


def test_verify_writes_a_report(tmp_path, capsys):
    report = tmp_path / "r.jsonl"
    assert main(["verify", "--reduction", "seqca_to_lcs", "--cases", "100", "--seed", "7", "--out", str(report)]) == 0
    lines = report.read_text(encoding="utf-8").splitlines()
    records = [json.loads(l) for l in lines if not l.startswith("#")]
    assert len(records) == 100 and all(r["status"] == "agree" for r in records)
    assert "seqca_to_lcs" in capsys.readouterr().out


def test_verify_files(tmp_path):
    a = _file(tmp_path, "a.txt", gen_instance("dtsc", None, 0))
    b = _file(tmp_path, "b.txt", gen_instance("dtsc", None, 1))
    assert main(["verify", "--reduction", "identity", a, b]) == 0
    assert (tmp_path / "a.txt.identity.report.jsonl").exists()


def test_unknown_reduction_is_usage_error(tmp_path, capsys):
    src = _file(tmp_path, "x.txt", gen_instance("bf", None, 0))
    assert main(["reduce", "unknown", src, str(tmp_path / "y.txt")]) == 3
    assert "unknown reduction" in capsys.readouterr().err


def test_wrong_kind_is_usage_error(tmp_path):
    src = _file(tmp_path, "x.txt", gen_instance("bf", None, 0))
    assert main(["solve", "lcs", src]) == 3


def test_budget_exit(tmp_path):
    src = _file(tmp_path, "x.txt", gen_instance("ca", None, 0))
    assert main(["--budget", "2", "solve", "ca", src]) == 2


def test_parse_error_exit(tmp_path, capsys):
    src = _file(tmp_path, "x.txt", "garbage\n")
    assert main(["solve", "bf", src]) == 3
    assert capsys.readouterr().err.startswith("error:")


def test_normalize(tmp_path, capsys):
    src = _file(tmp_path, "r.txt", "rs -\nalphabet a b\nrule a b -> b\nrule b b -> b\n")
    assert main(["normalize", src, "a", "b", "a", "b"]) == 0
    assert capsys.readouterr().out.strip() == "b"
    assert main(["normalize", src, "a", "b", "a", "b", "--random-order", "3"]) == 0
    assert capsys.readouterr().out.strip() == "b"


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "seqca_to_lcs" in out and "g = 4κ" in out
