import json
from fractions import Fraction as F
from pathlib import Path

import pytest

from qchar.harness import (
    ArityMismatch,
    Cache,
    ParseError,
    UnknownBuilder,
    evaluate_case,
    parse_corpus,
    parse_expr,
    pretty,
    pretty_corpus,
)
from qchar.harness.evaluator import CacheAuditError
from qchar.harness.cli import SHIPPED, main, shipped_corpus_dir
from qchar.harness.grammar import Call, Num, parse_case_line
from qchar.harness.registry import REGISTRY

KNOWN = REGISTRY.keys()


def one(line):
    return parse_case_line(line, 1, KNOWN)


def test_parse_examples():
    c = one("check g-shift : G() == qshift(3/1, F(3)) @ 20")
    assert c.id == "g-shift" and c.kind == "equal" and c.order == 20
    assert c.rhs == Call("qshift", ((Num(F(3)), Call("F", ((Num(F(3)),),))),))
    c = one("check aa : lode_serre(2; 0, 0, 1/144*E4) annihilates eta()^2 @ 40")
    assert c.kind == "annihilates" and len(c.lhs.groups) == 2
    c = one("check z : eta - eta == 0")
    assert c.kind == "zero" and c.order is None


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as err:
        one("check x : ==")
    assert err.value.line == 1 and err.value.col == 11
    assert "expression" in err.value.expected


def test_parse_error_in_corpus_carries_line():
    with pytest.raises(ParseError) as err:
        parse_corpus("# header\ncheck a : eta == eta\ncheck b : eta ==\n", KNOWN)
    assert err.value.line == 3


def test_unknown_builder_and_arity():
    with pytest.raises(UnknownBuilder):
        parse_expr("etaa(2)", KNOWN)
    with pytest.raises(ArityMismatch):
        parse_expr("weyl(3)", KNOWN)
    with pytest.raises(ArityMismatch) as err:
        parse_corpus("check a : eta == eta\ncheck b : eta == ct_char(3, 0) @ 5\n", KNOWN)
    assert err.value.line == 2


def test_rational_precedence():
    assert pretty(parse_expr("1/240*thetaq(E4)*eta^-10", KNOWN)) == "1/240*thetaq(E4)*eta^-10"
    assert pretty(parse_expr("-(E2 - E4)^2", KNOWN)) == "-(E2 - E4)^2"


@pytest.mark.parametrize("name", SHIPPED)
def test_round_trip_on_shipped_corpus(name):
    text = (shipped_corpus_dir() / name).read_text()
    cases = parse_corpus(text, KNOWN)
    canon = pretty_corpus(cases)
    assert pretty_corpus(parse_corpus(canon, KNOWN)) == canon
    assert [c.id for c in parse_corpus(canon, KNOWN)] == [c.id for c in cases]


def test_mutation_gives_witness():
    c = one("check bad : lode_serre(5; 1, 0, -7/35*E4, 19/216*E6, -5/324*E4^2, 5/1944*E4*E6) "
            "annihilates ct_char(3, 0, \"sch\") @ 20")
    r = evaluate_case(c)
    assert r.verdict == "first_difference"
    assert r.witness == {"exponent": "7/6", "lhs": "-5/108", "rhs": "0"}


def test_insufficient_verdict():
    r = evaluate_case(one("check t : truncate(5, eta) == eta @ 10"))
    assert r.verdict == "insufficient" and r.available == "5"


def test_evaluation_error_is_reported():
    r = evaluate_case(one("check e : ct_char(4, 0, \"sch\") == eta @ 5"))
    assert r.verdict == "error" and "SectorUnsupported" in r.message


def _strip_timing(text):
    out = []
    for line in text.splitlines():
        rec = json.loads(line)
        rec.pop("timing")
        out.append(rec)
    return out


def test_cold_and_warm_reports_agree(tmp_path, capsys):
    argv = ["verify", "psl.idn", "osp.idn", "--cache", str(tmp_path), "--format", "report"]
    assert main(argv) == 0
    cold = capsys.readouterr().out
    assert main(argv) == 0
    warm = capsys.readouterr().out
    assert _strip_timing(cold) == _strip_timing(warm)
    hits = sum(json.loads(x)["timing"]["cache_hits"] for x in warm.splitlines())
    misses = sum(json.loads(x)["timing"]["cache_misses"] for x in warm.splitlines())
    assert hits > 0 and misses == 0


def test_report_sorted_by_id_with_jobs(tmp_path, capsys):
    assert main(["verify", "osp.idn", "--no-cache", "--jobs", "2", "--format", "report"]) == 0
    ids = [json.loads(x)["id"] for x in capsys.readouterr().out.splitlines()]
    assert ids == sorted(ids)


def test_cache_audit_detects_corruption(tmp_path):
    c = one("check a : eta == qshift(1/24, poch_inf) @ 10")
    assert evaluate_case(c, cache=Cache(tmp_path)).ok
    corrupted = 0
    for p in Path(tmp_path).glob("*/*.json"):
        data = json.loads(p.read_text())
        rec = data["value"]
        # only the eta entry starts at q^(1/24)
        if F(rec["v"], rec["D"]) == F(1, 24):
            rec["coeffs"][1] = "5/1"
            p.write_text(json.dumps(data))
            corrupted += 1
    assert corrupted == 1
    r = evaluate_case(c, cache=Cache(tmp_path))
    assert r.verdict == "first_difference" and r.witness["exponent"] == "1/12"
    with pytest.raises(CacheAuditError):
        evaluate_case(c, cache=Cache(tmp_path, audit_rate=1.0, seed=0))


def test_cli_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.idn"
    good.write_text("check a : eta^2 == eta*eta @ 10\n")
    bad = tmp_path / "bad.idn"
    bad.write_text("check a : eta^2 == eta @ 10\n")
    broken = tmp_path / "broken.idn"
    broken.write_text("check a : eta^2 ==\n")
    assert main(["verify", str(good), "--no-cache"]) == 0
    assert main(["verify", str(bad), "--no-cache"]) == 1
    out = capsys.readouterr().out
    assert "FAIL a" in out and "first difference at q^1/24: 0 != 1" in out
    assert main(["verify", str(broken), "--no-cache"]) == 2
    assert main(["verify", str(tmp_path / "missing.idn"), "--no-cache"]) == 2
    assert "line 1" in capsys.readouterr().err


def test_expand_report(capsys):
    assert main(["expand", "sch:U[n=3]", "--order", "10", "--format", "report"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["valuation"] == "1/6"
    assert rec["coefficients"][:5] == ["1", "8", "44", "152", "487"]
    assert len(rec["coefficients"]) == 10


def test_expand_expression(capsys):
    assert main(["expand", "eta^3", "--order", "3", "--format", "report"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["valuation"] == "1/8" and rec["coefficients"] == ["1", "-3", "0"]


def test_mlde_find_cli(capsys):
    assert main(["mlde-find", "sch:U[n=3]", "--degree", "5", "--basis", "E4,E6", "--order", "80"]) == 0
    assert capsys.readouterr().out.strip() == \
        "theta^5 - 7/36*E4*theta^3 + 19/216*E6*theta^2 - 5/324*E4^2*theta + 5/1944*E4*E6"
    assert main(["mlde-find", "psl(1)", "--degree", "2", "--basis", "E4,E42", "--order", "60", "--raw"]) == 0
    assert capsys.readouterr().out.strip() == "D^2 - 1/6*E2*D - 1/720*E4 + 1/120*E42"


def test_cache_dir_environment(monkeypatch, tmp_path):
    from qchar.harness.evaluator import default_cache_dir

    monkeypatch.setenv("QCHAR_CACHE_DIR", str(tmp_path / "c"))
    assert default_cache_dir() == tmp_path / "c"
