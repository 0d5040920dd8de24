import pytest

from etalecover.cli import (main, parse_certificate, parse_instance,
                            parse_morphism, print_instance,
                            serialize_certificate, serialize_morphism)
from etalecover.errors import ParseError

CONIC = """\
p=3
ambient=2
F=x*z-y^2
D=y,z
S=(0:0:1)@1
mode=global
"""


def test_parse_instance_round_trip():
    inst = parse_instance(CONIC)
    assert inst.p == 3 and inst.mode == "global"
    assert parse_instance(print_instance(inst)).F == inst.F


def test_parse_instance_rejects_composite_p():
    with pytest.raises(ParseError) as err:
        parse_instance("p=4\nF=x*z-y^2\n")
    assert "4 not prime" in str(err.value)
    assert err.value.line == 1


def test_parse_instance_rejects_bad_lines():
    with pytest.raises(ParseError):
        parse_instance("p=3\nF=x*z-y^2\nnonsense line\n")
    with pytest.raises(ParseError):
        parse_instance("p=3\nF=x*z-y^2\nS=(0:0)@1\n")   # wrong arity
    with pytest.raises(ParseError):
        parse_instance("p=3\nF=x*z-y^2\nbogus=1\n")
    with pytest.raises(ParseError):
        parse_instance("p=3\np=5\nF=x*z-y^2\n")


def test_s_points_closed_under_frobenius():
    inst = parse_instance("p=3\nF=x*z-y^2\nS=(w:1:1)@2\n")
    assert len(inst.S) == 2


def test_morphism_file_round_trip(conic_cover):
    M, _ = conic_cover
    text = serialize_morphism(M, 3)
    M2 = parse_morphism(text)
    assert M2.u == M.u and M2.ledger == M.ledger
    assert serialize_morphism(M2, 3) == text


def test_certificate_file_round_trip(conic_cover):
    M, C = conic_cover
    text = serialize_certificate(C, 3)
    C2 = parse_certificate(text)
    assert serialize_certificate(C2, 3) == text
    assert len(C2.finiteness) == len(C.finiteness)
    assert C2.S_off_H == C.S_off_H


def _write_instance(tmp_path):
    path = tmp_path / "conic.txt"
    path.write_text(CONIC)
    return path


def test_cli_validate_ok(tmp_path, capsys):
    assert main(["validate", str(_write_instance(tmp_path))]) == 0
    assert "instance OK" in capsys.readouterr().out


def test_cli_validate_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("p=4\n")
    assert main(["validate", str(bad)]) == 2
    assert "not prime" in capsys.readouterr().err


def test_cli_full_pipeline(tmp_path, capsys):
    inst = _write_instance(tmp_path)
    out = tmp_path / "out"
    assert main(["construct", str(inst), "--out-dir", str(out)]) == 0
    morph = out / "conic.morphism.txt"
    cert = out / "conic.certificate.txt"
    assert morph.exists() and cert.exists()
    assert (out / "conic.summary.txt").exists()
    assert main(["check-cert", str(inst), str(morph), str(cert)]) == 0
    assert main(["oracle", str(inst), str(morph), "--depth", "2"]) == 0
    text = capsys.readouterr().out
    assert "PASS" in text

    # determinism: a second run produces identical bytes
    out2 = tmp_path / "out2"
    assert main(["construct", str(inst), "--out-dir", str(out2)]) == 0
    assert (out2 / "conic.morphism.txt").read_bytes() == morph.read_bytes()
    assert (out2 / "conic.certificate.txt").read_bytes() == cert.read_bytes()

    # a mutated certificate is rejected with exit code 6
    lines = cert.read_text().splitlines()
    for i, ln in enumerate(lines):
        if ln.startswith("cof ") and any(ch.isdigit() for ch in ln[4:]):
            j = next(k for k, ch in enumerate(ln) if k >= 4 and ch.isdigit())
            lines[i] = ln[:j] + str((int(ln[j]) + 1) % 3) + ln[j + 1:]
            break
    mut = tmp_path / "mutated.txt"
    mut.write_text("\n".join(lines) + "\n")
    assert main(["check-cert", str(inst), str(morph), str(mut)]) == 6
    assert "FAILED" in capsys.readouterr().err
