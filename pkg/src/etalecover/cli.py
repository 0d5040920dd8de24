"""Command-line front end.

Subcommands: construct, check-cert, oracle, validate.  Instance files use
``key=value`` lines (keys p, ambient, F, D, D1..Dm, S, mode plus optional
config overrides); all output files are deterministic plain text in the
canonical polynomial grammar, so certificates can be re-checked by an
independent implementation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field as dfield
from pathlib import Path

from . import ideal as ideal_module
from .arith import is_prime, make_extension, parse_element
from .cover import (CoverMorphism, DegreeLedger, build_etale_cover,
                    build_local_cover)
from .errors import (BudgetExceeded, DegreeCapExceeded, EtaleCoverError,
                     OracleViolation, ParseError, ResourceBudgetExceeded,
                     UnsupportedRequiresBlowup, ValidationError)
from .geometry import VarietyInstance, validate_instance
from .ideal import HomIdeal, NullstellensatzCert
from .poly import ProjPoint, SparseForm, parse_form
from .sections import SectionSearchConfig
from .verify import (Certificate, check_certificate, format_report,
                     oracle_check)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DEGREE_CAP = 3
EXIT_BUDGET = 4
EXIT_UNSUPPORTED = 5
EXIT_CERT_FAIL = 6
EXIT_ORACLE = 7


# ---------------------------------------------------------------------------
# instance files
# ---------------------------------------------------------------------------

@dataclass
class InstanceFile:
    p: int
    ambient: int                   # projective dimension of the ambient space
    F: SparseForm
    divisor: list = None           # generator list for D, or None
    extra_divisors: list = dfield(default_factory=list)
    S: list = dfield(default_factory=list)
    mode: str = "global"
    overrides: dict = dfield(default_factory=dict)

    @property
    def num_vars(self):
        return self.ambient + 1


def _split_outside_parens(text, sep=","):
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [s.strip() for s in parts if s.strip()]


def _parse_point(text, p, num_vars, line):
    body = text.strip()
    k = 1
    if "@" in body:
        body, _, ktext = body.partition("@")
        try:
            k = int(ktext)
        except ValueError:
            raise ParseError(f"bad extension degree {ktext!r}", line=line)
    body = body.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise ParseError(f"point {text!r} is not parenthesized", line=line)
    coords = body[1:-1].split(":")
    if len(coords) != num_vars:
        raise ParseError(f"point {text!r} needs {num_vars} coordinates",
                         line=line)
    field_ = make_extension(p, k)
    try:
        vals = tuple(parse_element(c, field_) for c in coords)
        return ProjPoint(vals)
    except ValueError as exc:
        raise ParseError(f"bad point {text!r}: {exc}", line=line)


def parse_instance(text: str) -> InstanceFile:
    """Parse the key=value instance grammar; line-anchored diagnostics."""
    data = {}
    order = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"expected key=value, got {line!r}", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        if key in data:
            raise ParseError(f"duplicate key {key!r}", line=lineno)
        data[key] = (value.strip(), lineno)
        order.append(key)

    def take(key, default=None):
        return data.pop(key, (default, None))

    ptext, pline = take("p")
    if ptext is None:
        raise ParseError("missing key p")
    try:
        p = int(ptext)
    except ValueError:
        raise ParseError(f"p must be an integer, got {ptext!r}", line=pline)
    if not is_prime(p):
        raise ParseError(f"{p} not prime", line=pline)

    atext, aline = take("ambient", "2")
    try:
        ambient = int(atext)
    except ValueError:
        raise ParseError(f"ambient must be an integer", line=aline)
    if ambient < 2:
        raise ParseError("ambient dimension must be at least 2", line=aline)
    num_vars = ambient + 1

    ftext, fline = take("F")
    if ftext is None:
        raise ParseError("missing key F")
    try:
        F = parse_form(ftext, p, num_vars)
    except ValueError as exc:
        raise ParseError(f"bad polynomial for F: {exc}", line=fline)

    def parse_gens(text, line):
        gens = []
        for part in _split_outside_parens(text):
            try:
                gens.append(parse_form(part, p, num_vars))
            except ValueError as exc:
                raise ParseError(f"bad polynomial {part!r}: {exc}",
                                 line=line)
        if not gens:
            raise ParseError("empty generator list", line=line)
        return gens

    dtext, dline = take("D")
    divisor = parse_gens(dtext, dline) if dtext else None

    extra = []
    i = 1
    while f"D{i}" in data:
        gtext, gline = take(f"D{i}")
        extra.append(parse_gens(gtext, gline))
        i += 1

    S = []
    stext, sline = take("S")
    if stext:
        for part in _split_outside_parens(stext):
            P = _parse_point(part, p, num_vars, sline)
            for Q in P.orbit():        # close under Frobenius
                if Q not in S:
                    S.append(Q)

    mtext, mline = take("mode", "global")
    if mtext not in ("global", "local"):
        raise ParseError(f"mode must be global or local, got {mtext!r}",
                         line=mline)

    overrides = {}
    for key in ("seed", "max-degree", "base-step", "depth"):
        vtext, vline = take(key)
        if vtext is not None:
            try:
                overrides[key] = int(vtext)
            except ValueError:
                raise ParseError(f"{key} must be an integer", line=vline)

    if data:
        key = next(iter(data))
        raise ParseError(f"unknown key {key!r}", line=data[key][1])
    return InstanceFile(p=p, ambient=ambient, F=F, divisor=divisor,
                        extra_divisors=extra, S=S, mode=mtext,
                        overrides=overrides)


def print_instance(inst: InstanceFile) -> str:
    """Canonical text for an instance; parse(print(i)) round-trips."""
    lines = [f"p={inst.p}", f"ambient={inst.ambient}", f"F={inst.F}"]
    if inst.divisor:
        lines.append("D=" + ",".join(str(g) for g in inst.divisor))
    for i, gens in enumerate(inst.extra_divisors, 1):
        lines.append(f"D{i}=" + ",".join(str(g) for g in gens))
    if inst.S:
        lines.append("S=" + ",".join(f"{P}@{P.field.k}" for P in inst.S))
    lines.append(f"mode={inst.mode}")
    for key in ("seed", "max-degree", "base-step", "depth"):
        if key in inst.overrides:
            lines.append(f"{key}={inst.overrides[key]}")
    return "\n".join(lines) + "\n"


def instance_to_variety(inst: InstanceFile) -> VarietyInstance:
    divisor = HomIdeal(inst.divisor) if inst.divisor else None
    extra = [HomIdeal(gens) for gens in inst.extra_divisors]
    V = VarietyInstance(inst.p, inst.F, divisor_D=divisor,
                        extra_divisors=extra, S=list(inst.S))
    diags = validate_instance(V)
    if diags:
        raise ValidationError("; ".join(diags))
    return V


# ---------------------------------------------------------------------------
# morphism and certificate files
# ---------------------------------------------------------------------------

def serialize_morphism(M: CoverMorphism, num_vars: int) -> str:
    led = M.ledger
    lines = ["etale-cover morphism",
             f"p={led.p}", f"num_vars={num_vars}",
             f"ledger e={led.e} m={led.m} r={led.r} l={led.l}"]
    for i, u in enumerate(M.u):
        lines.append(f"u{i}={u}")
    lines.append(f"s={M.s}")
    for i, f in enumerate(M.s_list, 1):
        lines.append(f"s{i}={f}")
    lines.append(f"t={M.t}")
    for i, f in enumerate(M.t_list, 1):
        lines.append(f"t{i}={f}")
    return "\n".join(lines) + "\n"


def _key_values(line, expect, lineno):
    name, *pairs = line.split()
    if name != expect:
        raise ParseError(f"expected {expect!r} header", line=lineno)
    out = {}
    for pair in pairs:
        key, _, value = pair.partition("=")
        out[key] = int(value)
    return out


def parse_morphism(text: str) -> CoverMorphism:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "etale-cover morphism":
        raise ParseError("not a morphism file", line=1)
    kv = {}
    for lineno, line in enumerate(lines[1:], 2):
        if line.startswith("ledger "):
            kv["ledger"] = (line[len("ledger "):], lineno)
            continue
        key, _, value = line.partition("=")
        kv[key.strip()] = (value.strip(), lineno)
    try:
        p = int(kv.pop("p")[0])
        num_vars = int(kv.pop("num_vars")[0])
        led_text = kv.pop("ledger")[0]
    except KeyError as exc:
        raise ParseError(f"morphism file missing {exc}")
    led = {}
    for pair in led_text.split():
        key, _, value = pair.partition("=")
        led[key] = int(value)
    ledger = DegreeLedger(p=p, e=led["e"], m=led["m"], r=led["r"],
                          l=led["l"])

    def forms(prefix, start):
        out = []
        i = start
        while f"{prefix}{i}" in kv:
            text_, lineno = kv.pop(f"{prefix}{i}")
            out.append(parse_form(text_, p, num_vars))
            i += 1
        return out

    u = forms("u", 0)
    s = parse_form(kv.pop("s")[0], p, num_vars)
    s_list = forms("s", 1)
    t = parse_form(kv.pop("t")[0], p, num_vars)
    t_list = forms("t", 1)
    if not u or len(s_list) != len(u) - 1 or len(t_list) != len(u) - 1:
        raise ParseError("morphism file has inconsistent form counts")
    return CoverMorphism(u=u, ledger=ledger, s=s, s_list=s_list, t=t,
                         t_list=t_list)


def serialize_certificate(C: Certificate, num_vars: int) -> str:
    led = C.ledger
    lines = ["etale-cover certificate",
             f"p={C.p}", f"num_vars={num_vars}",
             f"ledger e={led.e} m={led.m} r={led.r} l={led.l}",
             f"flatness={C.flatness_note}"]

    def block(name, cert, **attrs):
        head = " ".join([f"begin {name}"]
                        + [f"{k}={v}" for k, v in attrs.items()])
        lines.append(head)
        for g, c in zip(cert.generators, cert.cofactors):
            lines.append(f"gen {g}")
            lines.append(f"cof {c}")
        lines.append("end")

    for cert in C.finiteness:
        block("finiteness", cert, chart=cert.chart,
              vars=cert.target.num_vars)
    for cert in C.etale_off_H:
        block("etale", cert, chart=cert.chart, vars=cert.target.num_vars,
              aux=cert.aux_index)
    if C.D_to_H is not None:
        lines.append(f"begin d-to-h vars={num_vars}")
        for c in C.D_to_H:
            lines.append(f"cof {c}")
        lines.append("end")
    lines.append("begin s-off-h")
    for P, val in C.S_off_H:
        lines.append(f"point {P}@{P.field.k} value {val}")
    lines.append("end")
    for i, cofs in C.local_memberships:
        lines.append(f"begin local index={i} vars={num_vars}")
        for c in cofs:
            lines.append(f"cof {c}")
        lines.append("end")
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> Certificate:
    lines = [ln.rstrip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "etale-cover certificate":
        raise ParseError("not a certificate file", line=1)
    header = {}
    idx = 1
    while idx < len(lines) and "=" in lines[idx] \
            and not lines[idx].startswith("begin"):
        if lines[idx].startswith("ledger "):
            header["ledger"] = lines[idx][len("ledger "):]
        else:
            key, _, value = lines[idx].partition("=")
            header[key.strip()] = value.strip()
        idx += 1
    try:
        p = int(header["p"])
        num_vars = int(header["num_vars"])
        led = {}
        for pair in header["ledger"].split():
            key, _, value = pair.partition("=")
            led[key] = int(value)
        ledger = DegreeLedger(p=p, e=led["e"], m=led["m"], r=led["r"],
                              l=led["l"])
        flatness = header["flatness"]
    except KeyError as exc:
        raise ParseError(f"certificate file missing {exc}")

    finiteness, etale, d_to_h, s_off_h, local = [], [], None, [], []
    while idx < len(lines):
        line = lines[idx]
        lineno = idx + 1
        if not line.startswith("begin "):
            raise ParseError(f"expected a begin block, got {line!r}",
                             line=lineno)
        head = line[len("begin "):].split()
        name, attrs = head[0], {}
        for pair in head[1:]:
            key, _, value = pair.partition("=")
            attrs[key] = int(value)
        idx += 1
        gens, cofs, points = [], [], []
        while idx < len(lines) and lines[idx] != "end":
            tag, _, rest = lines[idx].partition(" ")
            nv = attrs.get("vars", num_vars)
            if tag == "gen":
                gens.append(parse_form(rest, p, nv))
            elif tag == "cof":
                cofs.append(parse_form(rest, p, nv))
            elif tag == "point":
                ptext, _, vtext = rest.partition(" value ")
                body, _, ktext = ptext.strip().partition("@")
                field_ = make_extension(p, int(ktext))
                coords = tuple(parse_element(c, field_)
                               for c in body.strip("()").split(":"))
                points.append((ProjPoint(coords),
                               parse_element(vtext, field_)))
            else:
                raise ParseError(f"unknown certificate line {lines[idx]!r}",
                                 line=idx + 1)
            idx += 1
        if idx == len(lines):
            raise ParseError("unterminated certificate block", line=lineno)
        idx += 1  # past "end"
        if name in ("finiteness", "etale"):
            one = SparseForm.constant(p, attrs["vars"], 1)
            cert = NullstellensatzCert(gens, cofs, one,
                                       chart=attrs.get("chart"),
                                       aux_index=attrs.get("aux"))
            (finiteness if name == "finiteness" else etale).append(cert)
        elif name == "d-to-h":
            d_to_h = cofs
        elif name == "s-off-h":
            s_off_h = points
        elif name == "local":
            local.append((attrs["index"], cofs))
        else:
            raise ParseError(f"unknown certificate block {name!r}",
                             line=lineno)
    return Certificate(p=p, ledger=ledger, finiteness=finiteness,
                       etale_off_H=etale, D_to_H=d_to_h, S_off_H=s_off_h,
                       local_memberships=local, flatness_note=flatness)


def summarize(inst: InstanceFile, M: CoverMorphism, C: Certificate) -> str:
    led = M.ledger
    lines = ["etale-cover summary",
             "",
             "instance:",
             *("  " + ln for ln in print_instance(inst).splitlines()),
             "",
             f"degree ledger: p={led.p} e={led.e} m={led.m} r={led.r} "
             f"l={led.l} -> common degree {led.common_degree}",
             f"map: {len(M.u)} forms of degree {led.common_degree} "
             f"on the hypersurface {inst.F} = 0",
             "",
             "certificate:",
             f"  finiteness identities: {len(C.finiteness)} charts",
             f"  etaleness-off-H identities: {len(C.etale_off_H)} charts",
             f"  D-to-H cofactors: "
             + ("none (no divisor D)" if C.D_to_H is None
                else str(len(C.D_to_H))),
             f"  S-off-H records: {len(C.S_off_H)}",
             f"  local memberships: {len(C.local_memberships)}",
             f"  note: {C.flatness_note}"]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _config_from(args, overrides):
    return SectionSearchConfig(
        rng_seed=overrides.get("seed", args.seed),
        max_degree=overrides.get("max-degree", args.max_degree),
        base_degree_step=overrides.get("base-step", args.base_step),
        witness_depth=3)


def _construct_exit(exc):
    if isinstance(exc, (ParseError, ValidationError)):
        return EXIT_PARSE
    if isinstance(exc, DegreeCapExceeded):
        return EXIT_DEGREE_CAP
    if isinstance(exc, (ResourceBudgetExceeded, BudgetExceeded)):
        return EXIT_BUDGET
    if isinstance(exc, UnsupportedRequiresBlowup):
        return EXIT_UNSUPPORTED
    return None


def run_construct(args) -> int:
    try:
        inst = parse_instance(Path(args.instance).read_text())
        V = instance_to_variety(inst)
        cfg = _config_from(args, inst.overrides)
        if inst.mode == "local":
            local, C = build_local_cover(V, cfg)
            M = local.morphism
        else:
            M, C = build_etale_cover(V, cfg)
    except EtaleCoverError as exc:
        code = _construct_exit(exc)
        if code is None:
            raise
        print(f"error: {exc}", file=sys.stderr)
        return code
    stem = Path(args.instance).stem
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{stem}.morphism.txt").write_text(
        serialize_morphism(M, inst.num_vars))
    (out / f"{stem}.certificate.txt").write_text(
        serialize_certificate(C, inst.num_vars))
    (out / f"{stem}.summary.txt").write_text(summarize(inst, M, C))
    print(f"certified cover written to {out / stem}.{{morphism,certificate,"
          f"summary}}.txt")
    return EXIT_OK


def run_check(args) -> int:
    try:
        inst = parse_instance(Path(args.instance).read_text())
        V = instance_to_variety(inst)
        M = parse_morphism(Path(args.morphism).read_text())
        C = parse_certificate(Path(args.certificate).read_text())
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    result = check_certificate(C, M, V)
    if result.passed:
        print("certificate OK")
        return EXIT_OK
    print(f"certificate FAILED: {result.first_failure}", file=sys.stderr)
    return EXIT_CERT_FAIL


def run_oracle(args) -> int:
    try:
        inst = parse_instance(Path(args.instance).read_text())
        V = instance_to_variety(inst)
        M = parse_morphism(Path(args.morphism).read_text())
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        report = oracle_check(V, M, depth=args.depth)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    sys.stdout.write(format_report(report))
    return EXIT_OK if report.passed else EXIT_ORACLE


def run_validate(args) -> int:
    try:
        inst = parse_instance(Path(args.instance).read_text())
        instance_to_variety(inst)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    print("instance OK")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="etalecover",
        description="construct and verify finite covers of projective space "
                    "that are etale away from the hyperplane at infinity")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-degree", type=int, default=24)
    parser.add_argument("--base-step", type=int, default=1)
    parser.add_argument("--budget-spairs", type=int, default=200_000)
    sub = parser.add_subparsers(dest="command", required=True)

    p_con = sub.add_parser("construct", help="build and certify a cover")
    p_con.add_argument("instance")
    p_con.add_argument("--out-dir", default=".")
    p_con.set_defaults(func=run_construct)

    p_chk = sub.add_parser("check-cert", help="re-verify a certificate")
    p_chk.add_argument("instance")
    p_chk.add_argument("morphism")
    p_chk.add_argument("certificate")
    p_chk.set_defaults(func=run_check)

    p_orc = sub.add_parser("oracle", help="brute-force point oracle")
    p_orc.add_argument("instance")
    p_orc.add_argument("morphism")
    p_orc.add_argument("--depth", type=int, default=3)
    p_orc.set_defaults(func=run_oracle)

    p_val = sub.add_parser("validate", help="parse and validate an instance")
    p_val.add_argument("instance")
    p_val.set_defaults(func=run_validate)

    args = parser.parse_args(argv)
    ideal_module.DEFAULT_SPAIR_BUDGET = args.budget_spairs
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
