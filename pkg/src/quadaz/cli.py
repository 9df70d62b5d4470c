"""Command-line front end: `quadaz <group> <command> [options]`.

Exit codes: 0 verified result, 1 input or module error (first line names the
error), 2 unknown verdict or exhausted budget.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import linalg as la
from .clifford import center, degenerate_c0_iso, even_clifford, quaternionize
from .correspondence import (
    azumaya_from_form,
    dvr_isometry_decide,
    dvr_model,
    dvr_similarity_decide,
    form_from_azumaya,
    isotropy_rank4,
    local_global_certificate,
)
from .cubicbundle import (
    CubicContainingPlane,
    discriminant_sextic,
    extract_bundle,
    multiplicity_one_check,
    parse_cubic,
    simple_degeneration_locus_check,
)
from .errors import BudgetExhausted, CertificateIncomplete, QuadazError
from .fieldtower import QuadraticEtale, parse_element, parse_field, parse_valuation
from .quadform import (
    degeneration_report,
    diagonalize,
    eichler_decompose,
    eichler_maps,
    hyperbolic_conjugation_check,
    parse_form,
    parse_vector,
    reflection,
    transport,
)
from .quaternion import DEFAULT_BUDGET, QuaternionAlgebra, corestriction, is_split, residue_symbol


class Outcome:
    def __init__(self, lines, code=0):
        self.lines = list(lines)
        self.code = code


# ---------------------------------------------------------------------------
# helpers


def _field(args):
    return parse_field(args.field)


def _form(args, attr="form"):
    F = parse_field(args.field) if getattr(args, "field", None) else None
    return parse_form(getattr(args, attr), F)


def _valuations(F, text):
    return [parse_valuation(F, s) for s in text.split(",") if s.strip()] if text else []


def _matrix_lines(F, name, M):
    return [f"{name}: {la.fmt_matrix(F, M)}"]


# ---------------------------------------------------------------------------
# field


def cmd_field(args):
    F = _field(args)
    out = [f"field: {F.descriptor()}", f"depth: {F.depth}", f"finite: {'yes' if F.is_finite else 'no'}"]
    if args.element is not None:
        x = parse_element(F, args.element)
        out.append(f"element: {F.fmt(x)}")
        if args.at:
            v = parse_valuation(F, args.at)
            out.append(f"valuation-at-{v.name}: {v.val(x)}")
    return Outcome(out)


# ---------------------------------------------------------------------------
# form


def cmd_form_diag(args):
    q = _form(args)
    F = q.F
    dg = diagonalize(q)
    out = [f"form: {q.fmt()}", "diagonal: <" + ", ".join(F.fmt(a) for a in dg.values) + ">"]
    out += _matrix_lines(F, "basis", dg.basis)
    out.append("isometry: verified")
    return Outcome(out)


def cmd_form_report(args):
    q = _form(args)
    v = parse_valuation(q.F, args.at)
    return Outcome([f"form: {q.fmt()}"] + degeneration_report(q, v).lines())


def cmd_form_reflect(args):
    q = _form(args)
    x = parse_vector(q.F, args.vector)
    r = reflection(q, x)
    return Outcome([f"form: {q.fmt()}"] + _matrix_lines(q.F, "reflection", r.matrix) + ["isometry: verified"])


def cmd_form_transport(args):
    q = _form(args)
    F = q.F
    v, w = parse_vector(F, args.v), parse_vector(F, args.w)
    t = transport(q, v, w)
    out = [f"form: {q.fmt()}", f"reflections: {len(t.reflections)}"]
    for x in t.reflections:
        out.append("  r(" + ", ".join(F.fmt(c) for c in x) + ")")
    out += _matrix_lines(F, "isometry", t.isometry.matrix)
    image = t.isometry.apply(v)
    out.append("maps-v-to-w: " + ("yes" if tuple(image) == tuple(w) else "no"))
    return Outcome(out, 0 if tuple(image) == tuple(w) else 1)


def cmd_form_eichler(args):
    q = _form(args)
    F = q.F
    v = parse_vector(F, args.vector)
    E, Es = eichler_maps(q, v)
    out = [f"form: {q.fmt()} + h"]
    out += _matrix_lines(F, "E", E.matrix)
    out += _matrix_lines(F, "E*", Es.matrix)
    ok = E.holds() and Es.holds()
    if args.u is not None:
        u = parse_element(F, args.u)
        conj = hyperbolic_conjugation_check(q, v, u)
        out.append(f"conjugation-identities: {'pass' if conj else 'fail'}")
        ok = ok and conj
    dec = eichler_decompose(E.compose(Es), q)
    out.append("decomposition of E.E*: " + " ".join(g.fmt(F) for g in dec.generators + (dec.tail,)))
    ok = ok and dec.product(q) == E.compose(Es).matrix
    out.append(f"verified: {'yes' if ok else 'no'}")
    return Outcome(out, 0 if ok else 1)


# ---------------------------------------------------------------------------
# clif


def cmd_clif_c0(args):
    C = even_clifford(_form(args))
    ok = C.check_relations()
    return Outcome([f"dimension: {len(C.alg.basis)}"] + C.dump() + [f"relations: {'pass' if ok else 'fail'}"])


def cmd_clif_center(args):
    C = even_clifford(_form(args))
    return Outcome(center(C).lines(C))


def cmd_clif_quaternionize(args):
    C = even_clifford(_form(args))
    qz = quaternionize(C)
    return Outcome(qz.lines(C), 0 if qz.verified else 1)


def cmd_clif_dual_iso(args):
    iso = degenerate_c0_iso(_field(args))
    return Outcome(iso.lines(), 0 if iso.verified else 1)


# ---------------------------------------------------------------------------
# quat


def _algebra(args):
    L = _field(args)
    return QuaternionAlgebra.make(L, parse_element(L, args.a), parse_element(L, args.b))


def cmd_quat_split(args):
    Q = _algebra(args)
    cert = is_split(Q, args.budget, valuations=tuple(_valuations(Q.L, args.at)))
    return Outcome(cert.lines(Q), 2 if cert.verdict == "unknown" else 0)


def cmd_quat_residue(args):
    Q = _algebra(args)
    v = parse_valuation(Q.L, args.at)
    r = residue_symbol(Q, v)
    kap = v.residue_field
    trivial = kap.is_square(r)
    return Outcome(
        [
            f"algebra: {Q.fmt()}",
            f"valuation: {v.kind}({v.name})",
            f"residue-class: {kap.fmt(r)}",
            f"ramified: {'no' if trivial else 'yes'}",
        ]
    )


def cmd_quat_cores(args):
    Q = _algebra(args)
    if not isinstance(Q.L, QuadraticEtale):
        raise QuadazError("corestriction needs an Ext:<base>:<d> field")
    C = corestriction(Q)
    return Outcome([f"algebra: {Q.fmt()}", f"corestriction: {C.fmt()}"])


# ---------------------------------------------------------------------------
# corr


def cmd_corr_c0(args):
    res = azumaya_from_form(_form(args))
    return Outcome(res.record.lines(), 0 if res.record.verified else 1)


def cmd_corr_normform(args):
    K = _field(args)
    rec = form_from_azumaya(K, parse_element(K, args.a), parse_element(K, args.b), parse_element(K, args.d))
    return Outcome(rec.lines(), 0 if rec.verified else 2)


def cmd_corr_isotropy(args):
    q = _form(args)
    res = isotropy_rank4(q, args.budget)
    return Outcome(res.lines(q), 2 if res.verdict == "unknown" else 0)


def cmd_corr_dvr_model(args):
    q = _form(args)
    m = dvr_model(q, parse_valuation(q.F, args.at))
    return Outcome(m.lines())


def cmd_corr_decide(args):
    q1 = _form(args)
    q2 = _form(args, "form2")
    v = parse_valuation(q1.F, args.at)
    iso = dvr_isometry_decide(q1, q2, v)
    sim = dvr_similarity_decide(q1, q2, v)
    return Outcome(iso.lines() + sim.lines(q1.F))


def cmd_corr_certify(args):
    K = _field(args)
    a, b, d = (parse_element(K, x) for x in (args.a, args.b, args.d))
    cert = local_global_certificate(K, a, b, d, _valuations(K, args.at), args.budget)
    code = 0 if cert.status == "complete" else 2
    return Outcome(cert.lines(), code)


# ---------------------------------------------------------------------------
# cubic


def _bundle(args):
    F = _field(args)
    return extract_bundle(CubicContainingPlane(F, parse_cubic(F, args.cubic)))


def cmd_cubic_extract(args):
    Bf = _bundle(args)
    return Outcome(Bf.lines() + ["reassembly: verified"])


def cmd_cubic_disc(args):
    D = discriminant_sextic(_bundle(args))
    return Outcome([f"discriminant: {D.fmt()}", f"degree: {D.degree()}"])


def cmd_cubic_check(args):
    Bf = _bundle(args)
    D = discriminant_sextic(Bf)
    m = multiplicity_one_check(Bf)
    s = simple_degeneration_locus_check(Bf)
    return Outcome([f"discriminant: {D.fmt()}"] + m.lines("multiplicity-one") + s.lines("simple-degeneration"))


# ---------------------------------------------------------------------------
# parser


def _globals(parser, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--budget", type=int, default=d(DEFAULT_BUDGET), help="search budget")
    parser.add_argument("--seed", type=int, default=d(0), help="random seed")
    parser.add_argument("--json", action="store_true", default=d(False), help="JSON mirror of the report")


def build_parser():
    p = argparse.ArgumentParser(prog="quadaz", description="Quadratic forms and quaternion Azumaya algebras")
    _globals(p, False)
    groups = p.add_subparsers(dest="group", required=True)

    def leaf(sub, name, fn, *opts):
        sp = sub.add_parser(name)
        _globals(sp, True)
        for o in opts:
            flag, kw = o if isinstance(o, tuple) else (o, {})
            sp.add_argument(flag, **({"required": True} | kw))
        sp.set_defaults(fn=fn)
        return sp

    opt = {"required": False, "default": None}

    leaf(groups, "field", cmd_field, "--field", ("--element", opt), ("--at", opt))

    form = groups.add_parser("form").add_subparsers(dest="cmd", required=True)
    fld = ("--field", opt)
    leaf(form, "diag", cmd_form_diag, "--form", fld)
    leaf(form, "report", cmd_form_report, "--form", fld, "--at")
    leaf(form, "reflect", cmd_form_reflect, "--form", fld, "--vector")
    leaf(form, "transport", cmd_form_transport, "--form", fld, "--v", "--w")
    leaf(form, "eichler", cmd_form_eichler, "--form", fld, "--vector", ("--u", opt))

    clif = groups.add_parser("clif").add_subparsers(dest="cmd", required=True)
    leaf(clif, "c0", cmd_clif_c0, "--form", fld)
    leaf(clif, "center", cmd_clif_center, "--form", fld)
    leaf(clif, "quaternionize", cmd_clif_quaternionize, "--form", fld)
    leaf(clif, "dual-iso", cmd_clif_dual_iso, "--field")

    quat = groups.add_parser("quat").add_subparsers(dest="cmd", required=True)
    leaf(quat, "split", cmd_quat_split, "--field", "--a", "--b", ("--at", opt))
    leaf(quat, "residue", cmd_quat_residue, "--field", "--a", "--b", "--at")
    leaf(quat, "cores", cmd_quat_cores, "--field", "--a", "--b")

    corr = groups.add_parser("corr").add_subparsers(dest="cmd", required=True)
    leaf(corr, "c0", cmd_corr_c0, "--form", fld)
    leaf(corr, "normform", cmd_corr_normform, "--field", "--a", "--b", "--d")
    leaf(corr, "isotropy", cmd_corr_isotropy, "--form", fld)
    leaf(corr, "dvr-model", cmd_corr_dvr_model, "--form", fld, "--at")
    leaf(corr, "decide", cmd_corr_decide, "--form", "--form2", fld, "--at")
    leaf(corr, "certify", cmd_corr_certify, "--field", "--a", "--b", "--d", "--at")

    cubic = groups.add_parser("cubic").add_subparsers(dest="cmd", required=True)
    leaf(cubic, "extract", cmd_cubic_extract, "--field", "--cubic")
    leaf(cubic, "disc", cmd_cubic_disc, "--field", "--cubic")
    leaf(cubic, "check", cmd_cubic_check, "--field", "--cubic")
    return p


def run(argv):
    """Run one invocation; returns (exit code, report text)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (1 if exc.code else 0), ""
    random.seed(args.seed)
    command = " ".join(x for x in (args.group, getattr(args, "cmd", None)) if x)
    try:
        res = args.fn(args)
    except (BudgetExhausted, CertificateIncomplete) as exc:
        res = Outcome([f"error: {type(exc).__name__}: {exc}"], 2)
    except QuadazError as exc:
        res = Outcome([f"error: {type(exc).__name__}: {exc}"], 1)
    except (ValueError, ZeroDivisionError) as exc:
        res = Outcome([f"error: {type(exc).__name__}: {exc}"], 1)
    if args.json:
        text = json.dumps({"command": command, "exit": res.code, "report": res.lines}, indent=2)
    else:
        text = "\n".join(res.lines)
    return res.code, text


def main(argv=None):
    code, text = run(sys.argv[1:] if argv is None else argv)
    if text:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
