"""Command-line front end: ``wforge gen | verify | compare | families``.

Exit codes: 0 success, 1 a verification check failed, 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import checks, degree5, mesh
from .algebra import ComplexPoly, ExactComplex, RationalFunction, parse_poly
from .errors import WforgeError
from .families import CATALOG, KINDS, PARAM_NAMES, FamilyDescriptor, canonical_kind, parse_param, symmetry_transform
from .geometry import branch_points
from .weierstrass import validate_pair

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# options whose values may start with "-" (e.g. "--range -2,2")
_VALUE_OPTIONS = ("--range", "--region", "--params", "--omega", "--z0", "--f", "--g")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# argument helpers


def _glue_negative_values(argv: list[str]) -> list[str]:
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTIONS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def parse_floats(text: str, count: int | None = None) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise UsageError(f"expected {count} numbers, got {text!r}")
    return vals


def parse_region(args) -> tuple[float, float, float, float]:
    if getattr(args, "region", None):
        u0, u1, v0, v1 = parse_floats(args.region, 4)
    else:
        lo, hi = parse_floats(args.range, 2)
        u0, u1, v0, v1 = lo, hi, lo, hi
    if not (u1 > u0 and v1 > v0):
        raise UsageError(f"empty region {(u0, u1, v0, v1)}")
    return u0, u1, v0, v1


def parse_tol_overrides(items) -> dict[str, float]:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects NAME=VALUE, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise UsageError(f"--tol {name}: not a number: {value!r}") from None
    return out


def _to_exact(c) -> ExactComplex:
    import sympy

    re, im = sympy.nsimplify(c).as_real_imag()
    if not (re.is_Rational and im.is_Rational):
        raise UsageError(f"coefficient {c} is not a Gaussian rational")
    return ExactComplex(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


def _sympy_function(text: str) -> RationalFunction:
    import sympy

    z = sympy.Symbol("z")
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals={"z": z, "i": sympy.I, "I": sympy.I})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}") from None
    if expr.free_symbols - {z}:
        raise UsageError(f"{text!r} may only depend on z")
    num, den = sympy.fraction(sympy.together(expr))
    try:
        pn, pd = sympy.Poly(num, z), sympy.Poly(den, z)
    except sympy.PolynomialError:
        raise UsageError(f"{text!r} is not a rational function of z") from None

    def conv(p):
        return ComplexPoly([_to_exact(c) for c in reversed(p.all_coeffs())])

    return RationalFunction(conv(pn), conv(pd))


def parse_function(text: str) -> RationalFunction:
    """``poly[...]``, ``poly[...]/poly[...]`` or an expression in z such as ``(z^2+1)/z``."""
    s = text.strip()
    if s.startswith("poly["):
        num, sep, den = s.partition("]/")
        if sep:
            return RationalFunction(parse_poly(num + "]"), parse_poly(den))
        return RationalFunction(parse_poly(s))
    return _sympy_function(s)


def parse_family(kind: str, params_text: str | None, n=None, omega=None) -> FamilyDescriptor:
    kind = canonical_kind(kind)
    if kind == "XuWangOmega" and params_text is None:
        if n is None or omega is None:
            raise UsageError("family xw needs --n and --omega (or --params n,omega)")
        return FamilyDescriptor(kind, {"n": int(n), "omega": float(omega)})
    values = [parse_param(t.strip()) for t in params_text.split(",")] if params_text else []
    if kind == "XuWangOmega":
        if len(values) != 2:
            raise UsageError("family xw takes parameters n,omega")
        n_val = complex(values[0]).real
        if n_val != int(n_val):
            raise UsageError(f"n must be an integer, got {n_val}")
        return FamilyDescriptor(kind, {"n": int(n_val), "omega": complex(values[1]).real})
    if kind == "XuWangDeg5":
        values = [complex(v).real for v in values]
    return FamilyDescriptor.from_values(kind, values)


def subject_from_args(args) -> checks.Subject:
    if getattr(args, "coeffs", None):
        with open(args.coeffs) as fh:
            data = json.load(fh)
        cv = degree5.CoeffVectors5.from_mapping(data)
        return checks.Subject(label=os.path.basename(args.coeffs), coeffs=cv)
    if args.family:
        return checks.family_subject(parse_family(args.family, args.params, args.n, args.omega))
    if args.f is not None and args.g is not None:
        f = parse_function(args.f)
        if not f.is_polynomial():
            raise UsageError("f must be a polynomial")
        g = parse_function(args.g)
        pair = validate_pair(f.numerator, g)
        return checks.Subject(label=f"f={args.f}; g={args.g}", pair=pair)
    raise UsageError("give --family, both --f and --g, or --coeffs")


def subject_from_spec(spec: str) -> checks.Subject:
    """Compare operand: ``r12:1,0,1,1``, ``r12[1,0,1,1]``, ``enneper``,
    ``f=<text>;g=<text>`` or ``sym:<spec>`` (the symmetry transform of an exact pair)."""
    s = spec.strip()
    if s.startswith("sym:"):
        inner = subject_from_spec(s[4:])
        if not inner.exact:
            raise UsageError("sym: needs an exact pair")
        return checks.Subject(label=f"sym({inner.label})", pair=symmetry_transform(inner.pair))
    if s.startswith("f="):
        ftxt, sep, gtxt = s[2:].partition(";")
        if not sep or not gtxt.strip().startswith("g="):
            raise UsageError(f"expected 'f=...;g=...', got {spec!r}")
        ns = argparse.Namespace(coeffs=None, family=None, f=ftxt, g=gtxt.strip()[2:])
        return subject_from_args(ns)
    if "[" in s and s.endswith("]"):
        kind, _, params = s[:-1].partition("[")
    else:
        kind, _, params = s.partition(":")
    return checks.family_subject(parse_family(kind.strip(), params or None))


# ---------------------------------------------------------------------------
# output


def _clean(obj):
    """JSON-safe copy: NaN/inf become null, numpy scalars become Python numbers."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dump_json(obj, stream=None) -> str:
    text = json.dumps(_clean(obj), indent=2, ensure_ascii=False)
    if stream is not None:
        stream.write(text + "\n")
    return text


def _fmt(x) -> str:
    return "-" if x is None else f"{x:.3g}"


def print_verify_report(report: dict, out) -> None:
    subj = report["subject"]
    out.write(f"subject: {subj['label']}\n")
    if "structure" in subj:
        s = subj["structure"]
        out.write(f"structure: p={s['p']} q={s['q']} r={s['r']} n={s['n']}\n")
    if subj.get("cases"):
        out.write(f"cases: {', '.join(subj['cases'])}\n")
    for note in subj.get("notes", []):
        out.write(f"note: {note}\n")
    for c in report["checks"]:
        line = f"  {c['status'].upper():7s} {c['name']:16s} residual={_fmt(c['max_residual'])}"
        if c["skipped"]:
            line += f" skipped_points={c['skipped']}"
        msg = c["detail"].get("message") or c["detail"].get("reason")
        if msg:
            line += f"  ({msg})"
        out.write(line + "\n")
    out.write("PASS\n" if report["passed"] else f"FAIL: {', '.join(report['failed'])}\n")


# ---------------------------------------------------------------------------
# commands


def cmd_families(args, out) -> int:
    if args.json:
        dump_json({k: {"params": list(PARAM_NAMES[k]), "form": CATALOG[k]} for k in KINDS}, out)
    else:
        for k in KINDS:
            out.write(f"{k:12s} [{', '.join(PARAM_NAMES[k])}]  {CATALOG[k]}\n")
    return EXIT_OK


def cmd_gen(args, out) -> int:
    subj = subject_from_args(args)
    if subj.pair is None:
        raise UsageError("gen needs a family or an (f, g) pair")
    region = parse_region(args)
    res = args.res
    grid = mesh.sample(subj.surface, region, (res, res))
    name = subj.descriptor.kind if subj.descriptor is not None else "pair"
    params = list(subj.descriptor.to_json()["params"].values()) if subj.descriptor is not None else []
    os.makedirs(args.out, exist_ok=True)
    base = os.path.join(args.out, mesh.mesh_filename(name, params, res))
    written = []
    if args.format in ("obj", "both"):
        written.append(mesh.export(grid, base, "obj"))
    if args.format in ("csv", "both"):
        written.append(mesh.export(grid, base[:-4] + ".csv", "csv"))
    u0, u1, v0, v1 = region
    zs = branch_points(subj.pair)
    inside = [complex(z) for z in zs if u0 <= z.real <= u1 and v0 <= z.imag <= v1]
    summary = {
        "subject": checks.subject_summary(subj),
        "region": list(region),
        "resolution": [res, res],
        "vertices": grid.vertex_count,
        "faces": int(len(grid.faces)),
        "singular_vertices": int(grid.singular.sum()),
        "branch_points_in_region": [[z.real, z.imag] for z in inside],
        "files": written,
    }
    if args.json:
        dump_json(summary, out)
    else:
        s = summary["subject"]
        out.write(f"surface: {s['label']}\n")
        out.write(f"degree: {s['degree']}\n")
        if "structure" in s:
            st = s["structure"]
            out.write(f"structure: p={st['p']} q={st['q']} r={st['r']} n={st['n']}\n")
        out.write(f"singular points: {len(inside)} (vertices flagged: {summary['singular_vertices']})\n")
        out.write(f"mesh: {summary['vertices']} vertices, {summary['faces']} triangles\n")
        for path in written:
            out.write(f"wrote {path}\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    subj = subject_from_args(args)
    tol = checks.tolerances(parse_tol_overrides(args.tol))
    z0 = complex(args.z0.replace("i", "j")) if args.z0 else None
    report = checks.run_verification(subj, tol, parse_region(args), args.grid, chart=not args.no_chart, z0=z0)
    if args.report:
        with open(args.report, "w") as fh:
            dump_json(report, fh)
    if args.json:
        dump_json(report, out)
    else:
        print_verify_report(report, out)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_compare(args, out) -> int:
    a, b = subject_from_spec(args.a), subject_from_spec(args.b)
    report = checks.compare_subjects(a, b)
    if args.json:
        dump_json(report, out)
    else:
        out.write(f"a: {report['a']['label']}\nb: {report['b']['label']}\n")
        if "reduced_pair" in report:
            rp = report["reduced_pair"]
            out.write(f"reduced pair: f = {rp['f']}, g = {rp['g']}  ({rp['r3']})\n")
        fp = report["energy_fingerprint"]
        if fp.get("max_rel_diff") is not None:
            out.write(f"canonical-energy fingerprint: max rel diff {fp['max_rel_diff']:.3g}"
                      f" ({'match' if fp['match'] else 'differ'})\n")
        out.write(report["summary"] + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_subject_options(p: argparse.ArgumentParser, coeffs: bool = False) -> None:
    p.add_argument("--family", help="family name: r11, r12, r3, enneper, xw5, xw")
    p.add_argument("--params", help="comma-separated parameters, e.g. 1,0,1,1 or 1/3,2i")
    p.add_argument("--n", type=int, help="degree n for the xw family")
    p.add_argument("--omega", type=float, help="omega for the xw family")
    p.add_argument("--f", help="f as poly[(re,im),...] or an expression in z")
    p.add_argument("--g", help="g as poly[...], poly[...]/poly[...] or an expression in z")
    if coeffs:
        p.add_argument("--coeffs", help="JSON file with coefficient vectors a..k")
    p.add_argument("--range", default="-1,1", help="square region lo,hi (default -1,1)")
    p.add_argument("--region", help="rectangle u0,u1,v0,v1 (overrides --range)")
    p.add_argument("--json", action="store_true", help="print JSON instead of text")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wforge", description="Polynomial minimal surfaces from Weierstrass data.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("families", help="list the family catalog")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_families)

    p = sub.add_parser("gen", help="sample a surface and write OBJ/CSV")
    _add_subject_options(p)
    p.add_argument("--res", type=int, default=41, help="grid points per axis")
    p.add_argument("--format", choices=("obj", "csv", "both"), default="obj")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="run the verification checks")
    _add_subject_options(p, coeffs=True)
    p.add_argument("--grid", type=int, default=41, help="minimality scan grid size")
    p.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance")
    p.add_argument("--z0", help="centre of the canonical chart in the z-plane")
    p.add_argument("--no-chart", action="store_true", help="skip the canonical chart checks")
    p.add_argument("--report", help="also write the JSON report to this path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="decide whether two surfaces coincide")
    p.add_argument("a", help="e.g. r12:1,0,1,1, r3[1,1,0], 'f=z^2;g=z' or sym:r11:1,0")
    p.add_argument("b")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_glue_negative_values(argv))
        if getattr(args, "res", 2) < 2:
            raise UsageError("--res must be at least 2")
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except (WforgeError, ValueError, ZeroDivisionError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"wforge: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
