"""Command-line entry point: ``permpoly <command> [options]``.

Exit codes: 0 success, 1 a verification mismatch (witnesses are printed),
2 a usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import __version__
from .construct import assemble_f, construct_h
from .errors import PermPolyError, VerdictMismatch
from .families import FAMILIES, family_build
from .ff_core import FieldCtx, read_modulus_file
from .poly import LaurentPoly, parse_laurent


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# output

class Emitter:
    """Collects records and writes them as JSON lines, CSV or plain text."""

    def __init__(self, fmt: str, out, header: dict):
        self.fmt = fmt
        self.out = out
        self.header = header

    def record(self, rec: dict, text: str | None = None):
        if self.fmt == "json":
            self.out.write(json.dumps({**self.header, **rec}, sort_keys=True, default=_jsonable) + "\n")
        elif self.fmt == "csv":
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=list(rec), lineterminator="\n", extrasaction="ignore")
            w.writerow({k: _flat(v) for k, v in rec.items()})
            self.out.write(buf.getvalue())
        else:
            self.out.write((text if text is not None else _text_line(rec)) + "\n")

    def csv_header(self, fields):
        if self.fmt == "csv":
            self.out.write(",".join(fields) + "\n")


def _jsonable(v):
    if hasattr(v, "item"):
        return v.item()
    if hasattr(v, "to_dict"):
        return v.to_dict()
    return str(v)


def _flat(v):
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(v, default=_jsonable, sort_keys=True)
    return v


def _text_line(rec: dict) -> str:
    return " ".join(f"{k}={_flat(v)}" for k, v in rec.items())


def format_element(ctx, c: int, pretty: bool) -> str:
    """Integer encoding, or the polynomial-basis form (in t) with --pretty."""
    if not pretty or c < ctx.p:
        return str(c)
    digits = ctx.mid.coeffs(c)
    parts = []
    for i in range(len(digits) - 1, -1, -1):
        d = digits[i]
        if not d:
            continue
        mono = "1" if i == 0 else ("t" if i == 1 else f"t^{i}")
        parts.append(mono if d == 1 and i else (str(d) if i == 0 else f"{d}*{mono}"))
    return parts[0] if len(parts) == 1 else "(" + "+".join(parts) + ")"


def format_poly(ctx, L: LaurentPoly, symbol: str, pretty: bool) -> str:
    if not pretty:
        return L.pretty(symbol)
    terms = {e: format_element(ctx, c, True) for e, c in L.terms.items()}
    shown = LaurentPoly(ctx, {e: 1 for e in L.terms}).pretty(symbol).split("+")
    out = []
    for (e, c), s in zip(reversed(L.terms.items()), shown):
        if c == 1:
            out.append(s)
        elif e == 0:
            out.append(terms[e])
        else:
            out.append(f"{terms[e]}*{s}")
    return "+".join(out)


# ---------------------------------------------------------------------------
# field setup

def load_modulus(path: str | None):
    """Modulus file lines ``mid: c0 c1 ... 1`` and/or ``top: c0 c1 1`` (see read_modulus_file)."""
    if path is None:
        return None, None
    try:
        data = read_modulus_file(path)
    except (OSError, ValueError) as exc:
        raise UsageError(f"--modulus: cannot read {path}: {exc}") from exc
    return data.get("mid"), data.get("top")


def make_ctx(args, p=None, k=None) -> FieldCtx:
    p = args.p if p is None else p
    k = args.k if k is None else k
    if p is None or k is None:
        raise UsageError("--p and --k are required")
    mid, top = load_modulus(getattr(args, "modulus", None))
    try:
        return FieldCtx(p, k, mid, top)
    except PermPolyError as exc:
        raise UsageError(f"--p/--k/--modulus: {exc}") from exc


def header(args, ctx=None) -> dict:
    h = {"version": __version__, "command": args.command}
    if ctx is not None:
        h["field"] = ctx.describe()
    if getattr(args, "seed", None) is not None:
        h["seed"] = args.seed
    return h


def _parse_h(ctx, text, flag="--h"):
    try:
        return parse_laurent(ctx, text, "x")
    except (ValueError, PermPolyError) as exc:
        raise UsageError(f"{flag}: {exc}") from exc


# ---------------------------------------------------------------------------
# commands

def cmd_verify(args, out) -> int:
    from .criterion import check_conditions
    ctx = make_ctx(args)
    if args.h is None:
        raise UsageError("--h is required")
    h = _parse_h(ctx, args.h)
    rep = check_conditions(ctx, h, args.r, run_oracle=args.oracle)
    em = Emitter(args.format, out, header(args, ctx))
    rec = {"p": ctx.p, "k": ctx.k, "h": format_poly(ctx, h, "x", args.pretty), "r": args.r,
           **rep.to_dict(), "permutes": rep.conditions_ok, "consistent": rep.consistent}
    if args.format == "text":
        lines = [f"h = {rec['h']}, r = {args.r} over F_{ctx.q}^2"]
        for key in ("gcd_ok", "g_fixed_ok", "h_nonzero_ok", "r_permutes_ok"):
            lines.append(f"  {key}: {rec[key]}")
        if args.oracle:
            lines.append(f"  oracle: {rep.oracle_verdict}")
        lines.append(f"  permutes: {rep.conditions_ok}")
        if rep.witnesses:
            lines.append(f"  witnesses: {json.dumps(rep.witnesses)}")
        em.record(rec, "\n".join(lines))
    else:
        em.record(rec)
    if not rep.consistent:
        print(f"conditions and oracle disagree: {rep.to_dict()}", file=sys.stderr)
        return 1
    return 0 if rep.conditions_ok else 1


def cmd_reduce(args, out) -> int:
    from .reduce import reduce_h
    ctx = make_ctx(args)
    if args.h is None:
        raise UsageError("--h is required")
    pair = reduce_h(ctx, _parse_h(ctx, args.h))
    h1 = format_poly(ctx, pair.h1.to_laurent(), "a", args.pretty)
    h2 = format_poly(ctx, pair.h2.to_laurent(), "a", args.pretty)
    em = Emitter(args.format, out, header(args, ctx))
    em.record({"h1": h1, "h2": h2}, f"h1 = {h1}, h2 = {h2}")
    return 0


def cmd_construct(args, out) -> int:
    ctx = make_ctx(args)
    if args.h1 is None or args.h2 is None:
        raise UsageError("--h1 and --h2 are required")
    try:
        h1 = parse_laurent(ctx, args.h1, "a")
        h2 = parse_laurent(ctx, args.h2, "a")
    except (ValueError, PermPolyError) as exc:
        raise UsageError(f"--h1/--h2: {exc}") from exc
    h = construct_h(ctx, h1, h2, paper_form=args.paper_form)
    af = assemble_f(ctx, h, args.r)
    rec = {"h": format_poly(ctx, h, "x", args.pretty), "r": args.r, "f": af.to_dict()}
    text = f"h(x) = {rec['h']}\nf(x) = {af.to_text()}"
    if af.doubled:
        text += "  (doubled: f(x^2) shown)"
    if args.oracle:
        from .oracle import check_f_permutes
        rec["oracle"] = check_f_permutes(ctx, af).is_permutation
        text += f"\noracle: {rec['oracle']}"
    Emitter(args.format, out, header(args, ctx)).record(rec, text)
    return 0


def _parse_params(items) -> dict:
    params = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--param: expected key=value, got {item!r}")
        key, val = item.split("=", 1)
        try:
            params[key] = json.loads(val)
        except ValueError:
            params[key] = val
    return params


def cmd_family(args, out) -> int:
    if args.name not in FAMILIES:
        raise UsageError(f"--name: unknown family {args.name!r}; choose from {', '.join(FAMILIES)}")
    ctx = make_ctx(args)
    params = _parse_params(args.param)
    h, r, predicted = family_build(ctx, args.name, params)
    af = assemble_f(ctx, h, r)
    rec = {"family": args.name, "params": params, "predicted": predicted, "f": af.to_dict()}
    text = f"{args.name} {params}: predicted={predicted}\nf(x) = {af.to_text()}"
    code = 0
    if args.oracle:
        from .oracle import check_f_permutes
        verdict = check_f_permutes(ctx, af).is_permutation
        rec["oracle"] = verdict
        text += f"\noracle: {verdict}"
        if verdict != predicted:
            code = 1
    Emitter(args.format, out, header(args, ctx)).record(rec, text)
    return code


def cmd_reproduce_tables(args, out) -> int:
    from .search import search_tables
    if args.p is None:
        raise UsageError("--p is required")
    kmin = args.kmin if args.kmin is not None else (3 if args.p == 2 else 2)
    kmax = args.kmax if args.kmax is not None else kmin
    if kmin < 1 or kmax < kmin:
        raise UsageError("--kmin/--kmax: need 1 <= kmin <= kmax")
    results = search_tables(args.p, kmin, kmax, jobs=args.jobs, include_frobenius=args.include_frobenius)
    fmt = args.format if args.format != "text" else "csv"
    if fmt == "csv":
        out.write("p,k,s\n")
        for res in results:
            for row in res.csv_rows():
                out.write(row + "\n")
    else:
        em = Emitter("json", out, header(args))
        for res in results:
            ctx = make_ctx(args, res.p, res.k)
            em.header = header(args, ctx)
            em.record({"p": res.p, "k": res.k, "hits": res.hits, "excluded": res.excluded})
    if args.plot:
        from .plotting import plot_tables
        plot_tables(results, args.plot)
        print(f"figure written to {args.plot}", file=sys.stderr)
    return 0


def cmd_verify_known(args, out) -> int:
    from .search import KNOWN_TRINOMIALS, verify_known_record
    kmin = args.kmin if args.kmin is not None else (args.k or 1)
    kmax = args.kmax if args.kmax is not None else (args.k or 10)
    em = Emitter(args.format, out, header(args))
    em.csv_header(["row", "k", "condition", "applies", "g_permutes_mu", "criterion_route",
                   "printed_L_permutes_T", "verdict"])
    code = 0
    for k in range(kmin, kmax + 1):
        ctx = make_ctx(args, 2, k)
        em.header = header(args, ctx)
        for entry in KNOWN_TRINOMIALS:
            try:
                rec = verify_known_record(ctx, entry)
            except VerdictMismatch as exc:
                rec = {"row": entry.name, "k": k, "mismatch": str(exc)}
                code = 1
            if args.format == "csv":
                rec = {f: rec.get(f, "") for f in ["row", "k", "condition", "applies", "g_permutes_mu",
                                                     "criterion_route", "printed_L_permutes_T", "verdict"]}
            em.record(rec)
    return code


def cmd_verify_families(args, out) -> int:
    from .search import verify_family_sweep
    names = args.family or list(FAMILIES)
    for n in names:
        if n not in FAMILIES:
            raise UsageError(f"--family: unknown family {n!r}")
    em = Emitter(args.format, out, header(args))
    em.csv_header(["family", "p", "k", "params", "predicted", "oracle", "agree", "level"])
    reports = []
    code = 0
    for name in names:
        rep = verify_family_sweep(name, args.max_q2, budget=args.budget, seed=args.seed, jobs=args.jobs,
                                  odd_prime_limit=args.odd_prime_limit, L_level_k=tuple(args.L_level_k))
        reports.append(rep)
        for rec in rep.records:
            row = {"family": name, **{k: rec[k] for k in ("p", "k", "params", "predicted", "oracle",
                                                           "agree", "level")}}
            if args.format == "text" and not args.all_records:
                continue
            em.record(row)
        if args.format == "text":
            out.write(f"{name}: {rep.agree}/{rep.checked} agree, {rep.predicted_true} predicted true, "
                      f"{len(rep.mismatches)} mismatches\n")
            for m in rep.mismatches[:5]:
                out.write(f"  mismatch: p={m['p']} k={m['k']} params={m['params']} "
                          f"predicted={m['predicted']} oracle={m['oracle']}\n")
        if rep.mismatches:
            code = 1
    if args.plot:
        from .plotting import plot_family_sweeps
        plot_family_sweeps(reports, args.plot)
        print(f"figure written to {args.plot}", file=sys.stderr)
    return code


def cmd_search(args, out) -> int:
    from .search import classify_linearized, search_monomial_even, search_monomial_odd
    ctx = make_ctx(args)
    em = Emitter(args.format, out, header(args, ctx))
    if args.kind == "monomial":
        if ctx.p == 2:
            res = search_monomial_even(ctx, args.include_frobenius, args.jobs)
        else:
            res = search_monomial_odd(ctx, args.jobs)
        if args.format == "csv":
            out.write("p,k,s\n")
            for row in res.csv_rows():
                out.write(row + "\n")
        else:
            em.record({"p": res.p, "k": res.k, "hits": res.hits, "excluded": res.excluded},
                      f"p={res.p} k={res.k} hits={res.hits} ({res.excluded})")
        return 0
    if ctx.p != 2:
        raise UsageError("--kind linearized needs --p 2")
    t = args.t if args.t is not None else ctx.k - 1
    if not 0 <= t <= ctx.k - 1:
        raise UsageError("--t: need 0 <= t <= k-1")
    rep = classify_linearized(ctx, t, seed=args.seed)
    em.record(rep.to_dict())
    return 1 if rep.mismatches else 0


COMMANDS = {
    "verify": cmd_verify,
    "reduce": cmd_reduce,
    "construct": cmd_construct,
    "family": cmd_family,
    "reproduce-tables": cmd_reproduce_tables,
    "verify-known": cmd_verify_known,
    "verify-families": cmd_verify_families,
    "search": cmd_search,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--p", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--modulus", help="file with 'mid: c0 c1 ... 1' and/or 'top: c0 c1 1' lines")
    common.add_argument("--format", choices=["json", "csv", "text"], default="text")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--pretty", action="store_true", help="print field elements in polynomial-basis form")

    parser = _Parser(prog="permpoly", description="Permutation polynomials of the form x^r h(x^(q-1)).")
    parser.add_argument("--version", action="version", version=f"permpoly {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("verify", parents=[common], help="check the criterion for f = x^r h(x^(q-1))")
    s.add_argument("--h", required=False)
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--oracle", action="store_true", help="also brute-force f over F_{q^2}")

    s = sub.add_parser("reduce", parents=[common], help="reduce h(x) to (h1(a), h2(a))")
    s.add_argument("--h")

    s = sub.add_parser("construct", parents=[common], help="build h(x) and f from (h1(a), h2(a))")
    s.add_argument("--h1")
    s.add_argument("--h2")
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--paper-form", action="store_true", help="keep half exponents in h (char 2)")
    s.add_argument("--oracle", action="store_true")

    s = sub.add_parser("family", parents=[common], help="one member of a named family")
    s.add_argument("--name", required=False, default=None)
    s.add_argument("--param", action="append", help="key=value (JSON value), repeatable")
    s.add_argument("--oracle", action="store_true")

    s = sub.add_parser("reproduce-tables", parents=[common], help="monomial l(b) = b^s tables as CSV")
    s.add_argument("--kmin", type=int)
    s.add_argument("--kmax", type=int)
    s.add_argument("--include-frobenius", action="store_true", help="do not skip s = 2^i (char 2)")
    s.add_argument("--plot", help="write a figure of the hits to this path")

    s = sub.add_parser("verify-known", parents=[common], help="check the known-trinomial table")
    s.add_argument("--kmin", type=int)
    s.add_argument("--kmax", type=int)

    s = sub.add_parser("verify-families", parents=[common], help="sweep named families against the oracle")
    s.add_argument("--family", action="append", help="family name, repeatable (default: all)")
    s.add_argument("--max-q2", type=int, default=2**20)
    s.add_argument("--budget", type=int, default=24, help="parameter tuples per field for sampled families")
    s.add_argument("--odd-prime-limit", type=int, default=None)
    s.add_argument("--L-level-k", type=int, action="append", default=[],
                   help="extra L-level checks for the trinomial families at this k, repeatable")
    s.add_argument("--all-records", action="store_true", help="text format: print every record")
    s.add_argument("--plot", help="write a summary figure to this path")

    s = sub.add_parser("search", parents=[common], help="monomial search or linearized classification")
    s.add_argument("--kind", choices=["monomial", "linearized"], default="monomial")
    s.add_argument("--t", type=int)
    s.add_argument("--include-frobenius", action="store_true")
    return parser


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: " + ", ".join(COMMANDS))
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        if args.command == "family" and args.name is None:
            raise UsageError("--name is required")
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"permpoly: error: {exc}", file=sys.stderr)
        return 2
    except PermPolyError as exc:
        print(f"permpoly: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
