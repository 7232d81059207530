"""Command-line entry point: ``sievecraft <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__
from .admissibility import LinearFormTuple, check_admissible, generate_admissible, parse_forms
from .config import ConfigError, load_config
from .domains import Domain, count_irreducibles, get_domain
from .errors import SievecraftError
from .search import bv_probe, congruence_demo, scan_constellations, window_alphas
from .serialization import dumps, dumps_line
from .sieve import SieveParams, resolve_threads, run_sieve
from .variational import maynard_bound_check, mk_lower_bound, parse_symmetric

OUTPUTS = ("json", "csv", "jsonl")


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser, domain: bool = True):
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--output", choices=OUTPUTS, default="json")
    p.add_argument("--seed", type=int, default=0, help="recorded in the output; all runs are deterministic")
    p.add_argument("--threads", type=int, default=None, help="worker processes (default: $SIEVECRAFT_THREADS or 1)")
    if domain:
        p.add_argument("--domain", choices=("z", "fq", "zi"), default="z")
        p.add_argument("--q", type=int, help="field size for --domain fq")


def _tuple_args(p: argparse.ArgumentParser):
    p.add_argument("--forms", help='comma-separated forms, e.g. "x, x+2" or "f, f+t^2+t"')
    p.add_argument("--tuple", help="JSON file holding a tuple ({\"forms\": [{\"a\", \"h\"}, ...]})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sievecraft", description="Maynard-Tao sieve experiments over Z, F_q[t] and Z[i].")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("admissible", help="decide admissibility and print a certificate")
    _common(p)
    _tuple_args(p)
    p.add_argument("--generate", type=int, metavar="K", help="generate an admissible K-tuple instead")
    p.add_argument("--style", choices=("dense-scan", "shifted-primes"), default="dense-scan")

    p = sub.add_parser("sieve", help="empirical versus predicted S1, S2")
    _common(p)
    _tuple_args(p)
    p.add_argument("--n", type=int, nargs="+", required=True,
                   help="window parameter N (the degree n for fq, N = q^n); several values give a sweep")
    p.add_argument("--d0", type=int, default=7)
    p.add_argument("--r", type=int, help="override R")
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--f", default="1", help='F as "1", "1-P1", an expression in P1, P2, or "degN"')

    p = sub.add_parser("mk", help="lower bound for M_k")
    _common(p, domain=False)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--degree-cap", type=int, default=4)
    p.add_argument("--theta", type=float, action="append", help="level(s) for r_k (default 0.5 and 1)")

    p = sub.add_parser("search", help="scan for prime constellations")
    _common(p)
    _tuple_args(p)
    p.add_argument("--m", type=int, required=True, help="minimum number of prime forms")
    _window_args(p)

    p = sub.add_parser("congruence", help="constellations of primes in a fixed residue class")
    _common(p)
    p.add_argument("--b", required=True)
    p.add_argument("--h", required=True, help="the modulus")
    p.add_argument("--shifts", required=True, help="comma-separated admissible shifts")
    p.add_argument("--m", type=int, default=2)
    _window_args(p)

    p = sub.add_parser("count-irreducibles", help="monic irreducibles of degree n over F_q")
    _common(p, domain=False)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("bv-probe", help="prime counts in residue classes of A(N)")
    _common(p)
    p.add_argument("--n", type=int, required=True, help="window parameter (degree for fq)")
    p.add_argument("--modulus-bound", type=int, required=True)
    p.add_argument("--B", type=float, default=1.0)

    p = sub.add_parser("version", help="print the version")
    _common(p, domain=False)
    return parser


def _window_args(p: argparse.ArgumentParser):
    p.add_argument("--lo", type=int, help="scan (lo, hi] over Z")
    p.add_argument("--hi", type=int)
    p.add_argument("--n", type=int, help="scan the window A(N) (degree n for fq)")


# -- helpers -------------------------------------------------------------------------

def _domain(args) -> Domain:
    if args.domain == "fq" and args.q is None:
        raise UsageError("--domain fq needs --q")
    return get_domain(args.domain, args.q)


def _window_N(domain: Domain, n: int) -> int:
    return domain.q ** n if domain.tag == "fq" else n


def _tuple(args, domain: Domain) -> LinearFormTuple:
    if args.forms and args.tuple:
        raise UsageError("give --forms or --tuple, not both")
    if args.forms:
        return parse_forms(domain, args.forms)
    if args.tuple:
        try:
            obj = json.loads(Path(args.tuple).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read tuple file: {exc}") from exc
        forms = obj["forms"] if isinstance(obj, dict) else obj
        if isinstance(forms, str):
            return parse_forms(domain, forms)
        return LinearFormTuple(domain, tuple((domain.from_json(f["a"]), domain.from_json(f["h"])) for f in forms))
    raise UsageError("a tuple is required (--forms or --tuple)")


def _alphas(args, domain: Domain) -> list:
    if args.lo is not None or args.hi is not None:
        if args.lo is None or args.hi is None:
            raise UsageError("--lo and --hi go together")
        return window_alphas(domain, lo=args.lo, hi=args.hi)
    if args.n is None:
        raise UsageError("give --lo/--hi or --n")
    return window_alphas(domain, N=_window_N(domain, args.n))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _flatten(obj, prefix="") -> dict:
    out = {}
    for key, v in obj.items():
        name = f"{prefix}{key}"
        if isinstance(v, dict):
            out.update(_flatten(v, name + "."))
        elif isinstance(v, list):
            out[name] = json.dumps(v, sort_keys=True)
        else:
            out[name] = v
    return out


def _emit(args, doc, rows=None, lines=None) -> str:
    if args.output == "csv":
        if rows is None:
            flat = _flatten(doc)
            return _csv(list(flat), [list(flat.values())])
        return _csv(*rows)
    if args.output == "jsonl":
        items = lines if lines is not None else (doc if isinstance(doc, list) else [doc])
        return "".join(dumps_line(x) + "\n" for x in items)
    return dumps(doc) + "\n"


# -- subcommands -------------------------------------------------------------------------

def cmd_admissible(args) -> str:
    d = _domain(args)
    if args.generate is not None:
        tup = generate_admissible(d, args.generate, args.style)
    else:
        tup = _tuple(args, d)
    cert = check_admissible(tup)
    return _emit(args, {"tuple": str(tup), "forms": tup.to_json()["forms"], "domain": d.describe(),
                        "admissible": cert.admissible, "certificate": cert.to_json(d)})


def cmd_sieve(args) -> str:
    d = _domain(args)
    tup = _tuple(args, d)
    F = parse_symmetric(args.f, tup.k)
    threads = resolve_threads(args.threads)
    reports = []
    failed = False
    for n in args.n:
        params = SieveParams(d, tup, _window_N(d, n), args.d0, F, args.theta, args.delta, args.r)
        rep = run_sieve(params, threads=threads)
        doc = rep.to_json()
        doc["params"]["seed"] = args.seed
        failed |= rep.error is not None
        reports.append(doc)
    if args.output == "csv":
        flats = [_flatten(r) for r in reports]
        header = list(flats[0])
        out = _csv(header, [[f.get(h) for h in header] for f in flats])
    else:
        out = _emit(args, reports[0] if len(reports) == 1 else reports, lines=reports)
    if failed:
        raise _PartialFailure(out, "empty slice: no window element satisfies the W-trick congruence")
    return out


class _PartialFailure(SievecraftError):
    def __init__(self, output: str, message: str):
        super().__init__(message)
        self.output = output


def cmd_mk(args) -> str:
    thetas = tuple(args.theta) if args.theta else (0.5, 1.0)
    res = mk_lower_bound(args.k, args.degree_cap, thetas)
    doc = res.to_json()
    doc["formula_check"] = maynard_bound_check(args.k, res.mk_bound) if args.k >= 2 else None
    doc["seed"] = args.seed
    return _emit(args, doc)


def _hits_output(args, d: Domain, tup: LinearFormTuple, hits, extra: dict) -> str:
    docs = [h.to_json(d) for h in hits]
    doc = {"domain": d.describe(), "tuple": str(tup), "m": args.m, **extra,
           "count": len(docs), "hits": docs, "seed": args.seed}
    rows = (["alpha", "prime_indices", "count"],
            [[json.dumps(x["alpha"]), " ".join(map(str, x["prime_indices"])), x["count"]] for x in docs])
    return _emit(args, doc, rows=rows, lines=docs)


def cmd_search(args) -> str:
    d = _domain(args)
    tup = _tuple(args, d)
    hits = scan_constellations(tup, _alphas(args, d), args.m, threads=resolve_threads(args.threads))
    return _hits_output(args, d, tup, hits, {"admissible": check_admissible(tup).admissible})


def cmd_congruence(args) -> str:
    from .search import congruence_forms

    d = _domain(args)
    shifts = [d.parse(s.strip()) for s in args.shifts.split(",")]
    forms = congruence_forms(d, d.parse(args.b), d.parse(args.h), shifts)
    hits = congruence_demo(d, d.parse(args.b), d.parse(args.h), shifts, args.m, _alphas(args, d),
                           threads=resolve_threads(args.threads))
    return _hits_output(args, d, forms, hits, {"b": args.b, "h": args.h})


def cmd_count_irreducibles(args) -> str:
    q, n = args.q, args.n
    a = count_irreducibles(q, n)
    main = q ** n / n
    doc = {"q": q, "n": n, "count": a, "main_term": main, "deviation": a - main,
           "bound": 2 * q ** (n / 2) / n, "within_bound": abs(a - main) <= 2 * q ** (n / 2) / n,
           "seed": args.seed}
    return _emit(args, doc)


def cmd_bv_probe(args) -> str:
    d = _domain(args)
    rep = bv_probe(d, _window_N(d, args.n), args.modulus_bound, args.B)
    doc = rep.to_json()
    doc["seed"] = args.seed
    if args.output == "csv":
        return rep.to_csv()
    return _emit(args, doc, lines=doc["moduli"])


def cmd_version(args) -> str:
    return _emit(args, {"name": "sievecraft", "version": __version__})


COMMANDS = {
    "admissible": cmd_admissible,
    "sieve": cmd_sieve,
    "mk": cmd_mk,
    "search": cmd_search,
    "congruence": cmd_congruence,
    "count-irreducibles": cmd_count_irreducibles,
    "bv-probe": cmd_bv_probe,
    "version": cmd_version,
}


def _config_path(argv: list[str]) -> str | None:
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if a.startswith("--config="):
            return a.split("=", 1)[1]
    return None


def _parse(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    path = _config_path(argv)
    if path is None or not argv or argv[0] not in COMMANDS:
        return parser.parse_args(argv)
    try:
        cfg = load_config(path)
    except OSError as exc:
        parser.error(f"cannot read config: {exc}")
    except ConfigError as exc:
        parser.error(str(exc))
    sub = parser._subparsers._group_actions[0].choices[argv[0]]
    dests = {a.dest for a in sub._actions}
    unknown = sorted(set(cfg) - dests)
    if unknown:
        sub.error(f"unknown config keys: {', '.join(unknown)}")
    for action in sub._actions:
        if action.dest not in cfg:
            continue
        value = cfg[action.dest]
        if action.nargs == "+" or isinstance(action, argparse._AppendAction):
            value = value if isinstance(value, list) else [value]
        elif isinstance(value, list):
            value = ", ".join(map(str, value))
        cfg[action.dest] = value
        # flags still override: a default only applies when the flag is absent
        action.required = False
    sub.set_defaults(**cfg)
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    if argv and argv[0] not in COMMANDS and not argv[0].startswith("-"):
        parser.print_usage(sys.stderr)
        print(f"sievecraft: unknown subcommand {argv[0]!r}", file=sys.stderr)
        return 2
    try:
        args = _parse(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"sievecraft: error: {exc}", file=sys.stderr)
        return 2
    except _PartialFailure as exc:
        sys.stdout.write(exc.output)
        print(f"sievecraft: {exc}", file=sys.stderr)
        return 1
    except SievecraftError as exc:
        print(f"sievecraft: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"sievecraft: invalid argument: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
