"""Command-line entry point: ``ap3 <command> ...``.

Exit codes: 0 success, 1 the input was refused (for example it contains a
progression), 2 bad usage or unreadable input, 3 an internal consistency
check failed.  Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional

from . import apsets, bohr, extremal, fourier, increment, slicerank, spectrum
from .errors import DomainRefusal, TheoremViolation
from .groups import SiteSet, emit_siteset, fraction_json, parse_siteset

EXIT_OK, EXIT_REFUSED, EXIT_USAGE, EXIT_BUG = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    fmt: str
    cache: Optional[str]
    seed: int
    threads: int


@dataclass
class Output:
    """A result in three renderings; ``rows`` backs the csv format."""

    data: Any
    text: Optional[str] = None
    rows: Optional[list[dict]] = None

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.data, separators=(",", ":"))
        if fmt == "csv":
            rows = self.rows if self.rows is not None else [_flatten(self.data)]
            buf = io.StringIO()
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
            return buf.getvalue().rstrip("\n")
        return self.text if self.text is not None else json.dumps(self.data, indent=2)


def _flatten(obj, prefix="") -> dict:
    if not isinstance(obj, dict):
        return {prefix or "value": json.dumps(obj) if isinstance(obj, list) else obj}
    out = {}
    for k, v in obj.items():
        key = f"{prefix}.{k}" if prefix else k
        if isinstance(v, dict):
            out.update(_flatten(v, key))
        else:
            out[key] = json.dumps(v) if isinstance(v, list) else v
    return out


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _load_set(path: str) -> SiteSet:
    return parse_siteset(_read(path))


def _q(x: Fraction) -> dict:
    return fraction_json(x)


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


# -- command handlers ----------------------------------------------------------------


def cmd_solve(args, cfg: RunConfig) -> Output:
    problem = extremal.Problem("integer" if args.kind == "integer" else "vector", args.size)
    rec = extremal.cache_get(cfg.cache, problem) if cfg.cache else None
    if rec is None or not rec.optimal:
        fresh = (extremal.solve_integer(args.size, args.budget) if args.kind == "integer"
                 else extremal.solve_vector(args.size, args.budget))
        if rec is None or (fresh.optimal, fresh.value) > (rec.optimal, rec.value):
            rec = fresh
            if cfg.cache:
                extremal.cache_put(cfg.cache, rec)
    text = f"r3 = {rec.value} ({rec.proof}, {rec.method})\nwitness: {list(rec.witness.elements)}"
    return Output(rec.to_json(), text)


def cmd_construct(args, cfg: RunConfig) -> Output:
    if args.kind == "product":
        if not (args.left and args.right):
            raise UsageError("construct product needs --left and --right")
        A = apsets.product_lift(_load_set(args.left), _load_set(args.right))
    else:
        if args.N is None:
            raise UsageError(f"construct {args.kind} needs --N")
        build = {"digit": lambda: apsets.construct_digit(args.N),
                 "behrend": lambda: apsets.construct_behrend(args.N, args.d),
                 "salem-spencer": lambda: apsets.construct_salem_spencer(args.N, args.d)}[args.kind]
        A = build()
    return Output(A.to_json(), emit_siteset(A))


def cmd_check(args, cfg: RunConfig) -> Output:
    A = _load_set(args.input)
    if args.what == "apfree":
        res = apsets.is_ap_free(A)
        data = {"free": res.free, "witness": list(res.witness) if res.witness else None}
        text = "AP-free" if res.free else f"not AP-free: x={res.witness[0]}, y={res.witness[1]}"
        return Output(data, text)
    c = apsets.count_3aps(A)
    data = {"total": c.total, "trivial": c.trivial, "nontrivial": c.nontrivial}
    return Output(data, f"{c.total} progressions ({c.trivial} trivial, {c.nontrivial} nontrivial)")


def cmd_analyze(args, cfg: RunConfig) -> Output:
    A = _load_set(args.input)
    what = args.what
    if what == "fourier":
        data = fourier.forward_transform(A.group, fourier.indicator(A)).to_json()
        return Output(data, json.dumps(data))
    if what == "spectrum":
        spec = spectrum.large_spectrum(A, args.delta)
        data = {"delta": _q(spec.delta), "frequencies": list(spec.frequencies),
                "boundary": list(spec.boundary)}
        return Output(data, f"|Spec| = {len(spec)}: {list(spec.frequencies)}")
    if what == "energy":
        rep = spectrum.energy(A, args.m)
        data = {"m": rep.m, "energy": rep.value, "fourier": rep.spectral,
                "normalized": _q(rep.normalized)}
        return Output(data, f"E_{2 * rep.m} = {rep.value}")
    if what == "dimension":
        res = spectrum.dissociated_dimension(A, args.mode)
        data = {"dimension": res.dimension, "witness": list(res.witness), "exact": res.exact}
        return Output(data, f"dimension {res.dimension} ({'exact' if res.exact else 'lower bound'})")
    if what == "chang":
        rep = spectrum.chang_diagnostic(A, args.delta, args.mode)
        data = {"spectrum_size": rep.spectrum_size, "dimension": rep.dimension, "exact": rep.exact,
                "witness": list(rep.witness), "chang_ratio": rep.chang_ratio,
                "bloom_ratio": rep.bloom_ratio}
        return Output(data)
    if what == "nonsmoothing":
        rep = spectrum.nonsmoothing_probe(A, args.delta, args.kappa)
        data = {"spectrum_size": rep.spectrum_size, "e4": rep.e4, "e8": rep.e8,
                "tau": _q(rep.tau), "sigma": _q(rep.sigma), "ratios": rep.ratios,
                "kappa": rep.kappa, "non_smoothing": rep.non_smoothing,
                "sigma_ge_tau_cubed": rep.sigma_ge_tau_cubed, "degenerate": rep.degenerate}
        return Output(data)
    if what == "ell3":
        rep = spectrum.ell3_mass(A)
        data = {"total": rep.total, "small_count": rep.small_count, "small_mass": rep.small_mass,
                "bands": [{"delta": _q(b.delta), "count": b.count, "mass": b.mass} for b in rep.bands]}
        rows = [{"delta": str(b.delta), "count": b.count, "mass": b.mass} for b in rep.bands]
        return Output(data, rows=rows or None)
    rep = spectrum.lp_convolution_norm(A, args.m)
    data = {"m": rep.m, "moment": _q(rep.moment), "norm": rep.norm}
    return Output(data, f"L^{2 * rep.m} norm = {rep.norm!r}")


def _load_bohr(args) -> bohr.BohrSet:
    if args.input:
        try:
            return bohr.parse_bohr(_read(args.input))
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid Bohr-set JSON: {exc}") from None
    if args.modulus is None or args.gamma is None or args.nu is None:
        raise UsageError("give --input or all of --modulus, --gamma, --nu")
    from .groups import AmbientGroup
    return bohr.bohr_build(AmbientGroup.cyclic(args.modulus), args.gamma, args.nu)


def cmd_bohr(args, cfg: RunConfig) -> Output:
    B = _load_bohr(args)
    if args.what == "build":
        data = dict(B.to_json(), size=len(B), members=[int(x) for x in B.members()])
        return Output(data, f"|B| = {len(B)}")
    if args.what == "dilate":
        if args.rho is None:
            raise UsageError("bohr dilate needs --rho")
        D = bohr.dilate(B, args.rho)
        data = dict(D.to_json(), size=len(D), members=[int(x) for x in D.members()],
                    size_bound_ok=bohr.size_lower_bound_holds(B, args.rho) if args.rho < 1 else None)
        return Output(data, f"|B_rho| = {len(D)}")
    if args.what == "regular":
        if args.find is not None:
            rho = bohr.find_regular_dilate(B, args.find)
            return Output({"rho": rho, "size": len(bohr.dilate(B, rho))}, f"regular dilate at rho = {rho!r}")
        v = bohr.regularity_check(B)
        data = {"regular": v.regular, "delta": v.delta, "size": v.size}
        return Output(data, "regular" if v.regular else f"irregular at delta = {v.delta!r}")
    if args.rho is None:
        raise UsageError("bohr apcount needs --rho")
    rc = bohr.restricted_ap_count(B, args.rho)
    data = {"count": rc.count, "defect": rc.defect, "size": rc.size, "dilate_size": rc.dilate_size,
            "defect_bound": _q(rc.defect_bound), "defect_ok": rc.defect_ok,
            "lower_bound": rc.lower_bound}
    return Output(data, f"count {rc.count}, defect {rc.defect}")


def cmd_increment(args, cfg: RunConfig) -> Output:
    A = _load_set(args.input)
    trace = increment.meshulam_drive(A) if args.kind == "meshulam" else increment.roth_drive(A)
    data = trace.to_json()
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            json.dump(data, fh, separators=(",", ":"))
    lines = [f"level {s.level}: size {s.size}, density {s.density}, {s.certificate.branch}"
             for s in trace.steps]
    rows = [{"level": s.level, "size": s.size, "density": str(s.density),
             "branch": s.certificate.branch} for s in trace.steps]
    return Output(data, "\n".join(lines), rows)


def cmd_slicerank(args, cfg: RunConfig) -> Output:
    if args.what == "bound":
        if args.n is None:
            raise UsageError("slicerank bound needs --n")
        m = slicerank.count_bound(args.n)
        return Output({"n": args.n, "bound": m}, str(m))
    if args.what == "rate":
        if args.to is None:
            raise UsageError("slicerank rate needs --to")
        table = slicerank.rate_report(args.to)
        rows = [{"n": r.n, "bound": str(r.bound), "root": repr(r.root)} for r in table]
        data = {"rows": [{"n": r.n, "bound": str(r.bound), "root": r.root} for r in table],
                "eg_rate": slicerank.eg_rate_constant()[0], "hoeffding_rate": slicerank.hoeffding_rate()}
        text = "\n".join(f"{r.n}\t{r.bound}\t{r.root:.10f}" for r in table)
        return Output(data, text, rows)
    if not args.input:
        raise UsageError("slicerank decompose needs --input")
    A = _load_set(args.input)
    D = slicerank.build_decomposition(A)
    check = slicerank.verify_decomposition(slicerank.diagonal(len(A)), D, seed=cfg.seed)
    t1, t2, t = D.split
    data = {"size": len(A), "parts": t, "split": [t1, t2, t], "monomials": D.monomials,
            "boundary_monomials": D.boundary_monomials,
            "bound": slicerank.count_bound(A.group.dimension),
            "verified": check.ok, "exhaustive": check.exhaustive}
    if not check.ok:
        raise TheoremViolation(f"decomposition mismatch at {check.mismatch}")
    return Output(data, f"{t} parts (split {t1}/{t2}/{t}), verified")


# -- parser --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ap3", description="Progression-free sets: solvers, constructions, diagnostics.")
    p.add_argument("--format", choices=("text", "json", "csv"), default="json")
    p.add_argument("--cache", help="JSON-lines results cache for solve")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="exact r3 values")
    ssub = s.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    si = ssub.add_parser("integer")
    si.add_argument("--N", dest="size", type=int, required=True)
    sv = ssub.add_parser("vector")
    sv.add_argument("--n", dest="size", type=int, required=True)
    for q in (si, sv):
        q.add_argument("--budget", type=int, default=extremal.DEFAULT_BUDGET)
        q.add_argument("--cache", dest="local_cache")
    s.set_defaults(handler=cmd_solve)

    c = sub.add_parser("construct", help="progression-free constructions")
    c.add_argument("kind", choices=("digit", "behrend", "salem-spencer", "product"))
    c.add_argument("--N", type=int)
    c.add_argument("--d", type=int)
    c.add_argument("--left")
    c.add_argument("--right")
    c.set_defaults(handler=cmd_construct)

    k = sub.add_parser("check", help="progression checks")
    k.add_argument("what", choices=("apfree", "count"))
    k.add_argument("input")
    k.set_defaults(handler=cmd_check)

    a = sub.add_parser("analyze", help="Fourier and spectral diagnostics")
    a.add_argument("what", choices=("fourier", "spectrum", "energy", "dimension", "chang",
                                    "nonsmoothing", "ell3", "lpnorm"))
    a.add_argument("input")
    a.add_argument("--delta", type=_frac, default=Fraction(1, 2))
    a.add_argument("--m", type=int, default=2)
    a.add_argument("--kappa", type=float, default=4.0)
    a.add_argument("--mode", choices=("auto", "exact", "greedy"), default="auto")
    a.add_argument("--json", action="store_true", help="same as --format json")
    a.set_defaults(handler=cmd_analyze)

    b = sub.add_parser("bohr", help="Bohr sets in Z/NZ")
    b.add_argument("what", choices=("build", "dilate", "regular", "apcount"))
    b.add_argument("--input")
    b.add_argument("--modulus", type=int)
    b.add_argument("--gamma", type=int, nargs="+")
    b.add_argument("--nu", type=float, nargs="+")
    b.add_argument("--rho", type=float)
    b.add_argument("--find", type=float, help="search for a regular dilate in [t/2, t]")
    b.set_defaults(handler=cmd_bohr)

    i = sub.add_parser("increment", help="density-increment drivers")
    i.add_argument("kind", choices=("meshulam", "roth"))
    i.add_argument("--input", required=True)
    i.add_argument("--trace")
    i.set_defaults(handler=cmd_increment)

    r = sub.add_parser("slicerank", help="polynomial-method bound")
    r.add_argument("what", choices=("bound", "rate", "decompose"))
    r.add_argument("--n", type=int)
    r.add_argument("--to", type=int)
    r.add_argument("--csv", action="store_true", help="same as --format csv")
    r.add_argument("--input")
    r.set_defaults(handler=cmd_slicerank)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="ap3: %(message)s", stream=sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        fmt = args.format
        if getattr(args, "json", False):
            fmt = "json"
        if getattr(args, "csv", False):
            fmt = "csv"
        if args.threads < 1:
            raise UsageError("--threads must be positive")
        cache = getattr(args, "local_cache", None) or args.cache
        cfg = RunConfig(args.command, fmt, cache, args.seed, args.threads)
        out = args.handler(args, cfg)
        print(out.render(cfg.fmt))
        return EXIT_OK
    except UsageError as exc:
        print(f"ap3: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TheoremViolation as exc:
        print(f"ap3: internal check failed: {exc}", file=sys.stderr)
        return EXIT_BUG
    except DomainRefusal as exc:
        print(f"ap3: refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (ValueError, TypeError, KeyError) as exc:
        print(f"ap3: bad input: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
