"""``kernelforge`` command line.

Every command prints one JSON document ``{command, params, result, provenance}``
on stdout. Exact rationals are ``"p/q"`` strings; provenance tells exact
results apart from floating-point and Monte Carlo ones. Exit status is 0 on
success, 1 when a verification suite fails and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from fractions import Fraction

import numpy as np

from . import domains as dom
from . import kernels as K
from . import verify as V
from .domains import DomainError, UnsupportedDomainError
from .polyalg import fraction_str

logger = logging.getLogger("kernelforge")

EXACT, FLOAT, MONTE_CARLO = "exact", "float", "monte-carlo"
SUITES = ("inflation-ball", "reproducing-disk", "series", "selberg", "mc-hua", "projection",
          "chi-tables", "overlaps", "taylor", "all")


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _domain(text: str) -> dom.DomainType:
    try:
        return dom.parse_domain(text)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def parse_complex(text: str) -> complex:
    """``a+bi`` style literal (``j`` accepted too)."""
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise UsageError(f"cannot parse complex literal {text!r}") from None


def parse_point(tokens) -> list[complex]:
    out = []
    for tok in tokens or []:
        out.extend(parse_complex(p) for p in tok.split(",") if p.strip())
    return out


def _base_point(d: dom.DomainType, vals: list[complex]) -> np.ndarray:
    """Full row-major matrix (or vector), or the independent coordinates."""
    shape = d.shape()
    full = int(np.prod(shape))
    arr = np.asarray(vals, dtype=complex)
    if len(arr) == full:
        return arr.reshape(shape)
    if len(arr) == d.n_coords():
        return d.from_coords(arr)
    raise UsageError(
        f"{d.spec} expects {full} entries (row-major) or {d.n_coords()} coordinates, got {len(arr)}"
    )


def _cplx(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


# -- commands ------------------------------------------------------------------------


def cmd_invariants(args) -> tuple[dict, dict, str, int]:
    d = _domain(args.domain)
    return {"domain": d.spec}, dom.invariants(d).as_dict(), EXACT, 0


def cmd_chi(args):
    d = _domain(args.domain)
    chi = K.chi_polynomial(d)
    forms = [f for f in ("factored", "expanded", "latex") if getattr(args, f)] or ["factored"]
    result = {}
    if "factored" in forms:
        result["factored"] = chi.factored.pretty()
    if "expanded" in forms:
        result["expanded"] = chi.expanded.pretty()
        result["coefficients"] = chi.expanded.to_strings()
    if "latex" in forms:
        result["latex"] = chi.factored.latex()
    result["degree"] = chi.degree
    table = None
    if args.format == "csv":
        if "expanded" not in forms:
            raise UsageError("--format csv needs --expanded")
        table = (("power", "coefficient"), list(enumerate(chi.expanded.to_strings())))
    return {"domain": d.spec, "forms": forms}, result, EXACT, 0, table


def cmd_hua(args):
    d = _domain(args.domain)
    s = args.s
    try:
        val = K.hua_ratio(d, s)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    return {"domain": d.spec, "s": fraction_str(s)}, fraction_str(val), EXACT, 0


def cmd_vk(args):
    d = _domain(args.domain)
    try:
        vk = K.virtual_decomposition(d, args.mu)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    params = {"domain": d.spec, "mu": fraction_str(vk.mu)}
    if args.eval is not None:
        if args.format == "csv":
            raise UsageError("--format csv applies to coefficient tables only")
        t, m = parse_complex(args.eval[0]), args.eval[1]
        try:
            m = int(m)
        except ValueError:
            raise UsageError(f"m must be an integer, got {m!r}") from None
        try:
            val = K.f_eval(vk, t, m, args.convention)
        except (ValueError, K.DivergenceError) as exc:
            raise UsageError(str(exc)) from None
        params.update({"t": _cplx(t), "m": m, "convention": args.convention})
        return params, {"value": _cplx(val)}, FLOAT, 0
    coeffs = [fraction_str(c) for c in vk.coeffs]
    table = (("j", "c"), list(enumerate(coeffs))) if args.format == "csv" else None
    return params, {"c": coeffs}, EXACT, 0, table


def cmd_kernel(args):
    d = _domain(args.domain)
    if not d.concrete:
        raise UsageError(f"type {d.label} has no concrete realization for point evaluation")
    z = _base_point(d, parse_point(args.point))
    Z = parse_point(args.fiber)
    if len(Z) != args.m:
        raise UsageError(f"--fiber needs {args.m} entries for --m {args.m}, got {len(Z)}")
    w = W = None
    if args.w_point is not None:
        w = _base_point(d, parse_point(args.w_point))
        W = parse_point(args.w_fiber)
        if len(W) != args.m:
            raise UsageError(f"--w-fiber needs {args.m} entries")
    normalization = K.Normalization(args.normalization) if args.normalization else None
    try:
        kv = K.inflated_kernel(d, args.mu, args.m, z, Z, w, W, normalization=normalization,
                               volume=args.volume, convention=args.convention)
    except (DomainError, ValueError, ArithmeticError) as exc:
        raise UsageError(str(exc)) from None
    params = {
        "domain": d.spec,
        "mu": fraction_str(args.mu),
        "m": args.m,
        "point": [_cplx(v) for v in parse_point(args.point)],
        "fiber": [_cplx(v) for v in Z],
        "convention": args.convention,
    }
    if w is not None:
        params["w_point"] = [_cplx(v) for v in parse_point(args.w_point)]
        params["w_fiber"] = [_cplx(v) for v in W]
    result = {"value": _cplx(kv.value), "normalization": kv.normalization.value}
    return params, result, FLOAT, 0


def _suite_reports(name: str, args) -> tuple[list[V.Report], str]:
    seed = args.seed
    if name == "inflation-ball":
        n = args.n or 1
        m = args.m or 1
        return [V.check_inflation_ball(n, m, seed=seed, convention=args.convention)], FLOAT
    if name == "reproducing-disk":
        mus = [args.mu] if args.mu is not None else [0, 1, 2]
        return [V.check_reproducing_disk(mu) for mu in mus], FLOAT
    if name == "series":
        d = _domain(args.domain or "I:1,1")
        mu = args.mu if args.mu is not None else 1
        return [V.check_series_vs_closed(d, mu, convention=args.convention)], FLOAT
    if name == "selberg":
        return [V.check_selberg(seed=seed)], FLOAT
    if name == "mc-hua":
        d = _domain(args.domain or "I:1,1")
        s = args.s if args.s is not None else Fraction(1)
        return [V.check_mc_hua(d, s, samples=args.samples, seed=seed)], MONTE_CARLO
    if name == "projection":
        return [V.check_homogeneous_projection(m=args.m or 2, seed=seed)], FLOAT
    if name == "chi-tables":
        return [V.check_chi_tables()], EXACT
    if name == "overlaps":
        return [V.check_overlaps()], EXACT
    if name == "taylor":
        return [V.check_taylor()], EXACT
    raise UsageError(f"unknown suite {name!r}")


def cmd_verify(args):
    if args.samples <= 0:
        raise UsageError("--samples must be positive")
    names = [s for s in SUITES if s != "all"] if args.suite == "all" else [args.suite]
    reports = []
    provenance = EXACT
    rank = {EXACT: 0, FLOAT: 1, MONTE_CARLO: 2}
    for name in names:
        try:
            reps, prov = _suite_reports(name, args)
        except (DomainError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        reports.extend(reps)
        if rank[prov] > rank[provenance]:
            provenance = prov
    passed = all(r.passed for r in reports)
    params = {"suite": args.suite, "seed": args.seed, "samples": args.samples}
    result = {"pass": passed, "reports": [r.to_dict() for r in reports]}
    return params, result, provenance, 0 if passed else 1


# -- plumbing ------------------------------------------------------------------------


def _default_seed() -> int:
    raw = os.environ.get("KERNELFORGE_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"KERNELFORGE_SEED must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json",
                        help="csv is available for coefficient tables")

    p = argparse.ArgumentParser(prog="kernelforge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("invariants", parents=[common], help="rank, multiplicities, genus, dimension")
    sp.add_argument("domain", help="I:m,n | II:n | III:n | IV:n | V | VI")
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("chi", parents=[common], help="Hua polynomial")
    sp.add_argument("domain")
    sp.add_argument("--factored", action="store_true")
    sp.add_argument("--expanded", action="store_true")
    sp.add_argument("--latex", action="store_true")
    sp.set_defaults(func=cmd_chi)

    sp = sub.add_parser("hua", parents=[common], help="exact Hua ratio chi(0)/chi(s)")
    sp.add_argument("domain")
    sp.add_argument("--s", type=_rational, required=True)
    sp.set_defaults(func=cmd_hua)

    sp = sub.add_parser("vk", parents=[common], help="virtual kernel coefficients or values")
    sp.add_argument("domain")
    sp.add_argument("--mu", type=_rational, required=True)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--coeffs", action="store_true", help="exact c_j (default)")
    g.add_argument("--eval", nargs=2, metavar=("T", "M"), help="m-th scaled derivative at t")
    sp.add_argument("--convention", choices=(K.CORRECTED, K.UNCORRECTED), default=K.CORRECTED)
    sp.set_defaults(func=cmd_vk)

    sp = sub.add_parser("kernel", parents=[common], help="inflated-domain Bergman kernel")
    sp.add_argument("domain")
    sp.add_argument("--mu", type=_rational, default=Fraction(1))
    sp.add_argument("--m", type=int, default=0, help="fiber dimension")
    sp.add_argument("--point", nargs="+", required=True, help="base point, row-major a+bi list")
    sp.add_argument("--fiber", nargs="*", default=[], help="fiber vector Z")
    sp.add_argument("--w-point", nargs="+", help="second base point (defaults to the diagonal)")
    sp.add_argument("--w-fiber", nargs="*", default=[])
    sp.add_argument("--normalization", choices=[n.value for n in K.Normalization])
    sp.add_argument("--volume", type=float)
    sp.add_argument("--convention", choices=(K.CORRECTED, K.UNCORRECTED), default=K.CORRECTED)
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("verify", parents=[common], help="run a verification suite")
    sp.add_argument("suite", choices=SUITES)
    sp.add_argument("--seed", type=int, default=None, help="default: $KERNELFORGE_SEED or 0")
    sp.add_argument("--samples", type=int, default=10**5)
    sp.add_argument("--n", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--mu", type=_rational)
    sp.add_argument("--s", type=_rational)
    sp.add_argument("--domain")
    sp.add_argument("--convention", choices=(K.CORRECTED, K.UNCORRECTED), default=K.CORRECTED)
    sp.set_defaults(func=cmd_verify)
    return p


def _emit(record: dict, table, fmt: str, out) -> None:
    if fmt == "csv":
        if table is None:
            raise UsageError("--format csv applies to coefficient tables only")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table[0])
        w.writerows(table[1])
        out.write(buf.getvalue())
        return
    out.write(json.dumps(record, indent=2, allow_nan=True) + "\n")


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        out = args.func(args)
        params, result, provenance, code = out[:4]
        table = out[4] if len(out) > 4 else None
        record = {"command": args.command, "params": V._jsonable(params),
                  "result": V._jsonable(result), "provenance": provenance}
        _emit(record, table, args.format, sys.stdout)
    except (UsageError, UnsupportedDomainError) as exc:
        parser.exit(2, f"kernelforge: error: {exc}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
