"""Command-line interface; JSON on stdout, big integers as decimal strings."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import engine
from .clgroup import (build_presentation, subgroup_candidates, subgroup_elements_arbitrary,
                      subgroup_for_order, subgroup_of_order_any)
from .heights import (HeightProfile, height_bound_general, height_bound_opt, profile_for)
from .isogwalk import CurveFp, MissingModPoly, NotFound, WalkError, verify_order
from .normprimes import InsufficientPrimes, select_primes
from .qform import LimitExceeded

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2

S_CHOICES = {"e1": "e1", "-e1": "minus_e1", "minus_e1": "minus_e1", "random": "random"}
ALG_CHOICES = {"1": "A1", "2": "A2", "2L": "A2L", "A1": "A1", "A2": "A2", "A2L": "A2L"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _form(f) -> list[int]:
    return [f.a, f.b, f.c]


def cmd_classgroup(a) -> dict:
    P = build_presentation(a.disc)
    return {
        "D": str(a.disc), "h": P.h,
        "presentation": [{"norm": g.norm, "relative_order": g.relative_order,
                          "relation": list(g.relation), "form": _form(g.form)}
                         for g in P.generators],
        "subgroups": [{"d": G.d, "e": G.e, "n": G.n, "m": G.m} for G in subgroup_candidates(P)],
    }


def _bounds(prof: HeightProfile) -> dict:
    return {"n": prof.n, "m": prof.m, "bound_opt": height_bound_opt(prof),
            "bound_general": height_bound_general(prof)}


def cmd_heights(a) -> dict:
    P = build_presentation(a.disc)
    if a.all:
        return {"D": str(a.disc), "h": P.h,
                "subgroups": [dict(_bounds(profile_for(P, G)), d=G.d, e=G.e)
                              for G in subgroup_candidates(P)]}
    n = a.order if a.order is not None else 1
    if a.arbitrary:
        cosets = subgroup_elements_arbitrary(P, subgroup_of_order_any(P, n))
        return dict(_bounds(HeightProfile.from_cosets(a.disc, cosets)), D=str(a.disc))
    G = subgroup_for_order(P, n)
    return dict(_bounds(profile_for(P, G)), D=str(a.disc), d=G.d, e=G.e)


def cmd_find_primes(a) -> dict:
    P = build_presentation(a.disc)
    S = select_primes(a.disc, a.bits, P.norms, max_v=a.max_v)
    return {"D": str(a.disc), "bits": a.bits, "product_bits": round(S.product_bits, 3),
            "count": len(S),
            "primes": [{"p": str(sp.p), "t": str(sp.t), "v": sp.v} for sp in S.primes]}


def cmd_hilbert(a) -> dict:
    H = engine.hilbert_over_Z(a.disc, a.modpoly_dir, a.threads)
    if a.mod is not None:
        H = [c % a.mod for c in H]
    return {"D": str(a.disc), "mod": None if a.mod is None else str(a.mod),
            "degree": len(H) - 1, "coefficients": [str(c) for c in H]}


def cmd_construct(a) -> dict:
    cfg = engine.RunConfig(
        D=a.disc, q=a.q, algorithm=ALG_CHOICES[a.alg], order=a.order,
        s_policy=S_CHOICES[a.s], seed=a.seed, crt_mode=a.crt_mode,
        modpoly_dir=a.modpoly_dir, threads=a.threads, time_budget=a.time_budget)
    return engine.construct(cfg).to_json(timings=a.timings)


def cmd_verify(a) -> dict:
    E = CurveFp(a.a % a.q, a.b % a.q, a.q)
    chk = verify_order(E, a.order)
    return {"q": str(a.q), "a": str(E.a), "b": str(E.b), "order": str(a.order),
            "matches": chk.matches, "certified": chk.certified}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cmdecomp", description="CM curve construction via class polynomial decomposition")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classgroup", help="class number, presentation, subgroup candidates")
    p.add_argument("--disc", type=int, required=True)
    p.set_defaults(func=cmd_classgroup)

    p = sub.add_parser("heights", help="coefficient height bounds in bits")
    p.add_argument("--disc", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--order", type=int)
    g.add_argument("--all", action="store_true")
    p.add_argument("--arbitrary", action="store_true",
                   help="use some subgroup of the given order, not necessarily of walkable shape")
    p.set_defaults(func=cmd_heights)

    p = sub.add_parser("find-primes", help="CRT primes for a bound")
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--bits", type=float, required=True)
    p.add_argument("--max-v", type=int, default=2)
    p.set_defaults(func=cmd_find_primes)

    p = sub.add_parser("hilbert", help="H_D over Z, or reduced mod q")
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--mod", type=int)
    p.add_argument("--modpoly-dir")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_hilbert)

    p = sub.add_parser("construct", help="root of H_D mod q and a CM curve")
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--alg", choices=sorted(ALG_CHOICES), default="1")
    p.add_argument("--order", type=int)
    p.add_argument("--s", choices=sorted(S_CHOICES), default="e1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--crt-mode", choices=("A", "B"), default="B")
    p.add_argument("--modpoly-dir")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--timings", action="store_true", help="include wall-clock counters")
    p.add_argument("--time-budget", type=float, help="abort after this many seconds")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="check that y^2 = x^3 + ax + b has the given order")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(func=cmd_verify)
    return ap


def _glue_dash_values(argv: Sequence[str]) -> list[str]:
    # "--s -e1" would otherwise be read as an unknown option
    out = list(argv)
    for i in range(len(out) - 1):
        if out[i] == "--s" and out[i + 1].startswith("-"):
            out[i:i + 2] = [f"--s={out[i + 1]}", ""]
    return [x for x in out if x != ""]


def _text(obj, prefix="") -> list[str]:
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.extend(_text(v, f"{prefix}{k}."))
            else:
                lines.append(f"{prefix}{k}: {v}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            if isinstance(v, (dict, list)):
                lines.extend(_text(v, f"{prefix}{i}."))
            else:
                lines.append(f"{prefix}{i}: {v}")
    return lines


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_glue_dash_values(argv))
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        result = args.func(args)
    except (ValueError, ArithmeticError, LimitExceeded, InsufficientPrimes, MissingModPoly,
            NotFound, WalkError, engine.NoValidRoot, engine.OrderMismatch,
            engine.BudgetExceeded) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_DOMAIN
    if args.format == "json":
        out.write(json.dumps(result, indent=2) + "\n")
    else:
        out.write("\n".join(_text(result)) + "\n")
    if args.command == "verify" and not result["matches"]:
        return EXIT_DOMAIN
    return EXIT_OK


def main() -> None:
    raise SystemExit(run())
